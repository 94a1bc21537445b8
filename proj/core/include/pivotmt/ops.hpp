#pragma once

#include <cstddef>
#include <span>

#include "pivotmt/graph.hpp"

namespace pivotmt {

// Smallest norm l2_normalize_rows accepts.
inline constexpr double kNormEpsilon = 1e-12;

Var matmul(Var a, Var b);
Var transpose(Var a);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double factor);
Var add_scalar(Var a, double offset);
// x (n x m) plus bias (1 x m) on every row; the only broadcast supported.
Var add_row(Var x, Var bias);

Var tanh(Var a);
Var sigmoid(Var a);
// max(0, x); the subgradient at 0 is 0.
Var hinge(Var a);

// Row-wise dot product of two n x m matrices, giving n x 1.
Var row_dot(Var a, Var b);
// Each row divided by its l2 norm; throws DegenerateVectorError when a row
// norm is <= kNormEpsilon.
Var l2_normalize_rows(Var a);
// Embedding lookup: rows of `table` selected by `ids`.
Var gather_rows(Var table, std::span<const std::size_t> ids);
// Sum over rows r of weights[r] * -log softmax(logits[r])[targets[r]].
Var softmax_cross_entropy(Var logits, std::span<const std::size_t> targets,
                          std::span<const double> weights);

Var sum(Var a);
Var mean(Var a);
Var concat_cols(Var a, Var b);
Var slice_cols(Var a, std::size_t begin, std::size_t end);

inline Var operator+(Var a, Var b) { return add(a, b); }
inline Var operator-(Var a, Var b) { return sub(a, b); }
inline Var operator*(Var a, Var b) { return mul(a, b); }

}  // namespace pivotmt
