#pragma once

#include <functional>
#include <span>
#include <string>

#include "pivotmt/graph.hpp"

namespace pivotmt {

// Builds the scalar loss on a fresh graph from the current parameter values.
using LossBuilder = std::function<Var(Graph&)>;

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  std::size_t entries_checked = 0;
};

enum class DifferenceScheme {
  central,     // (f(p + h) - f(p - h)) / 2h
  richardson,  // (4 D(h/2) - D(h)) / 3 over central differences D, O(h^4)
};

// Compares reverse-mode gradients against central differences
// (f(p + h) - f(p - h)) / 2h for every entry of every parameter. The
// relative error per entry is |analytic - numeric| / max(|analytic|,
// |numeric|, 1e-8). Requires 64-bit precision mode; parameter values are
// restored before returning.
GradCheckResult finite_difference_check(const LossBuilder& loss_fn, std::span<Parameter* const> params,
                                        double step = 1e-5,
                                        DifferenceScheme scheme = DifferenceScheme::central);

}  // namespace pivotmt
