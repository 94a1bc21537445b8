#include "pivotmt/ops.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "pivotmt/error.hpp"

namespace pivotmt {
namespace {

void require_matrix(const char* op, const Tensor& t) {
  if (t.rank() != 2) {
    throw DimensionError(std::string(op) + ": expected a matrix, got shape " + shape_string(t.shape()));
  }
}

void require_same_graph(const char* op, Var a, Var b) {
  if (a.graph != b.graph) throw ContractError(std::string(op) + ": operands from different graphs");
}

[[noreturn]] void mismatch(const char* op, const Tensor& a, const Tensor& b) {
  throw DimensionError(std::string(op) + ": shape mismatch " + shape_string(a.shape()) + " vs " +
                       shape_string(b.shape()));
}

void require_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  require_matrix(op, a);
  require_matrix(op, b);
  if (a.shape() != b.shape()) mismatch(op, a, b);
}

// out (n x m) += a (n x k) * b (k x m)
void gemm_nn(const Tensor& a, const Tensor& b, Tensor& out) {
  const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  double* po = out.data().data();
  for (std::size_t i = 0; i < n; ++i) {
    double* orow = po + i * m;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = pa[i * k + p];
      if (av == 0.0) continue;
      const double* brow = pb + p * m;
      for (std::size_t j = 0; j < m; ++j) orow[j] += av * brow[j];
    }
  }
}

// out (n x k) += g (n x m) * b^T where b is k x m
void gemm_nt(const Tensor& g, const Tensor& b, Tensor& out) {
  const std::size_t n = g.rows(), m = g.cols(), k = b.rows();
  const double* pg = g.data().data();
  const double* pb = b.data().data();
  double* po = out.data().data();
  for (std::size_t i = 0; i < n; ++i) {
    const double* grow = pg + i * m;
    for (std::size_t p = 0; p < k; ++p) {
      const double* brow = pb + p * m;
      double s = 0.0;
      for (std::size_t j = 0; j < m; ++j) s += grow[j] * brow[j];
      po[i * k + p] += s;
    }
  }
}

// out (k x m) += a^T * g where a is n x k and g is n x m
void gemm_tn(const Tensor& a, const Tensor& g, Tensor& out) {
  const std::size_t n = a.rows(), k = a.cols(), m = g.cols();
  const double* pa = a.data().data();
  const double* pg = g.data().data();
  double* po = out.data().data();
  for (std::size_t i = 0; i < n; ++i) {
    const double* grow = pg + i * m;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = pa[i * k + p];
      if (av == 0.0) continue;
      double* orow = po + p * m;
      for (std::size_t j = 0; j < m; ++j) orow[j] += av * grow[j];
    }
  }
}

template <typename Forward, typename Derivative>
Var unary(Var a, Forward f, Derivative df) {
  const Tensor& x = a.value();
  require_matrix("unary", x);
  Tensor out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = f(x[i]);
  return a.graph->record(std::move(out), {a.id}, [ia = a.id, df](Graph& g, std::size_t self) {
    Tensor* ga = g.grad_buffer(ia);
    if (!ga) return;
    const Tensor& up = g.upstream(self);
    const Tensor& x = g.value(ia);
    const Tensor& y = g.value(self);
    for (std::size_t i = 0; i < up.size(); ++i) (*ga)[i] += up[i] * df(x[i], y[i]);
  });
}

}  // namespace

Var matmul(Var a, Var b) {
  require_same_graph("matmul", a, b);
  const Tensor& x = a.value();
  const Tensor& y = b.value();
  require_matrix("matmul", x);
  require_matrix("matmul", y);
  if (x.cols() != y.rows()) mismatch("matmul", x, y);
  Tensor out = Tensor::matrix(x.rows(), y.cols());
  gemm_nn(x, y, out);
  return a.graph->record(std::move(out), {a.id, b.id}, [ia = a.id, ib = b.id](Graph& g, std::size_t self) {
    const Tensor& up = g.upstream(self);
    if (Tensor* ga = g.grad_buffer(ia)) gemm_nt(up, g.value(ib), *ga);
    if (Tensor* gb = g.grad_buffer(ib)) gemm_tn(g.value(ia), up, *gb);
  });
}

Var transpose(Var a) {
  const Tensor& x = a.value();
  require_matrix("transpose", x);
  Tensor out = Tensor::matrix(x.cols(), x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < x.cols(); ++c) out(c, r) = x(r, c);
  return a.graph->record(std::move(out), {a.id}, [ia = a.id](Graph& g, std::size_t self) {
    Tensor* ga = g.grad_buffer(ia);
    if (!ga) return;
    const Tensor& up = g.upstream(self);
    for (std::size_t r = 0; r < up.rows(); ++r)
      for (std::size_t c = 0; c < up.cols(); ++c) (*ga)(c, r) += up(r, c);
  });
}

Var add(Var a, Var b) {
  require_same_graph("add", a, b);
  require_same_shape("add", a.value(), b.value());
  Tensor out = a.value();
  const Tensor& y = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += y[i];
  return a.graph->record(std::move(out), {a.id, b.id}, [ia = a.id, ib = b.id](Graph& g, std::size_t self) {
    const Tensor& up = g.upstream(self);
    for (std::size_t in : {ia, ib}) {
      if (Tensor* gi = g.grad_buffer(in))
        for (std::size_t i = 0; i < up.size(); ++i) (*gi)[i] += up[i];
    }
  });
}

Var sub(Var a, Var b) {
  require_same_graph("sub", a, b);
  require_same_shape("sub", a.value(), b.value());
  Tensor out = a.value();
  const Tensor& y = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= y[i];
  return a.graph->record(std::move(out), {a.id, b.id}, [ia = a.id, ib = b.id](Graph& g, std::size_t self) {
    const Tensor& up = g.upstream(self);
    if (Tensor* ga = g.grad_buffer(ia))
      for (std::size_t i = 0; i < up.size(); ++i) (*ga)[i] += up[i];
    if (Tensor* gb = g.grad_buffer(ib))
      for (std::size_t i = 0; i < up.size(); ++i) (*gb)[i] -= up[i];
  });
}

Var mul(Var a, Var b) {
  require_same_graph("mul", a, b);
  require_same_shape("mul", a.value(), b.value());
  Tensor out = a.value();
  const Tensor& y = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= y[i];
  return a.graph->record(std::move(out), {a.id, b.id}, [ia = a.id, ib = b.id](Graph& g, std::size_t self) {
    const Tensor& up = g.upstream(self);
    if (Tensor* ga = g.grad_buffer(ia)) {
      const Tensor& y = g.value(ib);
      for (std::size_t i = 0; i < up.size(); ++i) (*ga)[i] += up[i] * y[i];
    }
    if (Tensor* gb = g.grad_buffer(ib)) {
      const Tensor& x = g.value(ia);
      for (std::size_t i = 0; i < up.size(); ++i) (*gb)[i] += up[i] * x[i];
    }
  });
}

Var scale(Var a, double factor) {
  return unary(a, [factor](double x) { return factor * x; }, [factor](double, double) { return factor; });
}

Var add_scalar(Var a, double offset) {
  return unary(a, [offset](double x) { return x + offset; }, [](double, double) { return 1.0; });
}

Var add_row(Var x, Var bias) {
  require_same_graph("add_row", x, bias);
  const Tensor& xv = x.value();
  const Tensor& bv = bias.value();
  require_matrix("add_row", xv);
  require_matrix("add_row", bv);
  if (bv.rows() != 1 || bv.cols() != xv.cols()) mismatch("add_row", xv, bv);
  Tensor out = xv;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] += bv[c];
  }
  return x.graph->record(std::move(out), {x.id, bias.id}, [ix = x.id, ib = bias.id](Graph& g, std::size_t self) {
    const Tensor& up = g.upstream(self);
    if (Tensor* gx = g.grad_buffer(ix))
      for (std::size_t i = 0; i < up.size(); ++i) (*gx)[i] += up[i];
    if (Tensor* gb = g.grad_buffer(ib))
      for (std::size_t r = 0; r < up.rows(); ++r)
        for (std::size_t c = 0; c < up.cols(); ++c) (*gb)[c] += up(r, c);
  });
}

Var tanh(Var a) {
  return unary(a, [](double x) { return std::tanh(x); }, [](double, double y) { return 1.0 - y * y; });
}

Var sigmoid(Var a) {
  return unary(
      a,
      [](double x) {
        if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Var hinge(Var a) {
  return unary(a, [](double x) { return x > 0.0 ? x : 0.0; }, [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Var row_dot(Var a, Var b) {
  require_same_graph("row_dot", a, b);
  const Tensor& x = a.value();
  const Tensor& y = b.value();
  require_same_shape("row_dot", x, y);
  Tensor out = Tensor::matrix(x.rows(), 1);
  for (std::size_t r = 0; r < x.rows(); ++r) out[r] = dot(x.row(r), y.row(r));
  return a.graph->record(std::move(out), {a.id, b.id}, [ia = a.id, ib = b.id](Graph& g, std::size_t self) {
    const Tensor& up = g.upstream(self);
    const Tensor& x = g.value(ia);
    const Tensor& y = g.value(ib);
    Tensor* ga = g.grad_buffer(ia);
    Tensor* gb = g.grad_buffer(ib);
    for (std::size_t r = 0; r < x.rows(); ++r) {
      for (std::size_t c = 0; c < x.cols(); ++c) {
        if (ga) (*ga)(r, c) += up[r] * y(r, c);
        if (gb) (*gb)(r, c) += up[r] * x(r, c);
      }
    }
  });
}

Var l2_normalize_rows(Var a) {
  const Tensor& x = a.value();
  require_matrix("l2_normalize", x);
  Tensor out = x;
  std::vector<double> norms(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const double n = l2_norm(x.row(r));
    if (!(n > kNormEpsilon)) {
      throw DegenerateVectorError("l2_normalize: row " + std::to_string(r) + " has norm " + std::to_string(n) +
                                  " <= 1e-12");
    }
    norms[r] = n;
    for (double& v : out.row(r)) v /= n;
  }
  return a.graph->record(std::move(out), {a.id},
                         [ia = a.id, norms = std::move(norms)](Graph& g, std::size_t self) {
                           Tensor* ga = g.grad_buffer(ia);
                           if (!ga) return;
                           const Tensor& up = g.upstream(self);
                           const Tensor& y = g.value(self);
                           for (std::size_t r = 0; r < y.rows(); ++r) {
                             const double yg = dot(y.row(r), up.row(r));
                             for (std::size_t c = 0; c < y.cols(); ++c)
                               (*ga)(r, c) += (up(r, c) - y(r, c) * yg) / norms[r];
                           }
                         });
}

Var gather_rows(Var table, std::span<const std::size_t> ids) {
  const Tensor& t = table.value();
  require_matrix("gather_rows", t);
  if (ids.empty()) throw DimensionError("gather_rows: empty id list");
  Tensor out = Tensor::matrix(ids.size(), t.cols());
  for (std::size_t r = 0; r < ids.size(); ++r) {
    if (ids[r] >= t.rows()) {
      throw DimensionError("gather_rows: id " + std::to_string(ids[r]) + " out of range for table " +
                           shape_string(t.shape()));
    }
    auto src = t.row(ids[r]);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  std::vector<std::size_t> keep(ids.begin(), ids.end());
  return table.graph->record(std::move(out), {table.id},
                             [it = table.id, keep = std::move(keep)](Graph& g, std::size_t self) {
                               Tensor* gt = g.grad_buffer(it);
                               if (!gt) return;
                               const Tensor& up = g.upstream(self);
                               for (std::size_t r = 0; r < keep.size(); ++r) {
                                 auto dst = gt->row(keep[r]);
                                 auto src = up.row(r);
                                 for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += src[c];
                               }
                             });
}

Var softmax_cross_entropy(Var logits, std::span<const std::size_t> targets, std::span<const double> weights) {
  const Tensor& x = logits.value();
  require_matrix("softmax_cross_entropy", x);
  if (targets.size() != x.rows() || weights.size() != x.rows()) {
    throw DimensionError("softmax_cross_entropy: logits " + shape_string(x.shape()) + " with " +
                         std::to_string(targets.size()) + " targets and " + std::to_string(weights.size()) +
                         " weights");
  }
  Tensor probs = x;
  double loss = 0.0;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    if (targets[r] >= x.cols()) {
      throw DimensionError("softmax_cross_entropy: target " + std::to_string(targets[r]) + " out of range");
    }
    auto row = x.row(r);
    double m = row[0];
    for (double v : row) m = std::max(m, v);
    double z = 0.0;
    for (double v : row) z += std::exp(v - m);
    const double lse = m + std::log(z);
    auto p = probs.row(r);
    for (std::size_t c = 0; c < p.size(); ++c) p[c] = std::exp(row[c] - lse);
    if (weights[r] != 0.0) loss += weights[r] * (lse - row[targets[r]]);
  }
  std::vector<std::size_t> tgt(targets.begin(), targets.end());
  std::vector<double> w(weights.begin(), weights.end());
  return logits.graph->record(
      Tensor::scalar(loss), {logits.id},
      [il = logits.id, probs = std::move(probs), tgt = std::move(tgt), w = std::move(w)](Graph& g, std::size_t self) {
        Tensor* gl = g.grad_buffer(il);
        if (!gl) return;
        const double up = g.upstream(self)[0];
        for (std::size_t r = 0; r < probs.rows(); ++r) {
          if (w[r] == 0.0) continue;
          const double k = up * w[r];
          auto p = probs.row(r);
          auto dst = gl->row(r);
          for (std::size_t c = 0; c < p.size(); ++c) dst[c] += k * p[c];
          dst[tgt[r]] -= k;
        }
      });
}

Var sum(Var a) {
  const Tensor& x = a.value();
  double s = 0.0;
  for (double v : x.data()) s += v;
  return a.graph->record(Tensor::scalar(s), {a.id}, [ia = a.id](Graph& g, std::size_t self) {
    Tensor* ga = g.grad_buffer(ia);
    if (!ga) return;
    const double up = g.upstream(self)[0];
    for (double& v : ga->data()) v += up;
  });
}

Var mean(Var a) {
  const double n = static_cast<double>(a.value().size());
  const Tensor& x = a.value();
  double s = 0.0;
  for (double v : x.data()) s += v;
  return a.graph->record(Tensor::scalar(s / n), {a.id}, [ia = a.id, n](Graph& g, std::size_t self) {
    Tensor* ga = g.grad_buffer(ia);
    if (!ga) return;
    const double up = g.upstream(self)[0] / n;
    for (double& v : ga->data()) v += up;
  });
}

Var concat_cols(Var a, Var b) {
  require_same_graph("concat_cols", a, b);
  const Tensor& x = a.value();
  const Tensor& y = b.value();
  require_matrix("concat_cols", x);
  require_matrix("concat_cols", y);
  if (x.rows() != y.rows()) mismatch("concat_cols", x, y);
  const std::size_t cx = x.cols(), cy = y.cols();
  Tensor out = Tensor::matrix(x.rows(), cx + cy);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    std::copy(x.row(r).begin(), x.row(r).end(), out.row(r).begin());
    std::copy(y.row(r).begin(), y.row(r).end(), out.row(r).begin() + static_cast<std::ptrdiff_t>(cx));
  }
  return a.graph->record(std::move(out), {a.id, b.id}, [ia = a.id, ib = b.id, cx, cy](Graph& g, std::size_t self) {
    const Tensor& up = g.upstream(self);
    Tensor* ga = g.grad_buffer(ia);
    Tensor* gb = g.grad_buffer(ib);
    for (std::size_t r = 0; r < up.rows(); ++r) {
      auto u = up.row(r);
      if (ga)
        for (std::size_t c = 0; c < cx; ++c) (*ga)(r, c) += u[c];
      if (gb)
        for (std::size_t c = 0; c < cy; ++c) (*gb)(r, c) += u[cx + c];
    }
  });
}

Var slice_cols(Var a, std::size_t begin, std::size_t end) {
  const Tensor& x = a.value();
  require_matrix("slice_cols", x);
  if (begin >= end || end > x.cols()) {
    throw DimensionError("slice_cols: range [" + std::to_string(begin) + ", " + std::to_string(end) +
                         ") invalid for shape " + shape_string(x.shape()));
  }
  const std::size_t w = end - begin;
  Tensor out = Tensor::matrix(x.rows(), w);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto src = x.row(r).subspan(begin, w);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return a.graph->record(std::move(out), {a.id}, [ia = a.id, begin, w](Graph& g, std::size_t self) {
    Tensor* ga = g.grad_buffer(ia);
    if (!ga) return;
    const Tensor& up = g.upstream(self);
    for (std::size_t r = 0; r < up.rows(); ++r)
      for (std::size_t c = 0; c < w; ++c) (*ga)(r, begin + c) += up(r, c);
  });
}

}  // namespace pivotmt
