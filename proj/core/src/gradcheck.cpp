#include "pivotmt/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "pivotmt/error.hpp"

namespace pivotmt {

GradCheckResult finite_difference_check(const LossBuilder& loss_fn, std::span<Parameter* const> params,
                                        double step, DifferenceScheme scheme) {
  if (precision() != Precision::f64) {
    throw ContractError("finite_difference_check: requires 64-bit precision mode");
  }
  std::vector<Tensor> analytic;
  {
    Graph g;
    Var loss = loss_fn(g);
    for (Parameter* p : params) g.parameter(*p);
    g.backward(loss);
    for (Parameter* p : params) analytic.push_back(p->grad);
  }

  auto evaluate = [&] {
    Graph g;
    return loss_fn(g).item();
  };

  GradCheckResult result;
  for (std::size_t k = 0; k < params.size(); ++k) {
    Parameter& p = *params[k];
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double saved = p.value[i];
      auto central = [&](double h) {
        p.value[i] = saved + h;
        const double up = evaluate();
        p.value[i] = saved - h;
        const double down = evaluate();
        p.value[i] = saved;
        return (up - down) / (2.0 * h);
      };
      const double numeric = scheme == DifferenceScheme::central
                                 ? central(step)
                                 : (4.0 * central(step / 2.0) - central(step)) / 3.0;
      const double a = analytic[k][i];
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
      const double err = std::abs(a - numeric) / denom;
      ++result.entries_checked;
      if (err > result.max_relative_error) {
        result.max_relative_error = err;
        result.worst_parameter = p.name;
        result.worst_index = i;
      }
    }
  }
  return result;
}

}  // namespace pivotmt
