#include "pivotmt/adam.hpp"

#include <cmath>

#include "pivotmt/error.hpp"

namespace pivotmt {

void Adam::step(std::span<Parameter* const> params) {
  for (const Parameter* p : params) {
    if (p->frozen) continue;
    if (p->grad.shape() != p->value.shape()) {
      throw ContractError("adam_step: gradient of '" + p->name + "' has shape " + shape_string(p->grad.shape()) +
                          ", value " + shape_string(p->value.shape()));
    }
    if (!p->grad.all_finite()) throw TrainingError("adam_step: non-finite gradient in '" + p->name + "'");
  }

  ++t_;
  const double b1 = cfg_.beta1, b2 = cfg_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  for (Parameter* p : params) {
    if (p->frozen) continue;
    auto [it, fresh] = moments_.try_emplace(p);
    Moments& mo = it->second;
    if (fresh) {
      mo.m = Tensor(p->value.shape());
      mo.v = Tensor(p->value.shape());
    }
    auto value = p->value.data();
    auto grad = p->grad.data();
    auto m = mo.m.data();
    auto v = mo.v.data();
    for (std::size_t i = 0; i < value.size(); ++i) {
      const double g = grad[i];
      m[i] = round_to_precision(b1 * m[i] + (1.0 - b1) * g);
      v[i] = round_to_precision(b2 * v[i] + (1.0 - b2) * g * g);
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      value[i] = round_to_precision(value[i] - cfg_.learning_rate * m_hat / (std::sqrt(v_hat) + cfg_.epsilon));
    }
  }
}

const Tensor* Adam::first_moment(const Parameter& p) const {
  auto it = moments_.find(&p);
  return it == moments_.end() ? nullptr : &it->second.m;
}

const Tensor* Adam::second_moment(const Parameter& p) const {
  auto it = moments_.find(&p);
  return it == moments_.end() ? nullptr : &it->second.v;
}

}  // namespace pivotmt
