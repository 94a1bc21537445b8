#pragma once

#include <cstddef>
#include <span>
#include <unordered_map>

#include "pivotmt/graph.hpp"

namespace pivotmt {

struct AdamConfig {
  double learning_rate = 2e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adam with bias correction. Moments are kept per parameter and created on
// first use; frozen parameters are skipped entirely.
class Adam {
 public:
  explicit Adam(AdamConfig cfg = {}) : cfg_(cfg) {}

  // Applies one update to every non-frozen parameter from its `grad`, then
  // increments the step counter. Throws TrainingError naming the first
  // tensor with a non-finite gradient; no parameter is modified in that case.
  void step(std::span<Parameter* const> params);

  std::size_t steps() const noexcept { return t_; }
  const Tensor* first_moment(const Parameter& p) const;
  const Tensor* second_moment(const Parameter& p) const;
  const AdamConfig& config() const noexcept { return cfg_; }

 private:
  struct Moments {
    Tensor m;
    Tensor v;
  };

  AdamConfig cfg_;
  std::size_t t_ = 0;
  std::unordered_map<const Parameter*, Moments> moments_;
};

}  // namespace pivotmt
