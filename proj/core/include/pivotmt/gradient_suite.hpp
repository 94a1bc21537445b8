#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "pivotmt/gradcheck.hpp"

namespace pivotmt {

struct GradientCase {
  std::string name;
  GradCheckResult result;
};

struct GradientSuiteReport {
  std::vector<GradientCase> cases;
  double seconds = 0.0;

  double max_relative_error() const;
  bool passed(double tolerance) const { return max_relative_error() < tolerance; }
};

// Names of the checked ops and losses, in run order.
std::vector<std::string> gradient_case_names();

// Finite-difference checks of every graph op and every model loss on random
// micro-configurations (joint space <= 8, batch <= 4). Each case runs
// `rounds` times with fresh dimensions and values. Runs in 64-bit mode.
GradientSuiteReport run_gradient_suite(std::uint64_t seed, std::size_t rounds = 1);

}  // namespace pivotmt
