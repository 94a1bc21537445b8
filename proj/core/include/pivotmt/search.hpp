#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "pivotmt/tensor.hpp"
#include "pivotmt/vocabulary.hpp"

namespace pivotmt {

// Opaque recurrent state carried between decoding steps.
using DecodeState = std::vector<Tensor>;

struct StepResult {
  std::vector<double> log_probs;  // one entry per target-vocabulary id
  DecodeState state;
};

// Scores the next token given the previously emitted one (BOS at step 0).
using StepFn = std::function<StepResult(TokenId previous, const DecodeState& state)>;

// Argmax decoding from BOS. NULL and BOS are never emitted; ties go to the
// lowest id. Stops at EOS (not included) or after max_len tokens.
std::vector<TokenId> greedy_search(const StepFn& step, DecodeState initial, std::size_t max_len);

// Beam search ranking finished hypotheses by total log-probability divided
// by length (EOS counted). beam_width == 1 reproduces greedy_search.
std::vector<TokenId> beam_search(const StepFn& step, DecodeState initial, std::size_t beam_width,
                                 std::size_t max_len);

// Log-softmax of one row of logits.
std::vector<double> log_softmax(std::span<const double> logits);

}  // namespace pivotmt
