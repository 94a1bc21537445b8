#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "pivotmt/batching.hpp"
#include "pivotmt/encoders.hpp"
#include "pivotmt/graph.hpp"
#include "pivotmt/search.hpp"

namespace pivotmt {

// How the multimodal vector conditions the decoder.
//   init_state: linear projections of the context give the initial h and c.
//   per_step:   additionally concatenated to the word embedding at every step.
enum class ContextMode { init_state, per_step };

// Target-language LSTM decoder over a d_emb context vector.
class Decoder {
 public:
  Decoder(ParameterStore& store, const std::string& prefix, std::size_t vocab_size, const ModelDims& dims,
          ContextMode mode, Rng& rng);

  // Teacher-forced cross entropy. Each sentence contributes the mean
  // negative log-likelihood over its tokens plus EOS; the batch value is the
  // mean over sentences. `context` is rows x d_emb.
  Var nll(Graph& g, Var context, const TokenBatch& targets) const;

  // Recurrent state for one context row (h, c, context) and the matching
  // single-step scorer. The scorer holds a pointer to this decoder.
  DecodeState initial_state(const Tensor& context) const;
  StepFn step_fn() const;

  std::vector<TokenId> greedy_decode(const Tensor& context, std::size_t max_len) const;
  std::vector<TokenId> beam_decode(const Tensor& context, std::size_t beam_width, std::size_t max_len) const;

  std::size_t vocab_size() const noexcept { return vocab_size_; }
  ContextMode mode() const noexcept { return mode_; }
  std::vector<Parameter*> parameters() const;

 private:
  LstmState start(Graph& g, Var context) const;
  Var input(Var words, Var context) const;
  Var logits(Graph& g, Var h) const;
  void check_context(const Tensor& context) const;

  Parameter* ctx_h_w_;
  Parameter* ctx_h_b_;
  Parameter* ctx_c_w_;
  Parameter* ctx_c_b_;
  Parameter* embed_;
  Lstm lstm_;
  Parameter* out_w_;
  Parameter* out_b_;
  std::size_t vocab_size_;
  std::size_t d_emb_;
  ContextMode mode_;
};

}  // namespace pivotmt
