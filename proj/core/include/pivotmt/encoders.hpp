#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pivotmt/batching.hpp"
#include "pivotmt/graph.hpp"
#include "pivotmt/random.hpp"
#include "pivotmt/vocabulary.hpp"

namespace pivotmt {

struct ModelDims {
  std::size_t d_word = 16;
  std::size_t d_hid = 32;
  std::size_t d_emb = 32;
  std::size_t d_img = 16;
  std::size_t d_img_hid = 32;

  // Small enough for minutes of CPU training on the synthetic world.
  static ModelDims desk(std::size_t d_img);
  // 512-d word embeddings, 1024-d LSTM state, 1024-d joint space, two
  // 1024-unit FC layers over 4096-d CNN features.
  static ModelDims full(std::size_t d_img = 4096);

  bool operator==(const ModelDims&) const = default;
};

// Uniform initialization range for every weight.
inline constexpr double kInitRange = 0.08;
inline constexpr double kForgetBiasInit = 1.0;

Tensor uniform_tensor(std::size_t rows, std::size_t cols, Rng& rng);

struct LstmState {
  Var h;
  Var c;
};

// Standard LSTM cell, gate blocks ordered (input, forget, cell, output).
class Lstm {
 public:
  Lstm(ParameterStore& store, const std::string& prefix, std::size_t input_dim, std::size_t hidden_dim, Rng& rng);

  LstmState zero_state(Graph& g, std::size_t rows) const;
  // Rows with active[r] == false carry their previous state through
  // unchanged; an empty span means every row is active.
  LstmState step(Graph& g, Var x, const LstmState& prev, std::span<const bool> active = {}) const;

  std::size_t hidden_dim() const noexcept { return hidden_; }
  std::size_t input_dim() const noexcept { return input_; }
  std::vector<Parameter*> parameters() const;

 private:
  Parameter* w_x_;
  Parameter* w_h_;
  Parameter* bias_;
  std::size_t input_;
  std::size_t hidden_;
};

// Text encoder: embedding lookup, LSTM over the true tokens, affine
// projection of the last hidden state into the joint space, l2 normalization.
class SeqEncoder {
 public:
  SeqEncoder(ParameterStore& store, const std::string& prefix, std::size_t vocab_size, const ModelDims& dims,
             Rng& rng);

  // rows x d_emb, unit rows. NULL positions are masked out of the recurrence.
  Var encode(Graph& g, const TokenBatch& batch) const;
  Tensor encode(std::span<const TokenId> tokens) const;

  std::size_t vocab_size() const noexcept { return vocab_size_; }
  std::vector<Parameter*> parameters() const;

 private:
  Parameter* embed_;
  Lstm lstm_;
  Parameter* proj_w_;
  Parameter* proj_b_;
  std::size_t vocab_size_;
};

// Image encoder: d_img -> d_img_hid (tanh) -> d_emb, then l2 normalization.
class ImageEncoder {
 public:
  ImageEncoder(ParameterStore& store, const std::string& prefix, const ModelDims& dims, Rng& rng);

  Var encode(Graph& g, const Tensor& features) const;
  Tensor encode(std::span<const float> feature) const;

  std::size_t input_dim() const noexcept { return input_dim_; }
  std::vector<Parameter*> parameters() const;

 private:
  Parameter* fc1_w_;
  Parameter* fc1_b_;
  Parameter* fc2_w_;
  Parameter* fc2_b_;
  std::size_t input_dim_;
};

}  // namespace pivotmt
