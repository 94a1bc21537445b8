#include "pivotmt/encoders.hpp"

#include <algorithm>
#include <memory>

#include "pivotmt/error.hpp"
#include "pivotmt/ops.hpp"

namespace pivotmt {
namespace {

// Constant rows x width matrix holding 1 for active rows and 0 otherwise.
Tensor row_mask(std::span<const bool> active, std::size_t width, bool invert) {
  Tensor m = Tensor::matrix(active.size(), width);
  for (std::size_t r = 0; r < active.size(); ++r) {
    const double v = (active[r] != invert) ? 1.0 : 0.0;
    for (double& x : m.row(r)) x = v;
  }
  return m;
}

}  // namespace

ModelDims ModelDims::desk(std::size_t d_img) { return ModelDims{16, 32, 32, d_img, 32}; }

ModelDims ModelDims::full(std::size_t d_img) { return ModelDims{512, 1024, 1024, d_img, 1024}; }

Tensor uniform_tensor(std::size_t rows, std::size_t cols, Rng& rng) {
  std::uniform_real_distribution<double> u(-kInitRange, kInitRange);
  Tensor t = Tensor::matrix(rows, cols);
  for (double& v : t.data()) v = u(rng);
  t.round_to_precision();
  return t;
}

Lstm::Lstm(ParameterStore& store, const std::string& prefix, std::size_t input_dim, std::size_t hidden_dim, Rng& rng)
    : input_(input_dim), hidden_(hidden_dim) {
  w_x_ = &store.add(prefix + ".w_x", uniform_tensor(input_dim, 4 * hidden_dim, rng));
  w_h_ = &store.add(prefix + ".w_h", uniform_tensor(hidden_dim, 4 * hidden_dim, rng));
  Tensor b = uniform_tensor(1, 4 * hidden_dim, rng);
  for (std::size_t j = hidden_dim; j < 2 * hidden_dim; ++j) b[j] = kForgetBiasInit;
  bias_ = &store.add(prefix + ".b", std::move(b));
}

std::vector<Parameter*> Lstm::parameters() const { return {w_x_, w_h_, bias_}; }

LstmState Lstm::zero_state(Graph& g, std::size_t rows) const {
  return {g.constant(Tensor::matrix(rows, hidden_)), g.constant(Tensor::matrix(rows, hidden_))};
}

LstmState Lstm::step(Graph& g, Var x, const LstmState& prev, std::span<const bool> active) const {
  const std::size_t H = hidden_;
  Var gates = add_row(matmul(x, g.parameter(*w_x_)) + matmul(prev.h, g.parameter(*w_h_)), g.parameter(*bias_));
  Var i = sigmoid(slice_cols(gates, 0, H));
  Var f = sigmoid(slice_cols(gates, H, 2 * H));
  Var u = tanh(slice_cols(gates, 2 * H, 3 * H));
  Var o = sigmoid(slice_cols(gates, 3 * H, 4 * H));
  Var c = f * prev.c + i * u;
  Var h = o * tanh(c);

  const bool masked = !active.empty() && std::find(active.begin(), active.end(), false) != active.end();
  if (!masked) return {h, c};
  Var keep = g.constant(row_mask(active, H, false));
  Var hold = g.constant(row_mask(active, H, true));
  return {h * keep + prev.h * hold, c * keep + prev.c * hold};
}

SeqEncoder::SeqEncoder(ParameterStore& store, const std::string& prefix, std::size_t vocab_size,
                       const ModelDims& dims, Rng& rng)
    : embed_(&store.add(prefix + ".embed", uniform_tensor(vocab_size, dims.d_word, rng))),
      lstm_(store, prefix + ".lstm", dims.d_word, dims.d_hid, rng),
      proj_w_(&store.add(prefix + ".proj.w", uniform_tensor(dims.d_hid, dims.d_emb, rng))),
      proj_b_(&store.add(prefix + ".proj.b", uniform_tensor(1, dims.d_emb, rng))),
      vocab_size_(vocab_size) {}

Var SeqEncoder::encode(Graph& g, const TokenBatch& batch) const {
  if (batch.rows == 0) throw ContractError("encode_text: empty batch");
  for (std::size_t r = 0; r < batch.rows; ++r) {
    if (batch.lengths[r] == 0) throw ContractError("encode_text: empty sequence");
  }
  for (TokenId id : batch.ids) {
    if (id >= vocab_size_) {
      throw ContractError("encode_text: token id " + std::to_string(id) + " >= vocabulary size " +
                          std::to_string(vocab_size_));
    }
  }
  Var table = g.parameter(*embed_);
  LstmState state = lstm_.zero_state(g, batch.rows);
  auto active = std::make_unique<bool[]>(batch.rows);
  for (std::size_t t = 0; t < batch.max_len; ++t) {
    const auto col = batch.column(t);
    for (std::size_t r = 0; r < batch.rows; ++r) active[r] = col[r] != Vocabulary::kNull;
    Var x = gather_rows(table, col);
    state = lstm_.step(g, x, state, std::span<const bool>(active.get(), batch.rows));
  }
  Var e = add_row(matmul(state.h, g.parameter(*proj_w_)), g.parameter(*proj_b_));
  return l2_normalize_rows(e);
}

Tensor SeqEncoder::encode(std::span<const TokenId> tokens) const {
  Graph g;
  return encode(g, pad_sequences({std::vector<TokenId>(tokens.begin(), tokens.end())})).value();
}

std::vector<Parameter*> SeqEncoder::parameters() const {
  std::vector<Parameter*> out{embed_};
  for (Parameter* p : lstm_.parameters()) out.push_back(p);
  out.push_back(proj_w_);
  out.push_back(proj_b_);
  return out;
}

ImageEncoder::ImageEncoder(ParameterStore& store, const std::string& prefix, const ModelDims& dims, Rng& rng)
    : fc1_w_(&store.add(prefix + ".fc1.w", uniform_tensor(dims.d_img, dims.d_img_hid, rng))),
      fc1_b_(&store.add(prefix + ".fc1.b", uniform_tensor(1, dims.d_img_hid, rng))),
      fc2_w_(&store.add(prefix + ".fc2.w", uniform_tensor(dims.d_img_hid, dims.d_emb, rng))),
      fc2_b_(&store.add(prefix + ".fc2.b", uniform_tensor(1, dims.d_emb, rng))),
      input_dim_(dims.d_img) {}

Var ImageEncoder::encode(Graph& g, const Tensor& features) const {
  if (features.rank() != 2 || features.cols() != input_dim_) {
    throw DimensionError("encode_image: expected features of width " + std::to_string(input_dim_) + ", got " +
                         shape_string(features.shape()));
  }
  if (!features.all_finite()) throw ContractError("encode_image: non-finite feature value");
  Var x = g.constant(features);
  Var h = tanh(add_row(matmul(x, g.parameter(*fc1_w_)), g.parameter(*fc1_b_)));
  Var e = add_row(matmul(h, g.parameter(*fc2_w_)), g.parameter(*fc2_b_));
  return l2_normalize_rows(e);
}

Tensor ImageEncoder::encode(std::span<const float> feature) const {
  Tensor f = Tensor::matrix(1, feature.size());
  std::copy(feature.begin(), feature.end(), f.data().begin());
  Graph g;
  return encode(g, f).value();
}

std::vector<Parameter*> ImageEncoder::parameters() const { return {fc1_w_, fc1_b_, fc2_w_, fc2_b_}; }

}  // namespace pivotmt
