#include "pivotmt/decoder.hpp"

#include <algorithm>
#include <string>

#include "pivotmt/error.hpp"
#include "pivotmt/ops.hpp"

namespace pivotmt {

Decoder::Decoder(ParameterStore& store, const std::string& prefix, std::size_t vocab_size, const ModelDims& dims,
                 ContextMode mode, Rng& rng)
    : ctx_h_w_(&store.add(prefix + ".ctx_h.w", uniform_tensor(dims.d_emb, dims.d_hid, rng))),
      ctx_h_b_(&store.add(prefix + ".ctx_h.b", uniform_tensor(1, dims.d_hid, rng))),
      ctx_c_w_(&store.add(prefix + ".ctx_c.w", uniform_tensor(dims.d_emb, dims.d_hid, rng))),
      ctx_c_b_(&store.add(prefix + ".ctx_c.b", uniform_tensor(1, dims.d_hid, rng))),
      embed_(&store.add(prefix + ".embed", uniform_tensor(vocab_size, dims.d_word, rng))),
      lstm_(store, prefix + ".lstm", dims.d_word + (mode == ContextMode::per_step ? dims.d_emb : 0), dims.d_hid,
            rng),
      out_w_(&store.add(prefix + ".out.w", uniform_tensor(dims.d_hid, vocab_size, rng))),
      out_b_(&store.add(prefix + ".out.b", uniform_tensor(1, vocab_size, rng))),
      vocab_size_(vocab_size),
      d_emb_(dims.d_emb),
      mode_(mode) {}

std::vector<Parameter*> Decoder::parameters() const {
  std::vector<Parameter*> out{ctx_h_w_, ctx_h_b_, ctx_c_w_, ctx_c_b_, embed_};
  for (Parameter* p : lstm_.parameters()) out.push_back(p);
  out.push_back(out_w_);
  out.push_back(out_b_);
  return out;
}

void Decoder::check_context(const Tensor& context) const {
  if (context.rank() != 2 || context.cols() != d_emb_) {
    throw DimensionError("decoder: context must have width " + std::to_string(d_emb_) + ", got " +
                         shape_string(context.shape()));
  }
}

LstmState Decoder::start(Graph& g, Var context) const {
  Var h = add_row(matmul(context, g.parameter(*ctx_h_w_)), g.parameter(*ctx_h_b_));
  Var c = add_row(matmul(context, g.parameter(*ctx_c_w_)), g.parameter(*ctx_c_b_));
  return {h, c};
}

Var Decoder::input(Var words, Var context) const {
  return mode_ == ContextMode::per_step ? concat_cols(words, context) : words;
}

Var Decoder::logits(Graph& g, Var h) const {
  return add_row(matmul(h, g.parameter(*out_w_)), g.parameter(*out_b_));
}

Var Decoder::nll(Graph& g, Var context, const TokenBatch& targets) const {
  check_context(context.value());
  const std::size_t rows = targets.rows;
  if (rows == 0) throw ContractError("decoder_nll: empty batch");
  if (context.value().rows() != rows) {
    throw DimensionError("decoder_nll: " + std::to_string(context.value().rows()) + " contexts for " +
                         std::to_string(rows) + " targets");
  }
  std::size_t steps = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    if (targets.lengths[r] == 0) throw ContractError("decoder_nll: empty target sentence");
    steps = std::max(steps, targets.lengths[r] + 1);
  }
  for (TokenId id : targets.ids) {
    if (id >= vocab_size_) throw ContractError("decoder_nll: token id " + std::to_string(id) + " out of range");
  }

  Var table = g.parameter(*embed_);
  LstmState state = start(g, context);
  std::vector<TokenId> in(rows), out(rows);
  std::vector<double> weight(rows);
  Var total{};
  bool have_total = false;
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t r = 0; r < rows; ++r) {
      const std::size_t len = targets.lengths[r];
      in[r] = t == 0 ? Vocabulary::kBos : (t <= len ? targets.at(r, t - 1) : Vocabulary::kNull);
      if (t < len) {
        out[r] = targets.at(r, t);
      } else if (t == len) {
        out[r] = Vocabulary::kEos;
      } else {
        out[r] = Vocabulary::kNull;
      }
      weight[r] = t <= len ? 1.0 / (static_cast<double>(len + 1) * static_cast<double>(rows)) : 0.0;
    }
    state = lstm_.step(g, input(gather_rows(table, in), context), state);
    Var term = softmax_cross_entropy(logits(g, state.h), out, weight);
    total = have_total ? total + term : term;
    have_total = true;
  }
  return total;
}

DecodeState Decoder::initial_state(const Tensor& context) const {
  check_context(context);
  if (context.rows() != 1) throw DimensionError("decoder: decoding takes one context row");
  Graph g;
  LstmState s = start(g, g.constant(context));
  return {s.h.value(), s.c.value(), context};
}

StepFn Decoder::step_fn() const {
  return [this](TokenId previous, const DecodeState& state) {
    Graph g;
    const std::vector<TokenId> prev{previous};
    LstmState s{g.constant(state[0]), g.constant(state[1])};
    Var ctx = g.constant(state[2]);
    s = lstm_.step(g, input(gather_rows(g.parameter(*embed_), prev), ctx), s);
    const Tensor& z = logits(g, s.h).value();
    return StepResult{log_softmax(z.data()), {s.h.value(), s.c.value(), state[2]}};
  };
}

std::vector<TokenId> Decoder::greedy_decode(const Tensor& context, std::size_t max_len) const {
  return greedy_search(step_fn(), initial_state(context), max_len);
}

std::vector<TokenId> Decoder::beam_decode(const Tensor& context, std::size_t beam_width, std::size_t max_len) const {
  return beam_search(step_fn(), initial_state(context), beam_width, max_len);
}

}  // namespace pivotmt
