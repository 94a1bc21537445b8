#include "pivotmt/gradient_suite.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <memory>

#include "pivotmt/multimodal.hpp"
#include "pivotmt/ops.hpp"
#include "pivotmt/random.hpp"
#include "pivotmt/trainer.hpp"

namespace pivotmt {
namespace {

// With plain central differences at 1e-5, rounding of O(1) losses leaves
// ~1e-11 absolute noise, which swamps gradients near 1e-8. The extrapolated
// difference tolerates a larger step.
constexpr double kSuiteStep = 1e-3;

Tensor random_tensor(std::size_t rows, std::size_t cols, Rng& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Tensor t = Tensor::matrix(rows, cols);
  for (double& v : t.data()) v = u(rng);
  return t;
}

// Values bounded away from zero, for the hinge kink.
Tensor away_from_zero(std::size_t rows, std::size_t cols, Rng& rng) {
  std::uniform_real_distribution<double> u(0.1, 1.0);
  std::bernoulli_distribution sign(0.5);
  Tensor t = Tensor::matrix(rows, cols);
  for (double& v : t.data()) v = sign(rng) ? u(rng) : -u(rng);
  return t;
}

std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) { return lo + uniform_index(rng, hi - lo + 1); }

// One instantiated check: parameters plus a loss over them.
struct Instance {
  std::unique_ptr<ParameterStore> store = std::make_unique<ParameterStore>();
  std::unique_ptr<Model> model;
  std::vector<Parameter*> params;
  LossBuilder loss;
};

using CaseFactory = std::function<Instance(Rng&)>;

// Projects a matrix onto a scalar with fixed random weights so every entry
// gets a distinct gradient.
Var readout(Graph& g, Var x, const Tensor& w) { return sum(mul(x, g.constant(w))); }

Instance unary(Rng& rng, Var (*op)(Var), bool avoid_zero = false) {
  Instance in;
  const std::size_t r = pick(rng, 1, 4), c = pick(rng, 1, 5);
  Parameter& x = in.store->add("x", avoid_zero ? away_from_zero(r, c, rng) : random_tensor(r, c, rng, -2, 2));
  const Tensor w = random_tensor(r, c, rng);
  in.params = {&x};
  in.loss = [&x, w, op](Graph& g) { return readout(g, op(g.parameter(x)), w); };
  return in;
}

Instance binary(Rng& rng, Var (*op)(Var, Var)) {
  Instance in;
  const std::size_t r = pick(rng, 1, 4), c = pick(rng, 1, 5);
  Parameter& a = in.store->add("a", random_tensor(r, c, rng));
  Parameter& b = in.store->add("b", random_tensor(r, c, rng));
  const Tensor w = random_tensor(r, c, rng);
  in.params = {&a, &b};
  in.loss = [&a, &b, w, op](Graph& g) { return readout(g, op(g.parameter(a), g.parameter(b)), w); };
  return in;
}

struct MicroData {
  Batch src;
  Batch tgt;
};

Batch random_batch(Rng& rng, std::size_t rows, std::size_t vocab, std::size_t d_img) {
  std::vector<std::vector<TokenId>> seqs;
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<TokenId> s(pick(rng, 1, 4));
    for (auto& t : s) t = pick(rng, Vocabulary::kSpecialCount, vocab - 1);
    seqs.push_back(std::move(s));
  }
  Batch b;
  b.tokens = pad_sequences(seqs);
  b.features = random_tensor(rows, d_img, rng);
  for (std::size_t r = 0; r < rows; ++r) b.doc_indices.push_back(r);
  return b;
}

// Small model with weights spread wider than the training init so that
// gradients are well above finite-difference noise.
Instance micro_model(Rng& rng, ModelKind kind, ContextMode ctx = ContextMode::init_state) {
  Instance in;
  ModelSpec spec;
  spec.kind = kind;
  spec.dims = ModelDims{pick(rng, 2, 4), pick(rng, 2, 4), pick(rng, 2, 8), pick(rng, 2, 5), pick(rng, 2, 4)};
  spec.context = ctx;
  spec.source_vocab = pick(rng, 6, 9);
  spec.target_vocab = pick(rng, 6, 9);
  in.model = std::make_unique<Model>(spec, rng());
  for (Parameter& p : in.model->store()) p.value = random_tensor(p.value.rows(), p.value.cols(), rng, -1.0, 1.0);
  in.params = in.model->parameters();
  return in;
}

MicroData micro_data(Rng& rng, const Model& m) {
  const std::size_t rows = pick(rng, 2, 4);
  const auto& s = m.spec();
  return {random_batch(rng, rows, s.source_vocab, s.dims.d_img), random_batch(rng, rows, s.target_vocab, s.dims.d_img)};
}

struct NamedCase {
  const char* name;
  CaseFactory make;
};

const std::vector<NamedCase>& cases() {
  static const std::vector<NamedCase> list = {
      {"matmul",
       [](Rng& rng) {
         Instance in;
         const std::size_t n = pick(rng, 1, 4), k = pick(rng, 1, 4), m = pick(rng, 1, 4);
         Parameter& a = in.store->add("a", random_tensor(n, k, rng));
         Parameter& b = in.store->add("b", random_tensor(k, m, rng));
         const Tensor w = random_tensor(n, m, rng);
         in.params = {&a, &b};
         in.loss = [&a, &b, w](Graph& g) { return readout(g, matmul(g.parameter(a), g.parameter(b)), w); };
         return in;
       }},
      {"transpose",
       [](Rng& rng) {
         Instance in;
         const std::size_t r = pick(rng, 1, 4), c = pick(rng, 1, 4);
         Parameter& x = in.store->add("x", random_tensor(r, c, rng));
         const Tensor w = random_tensor(c, r, rng);
         in.params = {&x};
         in.loss = [&x, w](Graph& g) { return readout(g, transpose(g.parameter(x)), w); };
         return in;
       }},
      {"add", [](Rng& rng) { return binary(rng, &add); }},
      {"sub", [](Rng& rng) { return binary(rng, &sub); }},
      {"mul", [](Rng& rng) { return binary(rng, &mul); }},
      {"scale+add_scalar",
       [](Rng& rng) {
         Instance in;
         Parameter& x = in.store->add("x", random_tensor(pick(rng, 1, 3), pick(rng, 1, 3), rng));
         const Tensor w = random_tensor(x.value.rows(), x.value.cols(), rng);
         in.params = {&x};
         in.loss = [&x, w](Graph& g) { return readout(g, tanh(add_scalar(scale(g.parameter(x), -1.7), 0.3)), w); };
         return in;
       }},
      {"add_row",
       [](Rng& rng) {
         Instance in;
         const std::size_t r = pick(rng, 1, 4), c = pick(rng, 1, 4);
         Parameter& x = in.store->add("x", random_tensor(r, c, rng));
         Parameter& b = in.store->add("b", random_tensor(1, c, rng));
         const Tensor w = random_tensor(r, c, rng);
         in.params = {&x, &b};
         in.loss = [&x, &b, w](Graph& g) { return readout(g, add_row(g.parameter(x), g.parameter(b)), w); };
         return in;
       }},
      {"tanh", [](Rng& rng) { return unary(rng, &tanh); }},
      {"sigmoid", [](Rng& rng) { return unary(rng, &sigmoid); }},
      {"hinge", [](Rng& rng) { return unary(rng, &hinge, true); }},
      {"row_dot", [](Rng& rng) {
         Instance in;
         const std::size_t r = pick(rng, 1, 4), c = pick(rng, 1, 5);
         Parameter& a = in.store->add("a", random_tensor(r, c, rng));
         Parameter& b = in.store->add("b", random_tensor(r, c, rng));
         const Tensor w = random_tensor(r, 1, rng);
         in.params = {&a, &b};
         in.loss = [&a, &b, w](Graph& g) { return readout(g, row_dot(g.parameter(a), g.parameter(b)), w); };
         return in;
       }},
      {"l2_normalize_rows", [](Rng& rng) { return unary(rng, &l2_normalize_rows, true); }},
      {"gather_rows",
       [](Rng& rng) {
         Instance in;
         const std::size_t v = pick(rng, 2, 6), d = pick(rng, 1, 4), n = pick(rng, 1, 6);
         Parameter& t = in.store->add("table", random_tensor(v, d, rng));
         std::vector<std::size_t> ids(n);
         for (auto& i : ids) i = uniform_index(rng, v);
         const Tensor w = random_tensor(n, d, rng);
         in.params = {&t};
         in.loss = [&t, ids, w](Graph& g) { return readout(g, gather_rows(g.parameter(t), ids), w); };
         return in;
       }},
      {"softmax_cross_entropy",
       [](Rng& rng) {
         Instance in;
         const std::size_t r = pick(rng, 1, 4), v = pick(rng, 2, 7);
         Parameter& z = in.store->add("logits", random_tensor(r, v, rng, -2, 2));
         std::vector<std::size_t> targets(r);
         std::vector<double> weights(r);
         std::uniform_real_distribution<double> u(0.0, 1.0);
         for (std::size_t i = 0; i < r; ++i) {
           targets[i] = uniform_index(rng, v);
           weights[i] = u(rng);
         }
         in.params = {&z};
         in.loss = [&z, targets, weights](Graph& g) { return softmax_cross_entropy(g.parameter(z), targets, weights); };
         return in;
       }},
      {"sum+mean",
       [](Rng& rng) {
         Instance in;
         Parameter& x = in.store->add("x", random_tensor(pick(rng, 1, 4), pick(rng, 1, 4), rng));
         in.params = {&x};
         in.loss = [&x](Graph& g) {
           Var v = g.parameter(x);
           return sum(mul(v, v)) + scale(mean(tanh(v)), 3.0);
         };
         return in;
       }},
      {"concat_cols+slice_cols",
       [](Rng& rng) {
         Instance in;
         const std::size_t r = pick(rng, 1, 4), ca = pick(rng, 1, 3), cb = pick(rng, 1, 3);
         Parameter& a = in.store->add("a", random_tensor(r, ca, rng));
         Parameter& b = in.store->add("b", random_tensor(r, cb, rng));
         const std::size_t lo = uniform_index(rng, ca + cb);
         const std::size_t hi = lo + 1 + uniform_index(rng, ca + cb - lo);
         const Tensor w = random_tensor(r, hi - lo, rng);
         in.params = {&a, &b};
         in.loss = [&a, &b, lo, hi, w](Graph& g) {
           return readout(g, slice_cols(concat_cols(g.parameter(a), g.parameter(b)), lo, hi), w);
         };
         return in;
       }},
      {"lstm_step_masked",
       [](Rng& rng) {
         Instance in;
         const std::size_t rows = pick(rng, 2, 4), din = pick(rng, 1, 4), h = pick(rng, 1, 4);
         auto lstm = std::make_shared<Lstm>(*in.store, "lstm", din, h, rng);
         for (Parameter& p : *in.store) p.value = random_tensor(p.value.rows(), p.value.cols(), rng, -0.5, 0.5);
         Parameter& x = in.store->add("x", random_tensor(rows, din, rng));
         Parameter& h0 = in.store->add("h0", random_tensor(rows, h, rng));
         Parameter& c0 = in.store->add("c0", random_tensor(rows, h, rng));
         auto active = std::make_shared<std::vector<char>>(rows);
         for (std::size_t r = 0; r < rows; ++r) (*active)[r] = r != 0;
         const Tensor wh = random_tensor(rows, h, rng), wc = random_tensor(rows, h, rng);
         for (Parameter& p : *in.store) in.params.push_back(&p);
         in.loss = [lstm, &x, &h0, &c0, active, wh, wc](Graph& g) {
           std::unique_ptr<bool[]> mask(new bool[active->size()]);
           for (std::size_t r = 0; r < active->size(); ++r) mask[r] = (*active)[r] != 0;
           LstmState s = lstm->step(g, g.parameter(x), {g.parameter(h0), g.parameter(c0)},
                                    std::span<const bool>(mask.get(), active->size()));
           return readout(g, s.h, wh) + readout(g, s.c, wc);
         };
         return in;
       }},
      {"text_encoder",
       [](Rng& rng) {
         Instance in = micro_model(rng, ModelKind::supervised);
         const auto d = micro_data(rng, *in.model);
         const Tensor w = random_tensor(d.src.size(), in.model->spec().dims.d_emb, rng);
         in.params = in.model->source().parameters();
         const Model* m = in.model.get();
         in.loss = [m, d, w](Graph& g) { return readout(g, m->source().encode(g, d.src.tokens), w); };
         return in;
       }},
      {"image_encoder",
       [](Rng& rng) {
         Instance in = micro_model(rng, ModelKind::two_way);
         const auto d = micro_data(rng, *in.model);
         const Tensor w = random_tensor(d.src.size(), in.model->spec().dims.d_emb, rng);
         in.params = in.model->image().parameters();
         const Model* m = in.model.get();
         in.loss = [m, d, w](Graph& g) { return readout(g, m->image().encode(g, *d.src.features), w); };
         return in;
       }},
      {"rank_loss",
       [](Rng& rng) {
         Instance in;
         const std::size_t n = pick(rng, 2, 4), d = pick(rng, 2, 8);
         Parameter& a = in.store->add("anchors", random_tensor(n, d, rng));
         Parameter& p = in.store->add("positives", random_tensor(n, d, rng));
         in.params = {&a, &p};
         RankLossConfig cfg;
         cfg.alpha = 0.5;
         in.loss = [&a, &p, cfg](Graph& g) {
           return rank_loss(g, l2_normalize_rows(g.parameter(a)), l2_normalize_rows(g.parameter(p)), cfg);
         };
         return in;
       }},
      {"rank_loss_symmetric_sum",
       [](Rng& rng) {
         Instance in;
         const std::size_t n = pick(rng, 2, 4), d = pick(rng, 2, 8);
         Parameter& a = in.store->add("anchors", random_tensor(n, d, rng));
         Parameter& p = in.store->add("positives", random_tensor(n, d, rng));
         in.params = {&a, &p};
         RankLossConfig cfg;
         cfg.alpha = 0.5;
         cfg.symmetric = true;
         cfg.reduction = Reduction::sum;
         in.loss = [&a, &p, cfg](Graph& g) {
           return rank_loss(g, l2_normalize_rows(g.parameter(a)), l2_normalize_rows(g.parameter(p)), cfg);
         };
         return in;
       }},
      {"encoder_loss_two_way",
       [](Rng& rng) {
         Instance in = micro_model(rng, ModelKind::two_way);
         const auto d = micro_data(rng, *in.model);
         const Model* m = in.model.get();
         in.params = in.model->encoder_parameters();
         RankLossConfig cfg;
         cfg.alpha = 0.5;
         in.loss = [m, d, cfg](Graph& g) { return compute_encoder_loss(g, *m, d.src, nullptr, cfg); };
         return in;
       }},
      {"decoder_nll_image",
       [](Rng& rng) {
         Instance in = micro_model(rng, ModelKind::two_way);
         const auto d = micro_data(rng, *in.model);
         const Model* m = in.model.get();
         in.loss = [m, d](Graph& g) { return compute_decoder_loss(g, *m, d.tgt, DecoderInputs::image); };
         return in;
       }},
      {"decoder_nll_per_step_context",
       [](Rng& rng) {
         Instance in = micro_model(rng, ModelKind::supervised, ContextMode::per_step);
         const auto d = micro_data(rng, *in.model);
         const Model* m = in.model.get();
         in.loss = [m, d](Graph& g) {
           return m->decoder().nll(g, m->source().encode(g, d.src.tokens), d.tgt.tokens);
         };
         return in;
       }},
      {"encoder_loss_three_way",
       [](Rng& rng) {
         Instance in = micro_model(rng, ModelKind::three_way);
         const auto d = micro_data(rng, *in.model);
         const Model* m = in.model.get();
         in.params = in.model->encoder_parameters();
         RankLossConfig cfg;
         cfg.alpha = 0.5;
         in.loss = [m, d, cfg](Graph& g) { return compute_encoder_loss(g, *m, d.src, &d.tgt, cfg); };
         return in;
       }},
      {"decoder_nll_description",
       [](Rng& rng) {
         Instance in = micro_model(rng, ModelKind::three_way);
         const auto d = micro_data(rng, *in.model);
         const Model* m = in.model.get();
         in.loss = [m, d](Graph& g) { return compute_decoder_loss(g, *m, d.tgt, DecoderInputs::description); };
         return in;
       }},
      {"combined_loss",
       [](Rng& rng) {
         Instance in = micro_model(rng, ModelKind::three_way);
         const auto d = micro_data(rng, *in.model);
         const Model* m = in.model.get();
         RankLossConfig cfg;
         cfg.alpha = 0.5;
         const double lambda = 0.5 + 2.0 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
         in.loss = [m, d, cfg, lambda](Graph& g) {
           Var jd = compute_decoder_loss(g, *m, d.tgt, DecoderInputs::image_description);
           Var je = compute_encoder_loss(g, *m, d.src, &d.tgt, cfg);
           return jd + scale(je, lambda);
         };
         return in;
       }},
  };
  return list;
}

}  // namespace

double GradientSuiteReport::max_relative_error() const {
  double m = 0.0;
  for (const auto& c : cases) m = std::max(m, c.result.max_relative_error);
  return m;
}

std::vector<std::string> gradient_case_names() {
  std::vector<std::string> out;
  for (const auto& c : cases()) out.emplace_back(c.name);
  return out;
}

GradientSuiteReport run_gradient_suite(std::uint64_t seed, std::size_t rounds) {
  PrecisionScope scope(Precision::f64);
  const auto t0 = std::chrono::steady_clock::now();
  GradientSuiteReport report;
  for (std::size_t round = 0; round < rounds; ++round) {
    for (std::size_t k = 0; k < cases().size(); ++k) {
      Rng rng(mix_seed(seed, round, k));
      Instance in = cases()[k].make(rng);
      report.cases.push_back({cases()[k].name, finite_difference_check(in.loss, in.params, kSuiteStep, DifferenceScheme::richardson)});
    }
  }
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace pivotmt
