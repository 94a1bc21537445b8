#include <benchmark/benchmark.h>

#include "pivotmt/adam.hpp"
#include "pivotmt/batching.hpp"
#include "pivotmt/config.hpp"
#include "pivotmt/metrics.hpp"
#include "pivotmt/ops.hpp"
#include "pivotmt/synth.hpp"
#include "pivotmt/trainer.hpp"

using namespace pivotmt;

namespace {

Tensor filled(std::size_t r, std::size_t c, Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Tensor t = Tensor::matrix(r, c);
  for (double& v : t.data()) v = u(rng);
  return t;
}

const CorpusBundle& world() {
  static const CorpusBundle c = synth_generate(WorldConfig{}, 1).corpora;
  return c;
}

void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  const Tensor a = filled(n, n, rng), b = filled(n, n, rng);
  for (auto _ : state) {
    Graph g;
    benchmark::DoNotOptimize(matmul(g.constant(a), g.constant(b)).value().data().data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n * n * n));
}
BENCHMARK(BM_Matmul)->Arg(32)->Arg(128);

void BM_TextEncoderForwardBackward(benchmark::State& state) {
  const CorpusBundle& c = world();
  TrainConfig cfg;
  Model m(model_spec_for(cfg, c, ModelKind::three_way), 1);
  const auto batches = make_batches(c.train_src, 32, 1, 0);
  for (auto _ : state) {
    Graph g;
    Var loss = sum(m.source().encode(g, batches[0].tokens));
    m.store().zero_grad();
    g.backward(loss);
  }
}
BENCHMARK(BM_TextEncoderForwardBackward);

void BM_ImageEncoderForwardBackward(benchmark::State& state) {
  const CorpusBundle& c = world();
  TrainConfig cfg;
  Model m(model_spec_for(cfg, c, ModelKind::three_way), 1);
  const auto batches = make_batches(c.train_src, 32, 1, 0);
  for (auto _ : state) {
    Graph g;
    Var loss = sum(m.image().encode(g, *batches[0].features));
    m.store().zero_grad();
    g.backward(loss);
  }
}
BENCHMARK(BM_ImageEncoderForwardBackward);

void BM_TrainStep(benchmark::State& state) {
  const CorpusBundle& c = world();
  TrainConfig cfg;
  cfg.decoder_inputs = DecoderInputs::image_description;
  Model m(model_spec_for(cfg, c, ModelKind::three_way), 1);
  Adam adam(AdamConfig{3e-3, 0.9, 0.999, 1e-8});
  const auto steps = pair_batches(c.train_src, c.train_tgt, 32, 1, 0);
  auto params = m.parameters();
  std::size_t i = 0;
  for (auto _ : state) {
    const StepBatches& s = steps[i++ % steps.size()];
    Graph g;
    Var total = compute_decoder_loss(g, m, *s.tgt, cfg.decoder_inputs) +
                scale(compute_encoder_loss(g, m, *s.src, &*s.tgt, cfg.rank_loss()), cfg.lambda);
    m.store().zero_grad();
    g.backward(total);
    adam.step(params);
  }
}
BENCHMARK(BM_TrainStep)->Unit(benchmark::kMillisecond);

void BM_CorpusBleu(benchmark::State& state) {
  Rng rng(2);
  std::vector<Tokens> hyps, refs;
  for (int s = 0; s < 1000; ++s) {
    Tokens h, r;
    for (int k = 0; k < 12; ++k) {
      h.push_back(std::string(1, static_cast<char>('a' + uniform_index(rng, 8))));
      r.push_back(std::string(1, static_cast<char>('a' + uniform_index(rng, 8))));
    }
    hyps.push_back(h);
    refs.push_back(r);
  }
  for (auto _ : state) benchmark::DoNotOptimize(corpus_bleu(hyps, refs).bleu);
}
BENCHMARK(BM_CorpusBleu)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
