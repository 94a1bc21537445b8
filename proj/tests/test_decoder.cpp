#include <cmath>
#include <functional>
#include <map>

#include <gtest/gtest.h>

#include "pivotmt/batching.hpp"
#include "pivotmt/decoder.hpp"
#include "pivotmt/error.hpp"
#include "pivotmt/search.hpp"
#include "support.hpp"

using namespace pivotmt;

namespace {

constexpr std::size_t kV = 8;

struct ToyDecoder {
  ParameterStore store;
  Rng rng{1};
  ModelDims dims{kV, kV, 4, 3, 3};
  Decoder dec;

  explicit ToyDecoder(ContextMode mode = ContextMode::init_state) : dec(store, "dec", kV, dims, mode, rng) {}

  Parameter& p(const std::string& name) { return *store.find("dec." + name); }

  // After token a the output distribution is one-hot on next[a].
  void script(const std::map<TokenId, std::vector<TokenId>>& next) {
    for (Parameter& q : store) q.value.fill(0.0);
    for (std::size_t j = 0; j < kV; ++j) {
      p("embed").value(j, j) = 1.0;
      p("lstm.w_x").value(j, 2 * kV + j) = 10.0;
      p("lstm.b").value[j] = 20.0;
      p("lstm.b").value[kV + j] = -20.0;
      p("lstm.b").value[3 * kV + j] = 20.0;
    }
    for (const auto& [from, to] : next) {
      for (TokenId t : to) p("out.w").value(from, t) = 50.0;
    }
  }

  Tensor context() const { return Tensor::matrix(1, 4, 0.25); }
};

TokenBatch batch_of(const std::vector<std::vector<TokenId>>& s) { return pad_sequences(s); }

}  // namespace

TEST(DecoderNll, ConfidentScriptGivesZero) {
  PrecisionScope s(Precision::f64);
  ToyDecoder t;
  t.script({{Vocabulary::kBos, {5}}, {5, {6}}, {6, {7}}, {7, {Vocabulary::kEos}}});
  Graph g;
  const double loss = t.dec.nll(g, g.constant(t.context()), batch_of({{5, 6, 7}})).item();
  EXPECT_GE(loss, 0.0);
  EXPECT_LT(loss, 1e-12);
}

TEST(DecoderNll, UniformOutputGivesLogV) {
  PrecisionScope s(Precision::f64);
  ToyDecoder t;
  t.script({});
  Graph g;
  EXPECT_NEAR(t.dec.nll(g, g.constant(t.context()), batch_of({{5, 6, 7}})).item(), std::log(8.0), 1e-12);
  // padded rows weigh their own length only
  Graph g2;
  Tensor ctx = Tensor::matrix(2, 4, 0.1);
  EXPECT_NEAR(t.dec.nll(g2, g2.constant(ctx), batch_of({{5}, {5, 6, 7, 4, 4}})).item(), std::log(8.0), 1e-12);
}

TEST(DecoderNll, DuplicatedPairMatchesSingle) {
  PrecisionScope s(Precision::f64);
  for (ContextMode mode : {ContextMode::init_state, ContextMode::per_step}) {
    ToyDecoder t(mode);
    Rng rng(2);
    const Tensor ctx = testing_support::random_tensor(1, 4, rng);
    Tensor two = Tensor::matrix(2, 4);
    for (std::size_t c = 0; c < 4; ++c) two(0, c) = two(1, c) = ctx(0, c);
    Graph g;
    const double single = t.dec.nll(g, g.constant(ctx), batch_of({{4, 6, 5}})).item();
    const double pair = t.dec.nll(g, g.constant(two), batch_of({{4, 6, 5}, {4, 6, 5}})).item();
    EXPECT_LT(testing_support::rel_diff(single, pair), 1e-14);
    EXPECT_GT(single, 0.0);
  }
}

TEST(DecoderNll, Preconditions) {
  ToyDecoder t;
  Graph g;
  EXPECT_THROW(t.dec.nll(g, g.constant(Tensor::matrix(1, 3)), batch_of({{4}})), DimensionError);
  EXPECT_THROW(t.dec.nll(g, g.constant(Tensor::matrix(2, 4)), batch_of({{4}})), DimensionError);
  EXPECT_THROW(t.dec.nll(g, g.constant(Tensor::matrix(1, 4)), batch_of({{99}})), ContractError);
}

TEST(Greedy, FollowsScriptThenStops) {
  ToyDecoder t;
  t.script({{Vocabulary::kBos, {5}}, {5, {6}}, {6, {7}}, {7, {Vocabulary::kEos}}});
  EXPECT_EQ(t.dec.greedy_decode(t.context(), 10), (std::vector<TokenId>{5, 6, 7}));
  EXPECT_EQ(t.dec.greedy_decode(t.context(), 2), (std::vector<TokenId>{5, 6}));
}

TEST(Greedy, NoEosRunsToMaxLen) {
  ToyDecoder t;
  t.script({{Vocabulary::kBos, {5}}, {5, {6}}, {6, {5}}});
  EXPECT_EQ(t.dec.greedy_decode(t.context(), 7).size(), 7u);
  EXPECT_THROW(t.dec.greedy_decode(t.context(), 0), ContractError);
}

TEST(Greedy, TieGoesToLowestId) {
  ToyDecoder t;
  t.script({{Vocabulary::kBos, {6, 5}}, {5, {Vocabulary::kEos}}, {6, {Vocabulary::kEos}}});
  EXPECT_EQ(t.dec.greedy_decode(t.context(), 5), (std::vector<TokenId>{5}));
}

TEST(Greedy, NeverEmitsNullOrBos) {
  ToyDecoder t;
  t.script({{Vocabulary::kBos, {Vocabulary::kNull, Vocabulary::kBos}}});
  const auto out = t.dec.greedy_decode(t.context(), 4);
  for (TokenId id : out) {
    EXPECT_NE(id, Vocabulary::kNull);
    EXPECT_NE(id, Vocabulary::kBos);
  }
}

TEST(Beam, ScriptModelIndependentOfWidth) {
  ToyDecoder t;
  t.script({{Vocabulary::kBos, {5}}, {5, {6}}, {6, {7}}, {7, {Vocabulary::kEos}}});
  for (std::size_t w = 1; w <= 6; ++w) EXPECT_EQ(t.dec.beam_decode(t.context(), w, 10), (std::vector<TokenId>{5, 6, 7}));
}

TEST(Beam, WidthOneEqualsGreedyOnRandomModels) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    ParameterStore store;
    Rng rng(seed);
    Decoder dec(store, "d", 9, ModelDims{5, 6, 4, 3, 3}, seed % 2 ? ContextMode::per_step : ContextMode::init_state,
                rng);
    for (Parameter& p : store) {
      for (double& v : p.value.data()) v *= 40.0;
    }
    const Tensor ctx = testing_support::random_tensor(1, 4, rng);
    EXPECT_EQ(dec.beam_decode(ctx, 1, 8), dec.greedy_decode(ctx, 8)) << "seed " << seed;
  }
}

namespace {

// Next-token distribution as a function of the prefix emitted so far.
using ToyTable = std::function<std::map<TokenId, double>(const std::vector<TokenId>&)>;

// Step function whose decode state is the emitted prefix.
StepFn prefix_step(ToyTable table) {
  return [table](TokenId prev, const DecodeState& state) {
    std::vector<double> prefix(state[0].data().begin(), state[0].data().end());
    if (prev != Vocabulary::kBos) prefix.push_back(static_cast<double>(prev));
    std::vector<TokenId> tokens(prefix.begin(), prefix.end());
    std::vector<double> lp(6, std::log(1e-12));
    for (const auto& [id, p] : table(tokens)) lp[id] = std::log(p);
    return StepResult{lp, {prefix.empty() ? Tensor() : Tensor({1, prefix.size()}, prefix)}};
  };
}

// Exhaustive search with the beam scoring rule: finished hypotheses are
// averaged over tokens plus EOS, cut-off ones over their tokens.
std::vector<TokenId> brute_force(const ToyTable& table, std::size_t max_len) {
  std::vector<TokenId> best;
  double best_score = -INFINITY;
  std::function<void(std::vector<TokenId>&, double)> rec = [&](std::vector<TokenId>& prefix, double lp) {
    const auto dist = table(prefix);
    for (TokenId id = 1; id < 6; ++id) {
      if (id == Vocabulary::kBos) continue;
      const auto it = dist.find(id);
      const double step = std::log(it == dist.end() ? 1e-12 : it->second);
      if (id == Vocabulary::kEos) {
        const double score = (lp + step) / static_cast<double>(prefix.size() + 1);
        if (score > best_score) best_score = score, best = prefix;
        continue;
      }
      prefix.push_back(id);
      if (prefix.size() == max_len) {
        const double score = (lp + step) / static_cast<double>(max_len);
        if (score > best_score) best_score = score, best = prefix;
      } else {
        rec(prefix, lp + step);
      }
      prefix.pop_back();
    }
  };
  std::vector<TokenId> start;
  rec(start, 0.0);
  return best;
}

}  // namespace

TEST(Beam, FindsBetterSequenceThanGreedy) {
  static constexpr TokenId A = 4, B = 5, E = Vocabulary::kEos;
  const ToyTable table = [](const std::vector<TokenId>& prefix) -> std::map<TokenId, double> {
    if (prefix.empty()) return {{A, 0.6}, {B, 0.4}};
    if (prefix == std::vector<TokenId>{A}) return {{E, 0.3}, {A, 0.35}, {B, 0.35}};
    if (prefix == std::vector<TokenId>{B}) return {{E, 0.99}, {A, 0.005}, {B, 0.005}};
    return {{E, 0.98}, {A, 0.01}, {B, 0.01}};
  };
  const StepFn step = prefix_step(table);
  const DecodeState init{Tensor()};
  const auto oracle = brute_force(table, 3);
  EXPECT_EQ(oracle, (std::vector<TokenId>{B}));
  EXPECT_EQ(greedy_search(step, init, 3), (std::vector<TokenId>{A, A}));
  EXPECT_EQ(beam_search(step, init, 2, 3), oracle);
  EXPECT_THROW(beam_search(step, init, 0, 3), ContractError);
}

TEST(Search, LogSoftmaxNormalizes) {
  const std::vector<double> z{1000.0, 1000.0, -1000.0};
  const auto lp = log_softmax(z);
  EXPECT_NEAR(lp[0], std::log(0.5), 1e-12);
  EXPECT_NEAR(std::exp(lp[0]) + std::exp(lp[1]) + std::exp(lp[2]), 1.0, 1e-12);
}
