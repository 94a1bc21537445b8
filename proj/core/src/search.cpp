#include "pivotmt/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pivotmt/error.hpp"

namespace pivotmt {
namespace {

bool emittable(TokenId id) { return id != Vocabulary::kNull && id != Vocabulary::kBos; }

TokenId best_token(const std::vector<double>& log_probs) {
  TokenId best = Vocabulary::kEos;
  double best_lp = -std::numeric_limits<double>::infinity();
  bool found = false;
  for (TokenId id = 0; id < log_probs.size(); ++id) {
    if (!emittable(id)) continue;
    if (!found || log_probs[id] > best_lp) {
      best = id;
      best_lp = log_probs[id];
      found = true;
    }
  }
  return best;
}

struct Hypothesis {
  std::vector<TokenId> tokens;
  double log_prob = 0.0;
  DecodeState state;
};

struct Finished {
  std::vector<TokenId> tokens;
  double score;
};

}  // namespace

std::vector<double> log_softmax(std::span<const double> logits) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : logits) m = std::max(m, v);
  double z = 0.0;
  for (double v : logits) z += std::exp(v - m);
  const double lse = m + std::log(z);
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - lse;
  return out;
}

std::vector<TokenId> greedy_search(const StepFn& step, DecodeState initial, std::size_t max_len) {
  if (max_len < 1) throw ContractError("greedy_decode: max_len must be >= 1");
  std::vector<TokenId> out;
  DecodeState state = std::move(initial);
  TokenId prev = Vocabulary::kBos;
  while (out.size() < max_len) {
    StepResult r = step(prev, state);
    const TokenId next = best_token(r.log_probs);
    if (next == Vocabulary::kEos) break;
    out.push_back(next);
    prev = next;
    state = std::move(r.state);
  }
  return out;
}

std::vector<TokenId> beam_search(const StepFn& step, DecodeState initial, std::size_t beam_width,
                                 std::size_t max_len) {
  if (beam_width < 1) throw ContractError("beam_decode: beam_width must be >= 1");
  if (max_len < 1) throw ContractError("beam_decode: max_len must be >= 1");

  std::vector<Hypothesis> beams{{{}, 0.0, std::move(initial)}};
  std::vector<Finished> finished;

  for (std::size_t t = 0; t < max_len && !beams.empty(); ++t) {
    struct Candidate {
      std::size_t beam;
      TokenId token;
      double log_prob;
    };
    std::vector<Candidate> candidates;
    std::vector<DecodeState> next_states(beams.size());
    for (std::size_t b = 0; b < beams.size(); ++b) {
      const TokenId prev = beams[b].tokens.empty() ? Vocabulary::kBos : beams[b].tokens.back();
      StepResult r = step(prev, beams[b].state);
      for (TokenId id = 0; id < r.log_probs.size(); ++id) {
        if (emittable(id)) candidates.push_back({b, id, beams[b].log_prob + r.log_probs[id]});
      }
      next_states[b] = std::move(r.state);
    }
    std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
      if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
      if (a.beam != b.beam) return a.beam < b.beam;
      return a.token < b.token;
    });

    std::vector<Hypothesis> next;
    for (std::size_t k = 0; k < candidates.size() && k < beam_width; ++k) {
      const Candidate& c = candidates[k];
      std::vector<TokenId> tokens = beams[c.beam].tokens;
      if (c.token == Vocabulary::kEos) {
        finished.push_back({std::move(tokens), c.log_prob / static_cast<double>(beams[c.beam].tokens.size() + 1)});
        continue;
      }
      tokens.push_back(c.token);
      next.push_back({std::move(tokens), c.log_prob, next_states[c.beam]});
    }
    beams = std::move(next);
  }
  for (auto& h : beams) {
    const double len = static_cast<double>(std::max<std::size_t>(h.tokens.size(), 1));
    finished.push_back({std::move(h.tokens), h.log_prob / len});
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < finished.size(); ++i) {
    if (finished[i].score > finished[best].score) best = i;
  }
  return finished.empty() ? std::vector<TokenId>{} : finished[best].tokens;
}

}  // namespace pivotmt
