#include "pivotmt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include <nlohmann/json.hpp>

#include "pivotmt/error.hpp"
#include "pivotmt/log.hpp"

namespace pivotmt {
namespace {

using NgramCounts = std::map<std::vector<std::string>, std::size_t>;

NgramCounts ngrams(const Tokens& t, std::size_t n) {
  NgramCounts out;
  if (t.size() < n) return out;
  for (std::size_t i = 0; i + n <= t.size(); ++i) ++out[Tokens(t.begin() + i, t.begin() + i + n)];
  return out;
}

// Clipped matches and total hypothesis n-grams of order n.
std::pair<std::size_t, std::size_t> clipped(const Tokens& hyp, const std::vector<Tokens>& refs, std::size_t n) {
  const NgramCounts h = ngrams(hyp, n);
  NgramCounts max_ref;
  for (const Tokens& r : refs) {
    for (const auto& [g, c] : ngrams(r, n)) max_ref[g] = std::max(max_ref[g], c);
  }
  std::size_t match = 0, total = 0;
  for (const auto& [g, c] : h) {
    total += c;
    auto it = max_ref.find(g);
    if (it != max_ref.end()) match += std::min(c, it->second);
  }
  return {match, total};
}

std::size_t closest_ref_length(std::size_t hyp_len, const std::vector<Tokens>& refs) {
  std::size_t best = refs.front().size();
  for (const Tokens& r : refs) {
    const auto d = [&](std::size_t len) { return len > hyp_len ? len - hyp_len : hyp_len - len; };
    if (d(r.size()) < d(best) || (d(r.size()) == d(best) && r.size() < best)) best = r.size();
  }
  return best;
}

double brevity(std::size_t c, std::size_t r) {
  if (c == 0) return r == 0 ? 1.0 : 0.0;
  if (c >= r) return 1.0;
  return std::exp(1.0 - static_cast<double>(r) / static_cast<double>(c));
}

}  // namespace

ScoreReport corpus_bleu(const std::vector<Tokens>& hypotheses, const std::vector<std::vector<Tokens>>& references) {
  if (hypotheses.size() != references.size()) {
    throw ContractError("corpus_bleu: " + std::to_string(hypotheses.size()) + " hypotheses vs " +
                        std::to_string(references.size()) + " references");
  }
  ScoreReport rep;
  rep.sentences = hypotheses.size();
  double plus1 = 0.0;
  std::size_t exact = 0;
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    const Tokens& h = hypotheses[i];
    const auto& refs = references[i];
    if (refs.empty()) throw ContractError("corpus_bleu: sentence " + std::to_string(i) + " has no reference");
    for (std::size_t n = 1; n <= kBleuOrder; ++n) {
      const auto [m, t] = clipped(h, refs, n);
      rep.matches[n - 1] += m;
      rep.totals[n - 1] += t;
    }
    rep.hyp_length += h.size();
    rep.ref_length += closest_ref_length(h.size(), refs);
    plus1 += sentence_bleu_plus1(h, refs.front());
    if (h == refs.front()) ++exact;
  }
  bool zero = rep.hyp_length == 0;
  double log_sum = 0.0;
  for (std::size_t n = 0; n < kBleuOrder; ++n) {
    rep.precisions[n] = rep.totals[n] ? static_cast<double>(rep.matches[n]) / static_cast<double>(rep.totals[n]) : 0.0;
    if (rep.precisions[n] == 0.0) {
      zero = true;
    } else {
      log_sum += std::log(rep.precisions[n]) / static_cast<double>(kBleuOrder);
    }
  }
  rep.brevity_penalty = brevity(rep.hyp_length, rep.ref_length);
  rep.bleu = zero ? 0.0 : rep.brevity_penalty * std::exp(log_sum);
  if (rep.sentences) {
    rep.bleu_plus1 = plus1 / static_cast<double>(rep.sentences);
    rep.exact_match = static_cast<double>(exact) / static_cast<double>(rep.sentences);
  }
  return rep;
}

ScoreReport corpus_bleu(const std::vector<Tokens>& hypotheses, const std::vector<Tokens>& references) {
  std::vector<std::vector<Tokens>> refs;
  refs.reserve(references.size());
  for (const Tokens& r : references) refs.push_back({r});
  return corpus_bleu(hypotheses, refs);
}

double sentence_bleu_plus1(const Tokens& hypothesis, const Tokens& reference) {
  if (hypothesis.empty()) {
    warn("BLEU+1: empty hypothesis scores 0");
    return 0.0;
  }
  const std::vector<Tokens> refs{reference};
  double log_sum = 0.0;
  for (std::size_t n = 1; n <= kBleuOrder; ++n) {
    const auto [m, t] = clipped(hypothesis, refs, n);
    double p;
    if (n == 1) {
      p = static_cast<double>(m) / static_cast<double>(t);
    } else {
      p = (static_cast<double>(m) + 1.0) / (static_cast<double>(t) + 1.0);
    }
    if (p == 0.0) return 0.0;
    log_sum += std::log(p) / static_cast<double>(kBleuOrder);
  }
  return brevity(hypothesis.size(), reference.size()) * std::exp(log_sum);
}

std::string ScoreReport::to_json() const {
  nlohmann::ordered_json j;
  j["bleu"] = bleu;
  j["bleu_x100"] = bleu * 100.0;
  j["bleu_plus1"] = bleu_plus1;
  j["bleu_plus1_x100"] = bleu_plus1 * 100.0;
  j["precisions"] = precisions;
  j["matches"] = matches;
  j["totals"] = totals;
  j["brevity_penalty"] = brevity_penalty;
  j["hyp_length"] = hyp_length;
  j["ref_length"] = ref_length;
  j["sentences"] = sentences;
  j["exact_match"] = exact_match;
  return j.dump();
}

std::string ScoreReport::summary() const {
  char buf[256];
  const double ratio = ref_length ? static_cast<double>(hyp_length) / static_cast<double>(ref_length) : 0.0;
  std::snprintf(buf, sizeof buf,
                "BLEU = %.2f (BLEU+1 = %.2f), %.1f/%.1f/%.1f/%.1f (BP=%.3f, ratio=%.3f, hyp_len=%zu, ref_len=%zu), "
                "exact = %.1f%%",
                bleu * 100.0, bleu_plus1 * 100.0, precisions[0] * 100.0, precisions[1] * 100.0,
                precisions[2] * 100.0, precisions[3] * 100.0, brevity_penalty, ratio, hyp_length, ref_length,
                exact_match * 100.0);
  return buf;
}

}  // namespace pivotmt
