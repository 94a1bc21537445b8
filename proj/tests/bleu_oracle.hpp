#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

// Independent reference BLEU used to check the library implementation.
namespace bleu_oracle {

using Sentence = std::vector<std::string>;

// n-gram maps keyed by joined strings.
inline std::map<std::string, int> grams(const Sentence& t, std::size_t n) {
  std::map<std::string, int> out;
  for (std::size_t i = 0; i + n <= t.size(); ++i) {
    std::string key;
    for (std::size_t k = i; k < i + n; ++k) key += t[k] + "\x1f";
    ++out[key];
  }
  return out;
}

inline double corpus_bleu(const std::vector<Sentence>& hyps, const std::vector<std::vector<Sentence>>& refs) {
  double match[4] = {0, 0, 0, 0}, total[4] = {0, 0, 0, 0};
  double c = 0, r = 0;
  for (std::size_t s = 0; s < hyps.size(); ++s) {
    c += static_cast<double>(hyps[s].size());
    double best_len = 0, best_diff = 1e18;
    for (const auto& ref : refs[s]) {
      const double d = std::abs(static_cast<double>(ref.size()) - static_cast<double>(hyps[s].size()));
      if (d < best_diff || (d == best_diff && static_cast<double>(ref.size()) < best_len)) {
        best_diff = d;
        best_len = static_cast<double>(ref.size());
      }
    }
    r += best_len;
    for (std::size_t n = 1; n <= 4; ++n) {
      std::map<std::string, int> max_ref;
      for (const auto& ref : refs[s]) {
        for (const auto& [g, k] : grams(ref, n)) max_ref[g] = std::max(max_ref[g], k);
      }
      for (const auto& [g, k] : grams(hyps[s], n)) {
        match[n - 1] += std::min(k, max_ref[g]);
        total[n - 1] += k;
      }
    }
  }
  if (c == 0) return 0.0;
  double log_sum = 0;
  for (int n = 0; n < 4; ++n) {
    if (match[n] == 0) return 0.0;
    log_sum += std::log(match[n] / total[n]);
  }
  const double bp = c < r ? std::exp(1 - r / c) : 1.0;
  return bp * std::exp(log_sum / 4);
}

inline double bleu_plus1(const Sentence& h, const Sentence& ref) {
  if (h.empty()) return 0.0;
  double log_sum = 0;
  for (std::size_t n = 1; n <= 4; ++n) {
    auto hg = grams(h, n), rg = grams(ref, n);
    double m = 0, t = 0;
    for (const auto& [g, k] : hg) {
      m += std::min(k, rg[g]);
      t += k;
    }
    if (n == 1) {
      if (m == 0) return 0.0;
      log_sum += std::log(m / t);
    } else {
      log_sum += std::log((m + 1) / (t + 1));
    }
  }
  const double c = static_cast<double>(h.size()), r = static_cast<double>(ref.size());
  const double bp = c < r ? std::exp(1 - r / c) : 1.0;
  return bp * std::exp(log_sum / 4);
}

}  // namespace bleu_oracle
