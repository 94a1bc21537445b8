#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace pivotmt {

using Tokens = std::vector<std::string>;

inline constexpr std::size_t kBleuOrder = 4;

struct ScoreReport {
  double bleu = 0.0;
  double bleu_plus1 = 0.0;  // mean sentence-level BLEU+1
  std::array<double, kBleuOrder> precisions{};
  std::array<std::size_t, kBleuOrder> matches{};
  std::array<std::size_t, kBleuOrder> totals{};
  double brevity_penalty = 1.0;
  std::size_t hyp_length = 0;
  std::size_t ref_length = 0;
  std::size_t sentences = 0;
  double exact_match = 0.0;  // fraction of hypotheses equal to their first reference

  // One-line JSON object; BLEU values in [0, 1] plus *_x100 companions.
  std::string to_json() const;
  // e.g. "BLEU = 77.88 (BLEU+1 = 80.00), 100.0/100.0/100.0/100.0 (BP=0.779, ...)"
  std::string summary() const;
};

// Corpus BLEU with clipped n-gram counts summed over the corpus, geometric
// mean of p1..p4 and brevity penalty exp(1 - r/c) when c < r. The reference
// length of a sentence is the reference length closest to the hypothesis
// (shorter on ties). Zero when any p_n is zero or the output is empty.
// Throws ContractError when counts differ.
ScoreReport corpus_bleu(const std::vector<Tokens>& hypotheses, const std::vector<std::vector<Tokens>>& references);
ScoreReport corpus_bleu(const std::vector<Tokens>& hypotheses, const std::vector<Tokens>& references);

// Sentence BLEU with add-one smoothing on p2..p4 (p1 unsmoothed) and the
// same brevity penalty. An empty hypothesis scores 0 and emits a warning.
double sentence_bleu_plus1(const Tokens& hypothesis, const Tokens& reference);

}  // namespace pivotmt
