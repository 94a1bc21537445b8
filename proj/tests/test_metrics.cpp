#include <cmath>
#include <map>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "pivotmt/error.hpp"
#include "pivotmt/log.hpp"
#include "pivotmt/metrics.hpp"
#include "pivotmt/text.hpp"
#include "bleu_oracle.hpp"
#include "support.hpp"

using namespace pivotmt;

namespace {

Tokens T(const char* s) { return split_whitespace(s); }

Tokens random_sentence(Rng& rng, std::size_t min_len, std::size_t max_len, std::size_t alphabet) {
  Tokens t(min_len + uniform_index(rng, max_len - min_len + 1));
  for (auto& w : t) w = std::string(1, static_cast<char>('a' + uniform_index(rng, alphabet)));
  return t;
}

}  // namespace

TEST(CorpusBleu, IdenticalIsOne) {
  const std::vector<Tokens> h{T("a man runs fast"), T("the red dog sits down")};
  const ScoreReport r = corpus_bleu(h, h);
  EXPECT_DOUBLE_EQ(r.bleu, 1.0);
  EXPECT_DOUBLE_EQ(r.bleu_plus1, 1.0);
  EXPECT_EQ(r.exact_match, 1.0);
}

TEST(CorpusBleu, BrevityPenaltyExample) {
  const ScoreReport r = corpus_bleu({T("a b c d")}, std::vector<Tokens>{T("a b c d e")});
  for (double p : r.precisions) EXPECT_EQ(p, 1.0);
  EXPECT_NEAR(r.brevity_penalty, std::exp(1.0 - 5.0 / 4.0), 1e-15);
  EXPECT_NEAR(r.bleu, 0.77880, 5e-6);
  EXPECT_NEAR(r.bleu, std::exp(-0.25), 1e-15);
  EXPECT_EQ(r.hyp_length, 4u);
  EXPECT_EQ(r.ref_length, 5u);
}

TEST(CorpusBleu, NoFourGramMatchIsZero) {
  const ScoreReport r = corpus_bleu({T("a b c d")}, std::vector<Tokens>{T("a b c x d")});
  EXPECT_EQ(r.matches[3], 0u);
  EXPECT_EQ(r.bleu, 0.0);
}

TEST(CorpusBleu, EmptyOutputAndMismatch) {
  EXPECT_EQ(corpus_bleu({Tokens{}}, std::vector<Tokens>{T("a b")}).bleu, 0.0);
  EXPECT_THROW(corpus_bleu({T("a")}, std::vector<Tokens>{}), ContractError);
}

TEST(CorpusBleu, ClosestReferenceLengthShorterOnTie) {
  const ScoreReport r = corpus_bleu({T("a b c d e f")}, std::vector<std::vector<Tokens>>{{T("a b c d"), T("a b c d e f g h")}});
  EXPECT_EQ(r.ref_length, 4u);
}

TEST(CorpusBleu, MatchesOracleOnRandomCases) {
  Rng rng(2024);
  for (int c = 0; c < 25; ++c) {
    std::vector<Tokens> hyps;
    std::vector<std::vector<Tokens>> refs;
    const std::size_t n = 1 + uniform_index(rng, 6);
    for (std::size_t s = 0; s < n; ++s) {
      hyps.push_back(random_sentence(rng, 1, 12, 4));
      std::vector<Tokens> rs;
      const std::size_t k = 1 + uniform_index(rng, 3);
      for (std::size_t j = 0; j < k; ++j) rs.push_back(random_sentence(rng, 1, 12, 4));
      refs.push_back(rs);
    }
    const double expected = bleu_oracle::corpus_bleu(hyps, refs);
    const double got = corpus_bleu(hyps, refs).bleu;
    EXPECT_NEAR(got, expected, 1e-12) << "case " << c;
  }
}

TEST(BleuPlus1, Examples) {
  EXPECT_DOUBLE_EQ(sentence_bleu_plus1(T("a b c d e"), T("a b c d e")), 1.0);
  EXPECT_NEAR(sentence_bleu_plus1(T("a b c d"), T("a b x d")), 0.5, 1e-15);
  EXPECT_EQ(sentence_bleu_plus1(T("p q"), T("a b x d")), 0.0);
}

TEST(BleuPlus1, EmptyHypothesisWarns) {
  int warnings = 0;
  auto prev = set_warning_sink([&](std::string_view) { ++warnings; });
  EXPECT_EQ(sentence_bleu_plus1(Tokens{}, T("a")), 0.0);
  set_warning_sink(prev);
  EXPECT_EQ(warnings, 1);
}

TEST(BleuPlus1, MatchesOracleOnRandomCases) {
  Rng rng(77);
  for (int c = 0; c < 25; ++c) {
    const Tokens h = random_sentence(rng, 1, 10, 3);
    const Tokens r = random_sentence(rng, 1, 10, 3);
    EXPECT_NEAR(sentence_bleu_plus1(h, r), bleu_oracle::bleu_plus1(h, r), 1e-12) << "case " << c;
  }
}

TEST(ScoreReport, JsonCarriesBothScores) {
  const ScoreReport r = corpus_bleu({T("a b c d")}, std::vector<Tokens>{T("a b c d e")});
  const auto j = nlohmann::json::parse(r.to_json());
  EXPECT_NEAR(j.at("bleu").get<double>(), r.bleu, 1e-15);
  EXPECT_NEAR(j.at("bleu_x100").get<double>(), 100 * r.bleu, 1e-12);
  EXPECT_TRUE(j.contains("bleu_plus1"));
  EXPECT_EQ(j.at("precisions").size(), 4u);
  EXPECT_NE(r.summary().find("BLEU = 77.88"), std::string::npos);
  EXPECT_NE(r.summary().find("BLEU+1"), std::string::npos);
}
