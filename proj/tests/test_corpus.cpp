#include <filesystem>
#include <map>
#include <set>
#include <tuple>

#include <gtest/gtest.h>

#include "pivotmt/batching.hpp"
#include "pivotmt/corpus.hpp"
#include "pivotmt/error.hpp"
#include "pivotmt/features.hpp"
#include "pivotmt/key_value.hpp"
#include "pivotmt/synth.hpp"
#include "pivotmt/text.hpp"
#include "pivotmt/vocabulary.hpp"
#include "support.hpp"

using namespace pivotmt;
using testing_support::slurp;
using testing_support::TempDir;
using testing_support::write_file;

using Words = std::vector<std::string>;

TEST(Tokenize, SplitsPunctuationAndLowercases) {
  EXPECT_EQ(tokenize("A man, running."), (Words{"a", "man", ",", "running", "."}));
  EXPECT_EQ(tokenize("dog"), (Words{"dog"}));
  EXPECT_EQ(tokenize("  (Hello)  World! "), (Words{"(", "hello", ")", "world", "!"}));
  EXPECT_THROW(tokenize("   "), ContractError);
  EXPECT_THROW(tokenize(""), ContractError);
}

TEST(Tokenize, NonAsciiPassesThrough) { EXPECT_EQ(tokenize("Straße"), (Words{"straße"})); }

TEST(Text, FormatNumberRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 100.0, 1e-8, -2.5}) EXPECT_EQ(std::stod(format_number(v)), v);
  EXPECT_EQ(format_number(100.0), "100");
}

TEST(Vocabulary, MinCountThreshold) {
  std::vector<Words> s;
  for (int i = 0; i < 4; ++i) s.push_back({"rare", "common"});
  s.push_back({"common"});
  s.push_back({"five"});
  for (int i = 0; i < 4; ++i) s.push_back({"five"});
  const Vocabulary v = Vocabulary::build(s, 5);
  EXPECT_EQ(v.lookup("rare"), Vocabulary::kUnk);
  EXPECT_NE(v.lookup("five"), Vocabulary::kUnk);
  EXPECT_NE(v.lookup("common"), Vocabulary::kUnk);
  EXPECT_EQ(v.lookup("never-seen"), Vocabulary::kUnk);
  EXPECT_EQ(v.size(), Vocabulary::kSpecialCount + 2);
}

TEST(Vocabulary, OrderingByCountThenBytes) {
  const Vocabulary v = Vocabulary::build({{"a", "b"}, {"b"}}, 1);
  ASSERT_EQ(v.size(), 6u);
  EXPECT_EQ(v.token(4), "b");
  EXPECT_EQ(v.token(5), "a");
  const Vocabulary w = Vocabulary::build({{"z", "y"}}, 1);
  EXPECT_EQ(w.token(4), "y");
}

TEST(Vocabulary, SpecialsAndRoundTrip) {
  const Vocabulary v = Vocabulary::build({{"x", "y", "x"}}, 1);
  EXPECT_EQ(v.decode(v.encode({"x", "y"})), (Words{"x", "y"}));
  TempDir dir;
  v.save(dir.str("v.txt"));
  const Vocabulary back = Vocabulary::load(dir.str("v.txt"));
  EXPECT_EQ(back.content_hash(), v.content_hash());
  EXPECT_EQ(back.size(), v.size());
  EXPECT_NE(Vocabulary::build({{"x", "z"}}, 1).content_hash(), v.content_hash());
  EXPECT_THROW(Vocabulary::build({}, 1), ContractError);
}

TEST(Features, RoundTripIsFloatExact) {
  TempDir dir;
  FeatureMatrix m;
  m.count = 3;
  m.dim = 2;
  m.values = {0.1f, -1e-7f, 3.14159265f, 1e20f, 0.0f, -2.5f};
  save_features(dir.str("f.feat"), m);
  const FeatureFile back = load_features(dir.str("f.feat"));
  EXPECT_EQ(back.matrix.count, 3u);
  EXPECT_EQ(back.matrix.dim, 2u);
  EXPECT_EQ(back.matrix.values, m.values);
  EXPECT_EQ(back.ids, (Words{"0", "1", "2"}));
}

TEST(Features, ShortRowIsFormatError) {
  TempDir dir;
  std::string row;
  for (int i = 0; i < 4095; ++i) row += (i ? " " : "") + std::string("0.5");
  write_file(dir.str("f.feat"), "1 4096\n" + row + "\n");
  EXPECT_THROW(load_features(dir.str("f.feat")), FormatError);
}

TEST(Features, EmptyFileAndBadHeader) {
  TempDir dir;
  write_file(dir.str("zero.feat"), "0 4096\n");
  const FeatureFile f = load_features(dir.str("zero.feat"));
  EXPECT_EQ(f.matrix.count, 0u);
  EXPECT_TRUE(f.matrix.values.empty());
  write_file(dir.str("bad.feat"), "two 3\n");
  EXPECT_THROW(load_features(dir.str("bad.feat")), FormatError);
  write_file(dir.str("more.feat"), "1 1\n0.5\n0.5\n");
  EXPECT_THROW(load_features(dir.str("more.feat")), FormatError);
  EXPECT_THROW(load_features(dir.str("missing.feat")), FormatError);
}

namespace {

Corpus numbered_corpus(std::size_t n, std::size_t len_mod = 1) {
  std::vector<std::string> ids;
  std::vector<Words> sentences;
  for (std::size_t i = 0; i < n; ++i) {
    ids.push_back(std::to_string(i));
    Words w{"w"};
    for (std::size_t k = 0; k < i % len_mod; ++k) w.push_back("w");
    sentences.push_back(w);
  }
  FeatureMatrix m;
  m.count = n;
  m.dim = 2;
  for (std::size_t i = 0; i < n; ++i) {
    m.values.push_back(static_cast<float>(i));
    m.values.push_back(1.0f);
  }
  return make_corpus(Split::train_src, Language::source, ids, sentences, &m, Vocabulary::build(sentences, 1));
}

}  // namespace

TEST(Batching, SizesFollowArithmetic) {
  const Corpus c = numbered_corpus(70);
  const auto batches = make_batches(c, 32, 1, 0);
  ASSERT_EQ(batches.size(), 3u);
  EXPECT_EQ(batches[0].size(), 32u);
  EXPECT_EQ(batches[1].size(), 32u);
  EXPECT_EQ(batches[2].size(), 6u);
  std::set<std::size_t> seen;
  for (const auto& b : batches) seen.insert(b.doc_indices.begin(), b.doc_indices.end());
  EXPECT_EQ(seen.size(), 70u);
}

TEST(Batching, LoneTrailingDocumentJoinsPreviousBatch) {
  const auto batches = make_batches(numbered_corpus(65), 32, 1, 0);
  ASSERT_EQ(batches.size(), 2u);
  EXPECT_EQ(batches[1].size(), 33u);
  const auto fixed = fixed_batches(numbered_corpus(33), 32);
  ASSERT_EQ(fixed.size(), 1u);
  EXPECT_EQ(fixed[0].size(), 33u);
  EXPECT_THROW(make_batches(numbered_corpus(5), 1, 1, 0), ConfigError);
}

TEST(Batching, DeterministicPerSeedAndEpoch) {
  const Corpus c = numbered_corpus(50);
  const auto a = make_batches(c, 8, 3, 2);
  const auto b = make_batches(c, 8, 3, 2);
  const auto other = make_batches(c, 8, 3, 3);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].doc_indices, b[i].doc_indices);
  EXPECT_NE(a[0].doc_indices, other[0].doc_indices);
}

TEST(Batching, FeaturesFollowDocuments) {
  const Corpus c = numbered_corpus(10);
  for (const auto& b : make_batches(c, 4, 9, 0)) {
    ASSERT_TRUE(b.features.has_value());
    for (std::size_t r = 0; r < b.size(); ++r) EXPECT_EQ((*b.features)(r, 0), static_cast<double>(b.doc_indices[r]));
  }
}

TEST(Batching, PaddingWithNull) {
  const TokenBatch b = pad_sequences({{5, 6, 7}, {5, 6, 7, 8, 9}});
  EXPECT_EQ(b.max_len, 5u);
  EXPECT_EQ(b.lengths, (std::vector<std::size_t>{3, 5}));
  EXPECT_EQ(b.at(0, 3), Vocabulary::kNull);
  EXPECT_EQ(b.at(0, 4), Vocabulary::kNull);
  EXPECT_EQ(b.unpad(), (std::vector<std::vector<TokenId>>{{5, 6, 7}, {5, 6, 7, 8, 9}}));
  EXPECT_EQ(b.column(1), (std::vector<TokenId>{6, 6}));
}

TEST(Synth, DefaultWorldShape) {
  const SynthWorld w = synth_generate(WorldConfig{}, 1);
  EXPECT_EQ(w.corpora.train_src.size(), 250u);
  EXPECT_EQ(w.corpora.train_tgt.size(), 250u);
  EXPECT_EQ(w.corpora.val_src.size(), 25u);
  EXPECT_EQ(w.corpora.val_tgt.size(), 25u);
  EXPECT_EQ(w.corpora.test.size(), 50u);
  EXPECT_EQ(w.oracle.size(), 50u);
  EXPECT_EQ(w.corpora.feature_dim(), WorldConfig{}.feature_dim());
  std::set<std::string> src_ids;
  for (const auto& d : w.corpora.train_src.documents) src_ids.insert(d.id);
  for (const auto& d : w.corpora.train_tgt.documents) EXPECT_EQ(src_ids.count(d.id), 0u) << d.id;
  for (const auto& p : w.corpora.test.pairs) EXPECT_EQ(src_ids.count(p.id), 0u);
}

TEST(Synth, SameSeedSameBytes) {
  TempDir dir;
  const auto files = save_synth_world(synth_generate(WorldConfig{}, 4), dir.str("a"));
  save_synth_world(synth_generate(WorldConfig{}, 4), dir.str("b"));
  save_synth_world(synth_generate(WorldConfig{}, 5), dir.str("c"));
  bool differs = false;
  for (const auto& f : files) {
    EXPECT_EQ(slurp(dir.str("a/" + f)), slurp(dir.str("b/" + f))) << f;
    differs |= slurp(dir.str("a/" + f)) != slurp(dir.str("c/" + f));
  }
  EXPECT_TRUE(differs);
}

TEST(Synth, NoiselessFeaturesDependOnAttributesOnly) {
  WorldConfig cfg;
  cfg.sigma = 0.0;
  const SynthWorld w = synth_generate(cfg, 2);
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, std::vector<float>> by_tuple;
  const Corpus& c = w.corpora.train_src;
  std::map<std::string, const Scene*> scenes;
  for (const auto& s : w.scenes) scenes[s.id] = &s;
  std::size_t repeats = 0;
  for (const auto& d : c.documents) {
    const Scene& s = *scenes.at(d.id);
    const auto key = std::make_tuple(s.color, s.object, s.action);
    auto [it, inserted] = by_tuple.emplace(key, *d.image_feature);
    if (!inserted) {
      ++repeats;
      EXPECT_EQ(it->second, *d.image_feature);
    }
  }
  EXPECT_GT(repeats, 0u);
}

TEST(Synth, ConfigValidation) {
  KeyValueConfig kv = KeyValueConfig::parse("scenes=10\n");
  EXPECT_THROW(WorldConfig::from(kv), ConfigError);
  EXPECT_THROW(WorldConfig::from(KeyValueConfig::parse("bogus=1\n")), ConfigError);
  EXPECT_THROW(WorldConfig::from(KeyValueConfig::parse("sigma=abc\n")), ConfigError);
  EXPECT_EQ(WorldConfig::from(KeyValueConfig{}).scenes, 600u);
}

TEST(KeyValue, TypedParsing) {
  const KeyValueConfig kv = KeyValueConfig::parse("# comment\na = 1\nb=2.5\nc=true\nname=x y\n");
  EXPECT_EQ(kv.get_uint("a", 0), 1u);
  EXPECT_EQ(kv.get_double("b", 0), 2.5);
  EXPECT_TRUE(kv.get_bool("c", false));
  EXPECT_EQ(kv.get_string("name", ""), "x y");
  EXPECT_EQ(kv.get_int("missing", -3), -3);
  EXPECT_NO_THROW(kv.reject_unknown());
  const KeyValueConfig bad = KeyValueConfig::parse("a=1\nzzz=2\n");
  bad.get_uint("a", 0);
  EXPECT_THROW(bad.reject_unknown(), ConfigError);
  EXPECT_THROW(KeyValueConfig::parse("novalue\n"), ConfigError);
  EXPECT_THROW(KeyValueConfig::parse("a=1\na=2\n"), ConfigError);
  EXPECT_THROW(KeyValueConfig::parse("a=-1\n").get_uint("a", 0), ConfigError);
}

TEST(SplitTriplets, DisjointDeterministicRanges) {
  std::vector<Words> src, tgt;
  FeatureMatrix m;
  m.count = 40;
  m.dim = 1;
  for (std::size_t i = 0; i < 40; ++i) {
    src.push_back({"s" + std::to_string(i % 3)});
    tgt.push_back({"t" + std::to_string(i % 2)});
    m.values.push_back(static_cast<float>(i));
  }
  const SplitSizes sizes = SplitSizes::parse("10,10,5,5,10");
  EXPECT_EQ(sizes.total(), 40u);
  const CorpusBundle a = split_triplets(src, tgt, m, sizes, 7, 1);
  const CorpusBundle b = split_triplets(src, tgt, m, sizes, 7, 1);
  std::set<std::string> ids;
  auto collect = [&](const Corpus& c) {
    for (const auto& d : c.documents) {
      EXPECT_TRUE(ids.insert(d.id).second) << d.id;
      EXPECT_EQ((*d.image_feature)[0], std::stof(d.id));
    }
  };
  collect(a.train_src);
  collect(a.train_tgt);
  collect(a.val_src);
  collect(a.val_tgt);
  for (const auto& p : a.test.pairs) EXPECT_TRUE(ids.insert(p.id).second);
  EXPECT_EQ(ids.size(), 40u);
  for (std::size_t i = 0; i < a.train_src.size(); ++i) EXPECT_EQ(a.train_src.documents[i].id, b.train_src.documents[i].id);
  EXPECT_EQ(a.parallel_train.size(), 10u);

  FeatureMatrix short_m = m;
  short_m.count = 39;
  short_m.values.pop_back();
  EXPECT_THROW(split_triplets(src, tgt, short_m, sizes, 7, 1), FormatError);
  EXPECT_THROW(split_triplets(src, tgt, m, SplitSizes::parse("30,10,5,5,10"), 7, 1), ConfigError);
  EXPECT_THROW(SplitSizes::parse("1,2,3"), ConfigError);
}

TEST(CorpusDir, SaveLoadRoundTrip) {
  TempDir dir;
  const SynthWorld w = synth_generate(WorldConfig{}, 3);
  const auto files = save_corpus_dir(w.corpora, dir.str("a"));
  const CorpusBundle back = load_corpus_dir(dir.str("a"));
  EXPECT_EQ(back.source_vocab.content_hash(), w.corpora.source_vocab.content_hash());
  EXPECT_EQ(back.target_vocab.content_hash(), w.corpora.target_vocab.content_hash());
  ASSERT_EQ(back.train_tgt.size(), w.corpora.train_tgt.size());
  for (std::size_t i = 0; i < back.train_tgt.size(); ++i) {
    EXPECT_EQ(back.train_tgt.documents[i].tokens, w.corpora.train_tgt.documents[i].tokens);
    EXPECT_EQ(back.train_tgt.documents[i].image_feature, w.corpora.train_tgt.documents[i].image_feature);
  }
  EXPECT_EQ(back.test.size(), 50u);
  save_corpus_dir(back, dir.str("b"));
  for (const auto& f : files) EXPECT_EQ(slurp(dir.str("a/" + f)), slurp(dir.str("b/" + f))) << f;
  EXPECT_THROW(load_corpus_dir(dir.str("missing")), FormatError);
}
