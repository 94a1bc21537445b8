#include "pivotmt/synth.hpp"

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "pivotmt/error.hpp"
#include "pivotmt/random.hpp"
#include "pivotmt/text.hpp"

namespace pivotmt {
namespace {

constexpr std::array<const char*, 8> kColorsA = {"red", "blue", "green", "yellow", "white", "black", "brown", "pink"};
constexpr std::array<const char*, 8> kColorsB = {"rot", "blau", "gruen", "gelb", "weiss", "schwarz", "braun", "rosa"};
constexpr std::array<const char*, 8> kObjectsA = {"dog", "cat", "horse", "bird", "man", "woman", "boy", "girl"};
constexpr std::array<const char*, 8> kObjectsB = {"hund", "katze", "pferd", "vogel",
                                                  "mann", "frau",  "junge", "maedchen"};
constexpr std::array<const char*, 5> kActionsA = {"runs", "sits", "jumps", "sleeps", "swims"};
constexpr std::array<const char*, 5> kActionsB = {"rennt", "sitzt", "springt", "schlaeft", "schwimmt"};

std::vector<float> scene_feature(const Scene& s, const WorldConfig& cfg, Rng& rng) {
  std::vector<float> f(cfg.feature_dim(), 0.0f);
  f[s.color] = 1.0f;
  f[cfg.colors + s.object] = 1.0f;
  f[cfg.colors + cfg.objects + s.action] = 1.0f;
  if (cfg.sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, cfg.sigma);
    for (float& v : f) v = static_cast<float>(v + noise(rng));
  }
  return f;
}

}  // namespace

WorldConfig WorldConfig::from(const KeyValueConfig& kv) {
  WorldConfig c;
  c.colors = kv.get_uint("colors", c.colors);
  c.objects = kv.get_uint("objects", c.objects);
  c.actions = kv.get_uint("actions", c.actions);
  c.scenes = kv.get_uint("scenes", c.scenes);
  c.sigma = kv.get_double("sigma", c.sigma);
  c.noise_dims = kv.get_uint("noise_dims", c.noise_dims);
  c.train_src = kv.get_uint("train_src", c.train_src);
  c.train_tgt = kv.get_uint("train_tgt", c.train_tgt);
  c.val_src = kv.get_uint("val_src", c.val_src);
  c.val_tgt = kv.get_uint("val_tgt", c.val_tgt);
  c.test = kv.get_uint("test", c.test);
  c.min_count = kv.get_uint("min_count", c.min_count);
  kv.reject_unknown();
  c.validate();
  return c;
}

KeyValueConfig WorldConfig::to_key_values() const {
  KeyValueConfig kv;
  kv.set("colors", std::to_string(colors));
  kv.set("objects", std::to_string(objects));
  kv.set("actions", std::to_string(actions));
  kv.set("scenes", std::to_string(scenes));
  kv.set("sigma", format_number(sigma));
  kv.set("noise_dims", std::to_string(noise_dims));
  kv.set("train_src", std::to_string(train_src));
  kv.set("train_tgt", std::to_string(train_tgt));
  kv.set("val_src", std::to_string(val_src));
  kv.set("val_tgt", std::to_string(val_tgt));
  kv.set("test", std::to_string(test));
  kv.set("min_count", std::to_string(min_count));
  return kv;
}

void WorldConfig::validate() const {
  if (colors < 1 || colors > kColorsA.size()) throw ConfigError("world: colors must be in [1, 8]");
  if (objects < 1 || objects > kObjectsA.size()) throw ConfigError("world: objects must be in [1, 8]");
  if (actions < 1 || actions > kActionsA.size()) throw ConfigError("world: actions must be in [1, 5]");
  if (!(sigma >= 0.0)) throw ConfigError("world: sigma must be >= 0");
  if (train_src < 2 || train_tgt < 2) throw ConfigError("world: training splits need at least 2 scenes");
  if (min_count < 1) throw ConfigError("world: min_count must be >= 1");
  const std::size_t need = train_src + train_tgt + val_src + val_tgt + test;
  if (scenes < need) {
    throw ConfigError("world: " + std::to_string(scenes) + " scenes cannot fill splits totalling " +
                      std::to_string(need));
  }
  if (scenes > need) {
    throw ConfigError("world: splits total " + std::to_string(need) + " but scenes = " + std::to_string(scenes));
  }
}

std::vector<std::string> source_sentence(const Scene& s) {
  return {"a", kColorsA[s.color], kObjectsA[s.object], kActionsA[s.action], "."};
}

std::vector<std::string> target_sentence(const Scene& s) {
  return {kActionsB[s.action], kObjectsB[s.object], kColorsB[s.color], "."};
}

SynthWorld synth_generate(const WorldConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  SynthWorld w;
  Rng rng(mix_seed(seed, 0x73796e7468ULL));
  for (std::size_t i = 0; i < cfg.scenes; ++i) {
    Scene s;
    char buf[32];
    std::snprintf(buf, sizeof buf, "scene-%05zu", i);
    s.id = buf;
    s.color = uniform_index(rng, cfg.colors);
    s.object = uniform_index(rng, cfg.objects);
    s.action = uniform_index(rng, cfg.actions);
    w.scenes.push_back(std::move(s));
  }
  std::vector<std::vector<float>> features;
  features.reserve(cfg.scenes);
  for (const auto& s : w.scenes) features.push_back(scene_feature(s, cfg, rng));

  struct Range {
    std::size_t begin, end;
  };
  std::size_t cursor = 0;
  auto take = [&](std::size_t n) {
    Range r{cursor, cursor + n};
    cursor += n;
    return r;
  };
  const Range r_train_src = take(cfg.train_src);
  const Range r_train_tgt = take(cfg.train_tgt);
  const Range r_val_src = take(cfg.val_src);
  const Range r_val_tgt = take(cfg.val_tgt);
  const Range r_test = take(cfg.test);

  auto sentences = [&](Range r, bool target) {
    std::vector<std::vector<std::string>> out;
    for (std::size_t i = r.begin; i < r.end; ++i)
      out.push_back(target ? target_sentence(w.scenes[i]) : source_sentence(w.scenes[i]));
    return out;
  };
  auto ids = [&](Range r) {
    std::vector<std::string> out;
    for (std::size_t i = r.begin; i < r.end; ++i) out.push_back(w.scenes[i].id);
    return out;
  };
  auto feats = [&](Range r) {
    FeatureMatrix m;
    m.count = r.end - r.begin;
    m.dim = cfg.feature_dim();
    for (std::size_t i = r.begin; i < r.end; ++i) m.values.insert(m.values.end(), features[i].begin(), features[i].end());
    return m;
  };

  CorpusBundle& b = w.corpora;
  b.source_vocab = Vocabulary::build(sentences(r_train_src, false), cfg.min_count);
  b.target_vocab = Vocabulary::build(sentences(r_train_tgt, true), cfg.min_count);

  auto make = [&](Split split, Language lang, Range r) {
    const FeatureMatrix m = feats(r);
    return make_corpus(split, lang, ids(r), sentences(r, lang == Language::target), &m,
                       lang == Language::source ? b.source_vocab : b.target_vocab);
  };
  b.train_src = make(Split::train_src, Language::source, r_train_src);
  b.train_tgt = make(Split::train_tgt, Language::target, r_train_tgt);
  b.val_src = make(Split::val_src, Language::source, r_val_src);
  b.val_tgt = make(Split::val_tgt, Language::target, r_val_tgt);

  auto parallel = [&](Range r) {
    ParallelCorpus pc;
    for (std::size_t i = r.begin; i < r.end; ++i) {
      ParallelPair p;
      p.id = w.scenes[i].id;
      p.source_words = source_sentence(w.scenes[i]);
      p.source_tokens = b.source_vocab.encode(p.source_words);
      p.references.push_back(target_sentence(w.scenes[i]));
      pc.pairs.push_back(std::move(p));
    }
    return pc;
  };
  b.test = parallel(r_test);
  b.parallel_train = parallel(r_train_src);

  for (const auto& p : b.test.pairs) w.oracle.emplace_back(join_tokens(p.source_words), join_tokens(p.references[0]));
  b.validate();
  return w;
}

std::vector<std::string> save_synth_world(const SynthWorld& world, const std::string& dir) {
  auto written = save_corpus_dir(world.corpora, dir);
  const auto path = std::filesystem::path(dir) / "oracle.tsv";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + path.string() + "'");
  for (const auto& [a, b] : world.oracle) out << a << '\t' << b << '\n';
  written.push_back("oracle.tsv");
  return written;
}

}  // namespace pivotmt
