#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pivotmt/corpus.hpp"
#include "pivotmt/key_value.hpp"

namespace pivotmt {

// Grounded toy world: each scene is a (color, object, action) tuple.
// Language A says "a <color> <object> <action> ."; language B uses its own
// lexicon with the attribute order reversed: "<action> <object> <color> .".
// Image features are the concatenated attribute one-hots, followed by
// `noise_dims` distractor dimensions, with N(0, sigma^2) noise on every entry.
struct WorldConfig {
  std::size_t colors = 5;
  std::size_t objects = 6;
  std::size_t actions = 3;
  std::size_t scenes = 600;
  double sigma = 0.1;
  std::size_t noise_dims = 2;
  std::size_t train_src = 250;
  std::size_t train_tgt = 250;
  std::size_t val_src = 25;
  std::size_t val_tgt = 25;
  std::size_t test = 50;
  std::size_t min_count = 5;

  static WorldConfig from(const KeyValueConfig& kv);
  KeyValueConfig to_key_values() const;
  std::size_t feature_dim() const noexcept { return colors + objects + actions + noise_dims; }
  // Throws ConfigError for lexicon overflow, negative sigma, or split sizes
  // that do not add up to the scene count.
  void validate() const;
};

struct Scene {
  std::string id;
  std::size_t color = 0;
  std::size_t object = 0;
  std::size_t action = 0;
};

std::vector<std::string> source_sentence(const Scene& s);
std::vector<std::string> target_sentence(const Scene& s);

struct SynthWorld {
  CorpusBundle corpora;
  std::vector<Scene> scenes;
  // Test split: (language A sentence, language B sentence), in split order.
  std::vector<std::pair<std::string, std::string>> oracle;
};

// All draws come from `seed`. Scenes are sampled with replacement; the splits
// take consecutive, disjoint scene ranges in the order train_src, train_tgt,
// val_src, val_tgt, test.
SynthWorld synth_generate(const WorldConfig& cfg, std::uint64_t seed);

// Writes the corpus directory plus `oracle.tsv`; returns written files.
std::vector<std::string> save_synth_world(const SynthWorld& world, const std::string& dir);

}  // namespace pivotmt
