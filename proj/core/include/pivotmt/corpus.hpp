#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pivotmt/features.hpp"
#include "pivotmt/vocabulary.hpp"

namespace pivotmt {

enum class Language { source, target };
enum class Split { train_src, train_tgt, val_src, val_tgt, test_parallel };

std::string split_name(Split s);

// One monolingual example: a description and, optionally, its image feature.
struct Document {
  std::string id;
  Language language = Language::source;
  std::vector<std::string> words;
  std::vector<TokenId> tokens;
  std::optional<std::vector<float>> image_feature;
};

struct Corpus {
  Split split = Split::train_src;
  std::vector<Document> documents;

  std::size_t size() const noexcept { return documents.size(); }
  bool empty() const noexcept { return documents.empty(); }
  // Feature dimension shared by every document, or 0 when some document has
  // no image feature.
  std::size_t feature_dim() const noexcept;
  std::vector<std::vector<std::string>> sentences() const;
};

// Source sentence with one or more target references; no image required.
struct ParallelPair {
  std::string id;
  std::vector<std::string> source_words;
  std::vector<TokenId> source_tokens;
  std::vector<std::vector<std::string>> references;
};

struct ParallelCorpus {
  std::vector<ParallelPair> pairs;
  std::size_t size() const noexcept { return pairs.size(); }
  bool empty() const noexcept { return pairs.empty(); }
};

// A prepared corpus directory in memory: the five splits of the zero-resource
// setup plus the source/target vocabularies built from the training splits.
// `parallel_train` carries translations of the train_src sentences and is
// only used by the supervised baseline.
struct CorpusBundle {
  Vocabulary source_vocab;
  Vocabulary target_vocab;
  Corpus train_src{Split::train_src, {}};
  Corpus train_tgt{Split::train_tgt, {}};
  Corpus val_src{Split::val_src, {}};
  Corpus val_tgt{Split::val_tgt, {}};
  ParallelCorpus test;
  ParallelCorpus parallel_train;

  // Throws ContractError when train_src and train_tgt share a document id or
  // documents violate the token/feature invariants.
  void validate() const;
  std::size_t feature_dim() const;
};

// Reads a description file (one sentence per line) through tokenize().
std::vector<std::vector<std::string>> read_descriptions(const std::string& path);
void write_descriptions(const std::string& path, const std::vector<std::vector<std::string>>& sentences);

// Builds documents from aligned descriptions/features; the vocabulary maps
// words to ids. `features` may be empty (no images), otherwise its count
// must equal the number of sentences.
Corpus make_corpus(Split split, Language language, const std::vector<std::string>& ids,
                   const std::vector<std::vector<std::string>>& sentences, const FeatureMatrix* features,
                   const Vocabulary& vocab);

// Sizes of the five disjoint splits, in this order.
struct SplitSizes {
  std::size_t train_src = 0;
  std::size_t train_tgt = 0;
  std::size_t val_src = 0;
  std::size_t val_tgt = 0;
  std::size_t test = 0;

  std::size_t total() const noexcept { return train_src + train_tgt + val_src + val_tgt + test; }
  // "a,b,c,d,e"; throws ConfigError otherwise.
  static SplitSizes parse(std::string_view text);
};

// Builds the zero-resource corpus from aligned triplets (source description,
// target description, image feature) of the same images. The triplets are
// shuffled with `seed` and cut into consecutive ranges, so no image occurs in
// two splits: source-side splits keep only the source description, target-side
// splits only the target one, and the test split keeps both. The train_src
// translations become `parallel_train`. Vocabularies come from the two
// training splits. Throws ConfigError when the sizes exceed the triplet count
// and FormatError when the inputs differ in length.
CorpusBundle split_triplets(const std::vector<std::vector<std::string>>& source,
                            const std::vector<std::vector<std::string>>& target, const FeatureMatrix& features,
                            const SplitSizes& sizes, std::uint64_t seed, std::size_t min_count);

// Prepared corpus directory layout:
//   vocab_src.txt vocab_tgt.txt
//   {train_src,train_tgt,val_src,val_tgt}.{txt,feat,ids}
//   test_src.txt test_tgt.txt test.ids
//   parallel_src.txt parallel_tgt.txt (optional)
CorpusBundle load_corpus_dir(const std::string& dir);
// Returns the list of files written, relative to `dir`.
std::vector<std::string> save_corpus_dir(const CorpusBundle& bundle, const std::string& dir);

}  // namespace pivotmt
