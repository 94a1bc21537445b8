#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pivotmt/corpus.hpp"
#include "pivotmt/model.hpp"

namespace pivotmt {

// Index of the largest score; the lowest index wins ties. Throws
// ContractError on an empty list.
std::size_t argmax_lowest(std::span<const double> scores);

struct TargetEntry {
  std::string id;
  std::vector<std::string> words;
  std::vector<double> image_embedding;
  // Present only when the model has a target encoder.
  std::optional<std::vector<double>> text_embedding;
};

// Target-side candidates embedded once with a trained model.
class TargetIndex {
 public:
  // Every document needs an image feature.
  static TargetIndex build(const Model& model, const Corpus& target);

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  bool has_text_embeddings() const noexcept { return has_text_; }
  const TargetEntry& operator[](std::size_t i) const { return entries_[i]; }

  // Argmax over s(candidate, query) by image or by description embedding.
  std::size_t nearest_image(std::span<const double> query) const;
  std::size_t nearest_description(std::span<const double> query) const;

  static TargetIndex from_entries(std::vector<TargetEntry> entries);

 private:
  std::vector<TargetEntry> entries_;
  bool has_text_ = false;
};

// Retrieves the target description whose image is nearest to E^s(query).
std::size_t nn_translate_image(std::span<const TokenId> query, const TargetIndex& index, const Model& model);
// Retrieves the target description nearest to E^s(query) under E^t. Throws
// UnsupportedModeError for models without a target encoder.
std::size_t nn_translate_description(std::span<const TokenId> query, const TargetIndex& index, const Model& model);

// Two-stage baseline: the source document with the most similar TF-IDF
// vector (raw term counts, idf = ln(N / df) over the source corpus, cosine),
// then the target document whose image feature is closest to that
// document's feature in Euclidean distance.
class TfidfBaseline {
 public:
  TfidfBaseline(const Corpus& source, const Corpus& target);

  double idf(const std::string& token) const;
  // Sparse tf-idf weights of a token list; tokens unseen in the source corpus
  // are dropped.
  std::map<std::string, double> weights(const std::vector<std::string>& tokens) const;

  // Stage 1. All-unseen queries fall back to document 0 with a warning.
  std::size_t nearest_source(const std::vector<std::string>& query) const;
  // Stage 2.
  std::size_t nearest_target(std::size_t source_doc) const;
  std::size_t translate(const std::vector<std::string>& query) const;

 private:
  const Corpus* source_;
  const Corpus* target_;
  std::map<std::string, double> idf_;
  std::vector<std::map<std::string, double>> doc_weights_;
  std::vector<double> doc_norms_;
};

// Uniform draw from [0, corpus_size) determined by (seed, query_index).
std::size_t random_baseline(std::size_t corpus_size, std::uint64_t seed, std::size_t query_index);

}  // namespace pivotmt
