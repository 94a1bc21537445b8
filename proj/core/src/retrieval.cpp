#include "pivotmt/retrieval.hpp"

#include <cmath>

#include "pivotmt/error.hpp"
#include "pivotmt/log.hpp"
#include "pivotmt/random.hpp"

namespace pivotmt {
namespace {

std::vector<double> to_vector(const Tensor& t) { return {t.data().begin(), t.data().end()}; }

}  // namespace

std::size_t argmax_lowest(std::span<const double> scores) {
  if (scores.empty()) throw ContractError("retrieval: empty candidate set");
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

TargetIndex TargetIndex::build(const Model& model, const Corpus& target) {
  std::vector<TargetEntry> entries;
  entries.reserve(target.size());
  for (const Document& d : target.documents) {
    if (!d.image_feature) throw ContractError("target index: document '" + d.id + "' has no image feature");
    TargetEntry e{d.id, d.words, to_vector(model.image().encode(*d.image_feature)), std::nullopt};
    if (model.has_target_encoder()) e.text_embedding = to_vector(model.target().encode(d.tokens));
    entries.push_back(std::move(e));
  }
  return from_entries(std::move(entries));
}

TargetIndex TargetIndex::from_entries(std::vector<TargetEntry> entries) {
  TargetIndex idx;
  idx.has_text_ = !entries.empty();
  for (const auto& e : entries) idx.has_text_ = idx.has_text_ && e.text_embedding.has_value();
  idx.entries_ = std::move(entries);
  return idx;
}

std::size_t TargetIndex::nearest_image(std::span<const double> query) const {
  if (entries_.empty()) throw ContractError("nn_translate: empty index");
  std::vector<double> scores;
  scores.reserve(entries_.size());
  for (const auto& e : entries_) scores.push_back(dot(e.image_embedding, query));
  return argmax_lowest(scores);
}

std::size_t TargetIndex::nearest_description(std::span<const double> query) const {
  if (entries_.empty()) throw ContractError("nn_translate: empty index");
  if (!has_text_) throw UnsupportedModeError("nn_translate_description: index has no description embeddings");
  std::vector<double> scores;
  scores.reserve(entries_.size());
  for (const auto& e : entries_) scores.push_back(dot(*e.text_embedding, query));
  return argmax_lowest(scores);
}

std::size_t nn_translate_image(std::span<const TokenId> query, const TargetIndex& index, const Model& model) {
  if (index.empty()) throw ContractError("nn_translate_image: empty index");
  return index.nearest_image(model.source().encode(query).data());
}

std::size_t nn_translate_description(std::span<const TokenId> query, const TargetIndex& index, const Model& model) {
  if (!model.has_target_encoder()) {
    throw UnsupportedModeError("nn_translate_description: " + to_string(model.spec().kind) +
                               " model has no target encoder");
  }
  if (index.empty()) throw ContractError("nn_translate_description: empty index");
  return index.nearest_description(model.source().encode(query).data());
}

TfidfBaseline::TfidfBaseline(const Corpus& source, const Corpus& target) : source_(&source), target_(&target) {
  if (source.empty() || target.empty()) throw ContractError("tfidf baseline: empty corpus");
  const std::size_t dim = source.feature_dim();
  if (dim == 0 || target.feature_dim() != dim) {
    throw ContractError("tfidf baseline: both corpora need image features of one dimension");
  }
  std::map<std::string, std::size_t> df;
  for (const Document& d : source.documents) {
    std::map<std::string, bool> seen;
    for (const auto& w : d.words) seen[w] = true;
    for (const auto& [w, unused] : seen) ++df[w];
  }
  const double n = static_cast<double>(source.size());
  for (const auto& [w, count] : df) idf_[w] = std::log(n / static_cast<double>(count));
  for (const Document& d : source.documents) {
    auto w = weights(d.words);
    double norm = 0.0;
    for (const auto& [t, v] : w) norm += v * v;
    doc_weights_.push_back(std::move(w));
    doc_norms_.push_back(std::sqrt(norm));
  }
}

double TfidfBaseline::idf(const std::string& token) const {
  auto it = idf_.find(token);
  return it == idf_.end() ? 0.0 : it->second;
}

std::map<std::string, double> TfidfBaseline::weights(const std::vector<std::string>& tokens) const {
  std::map<std::string, double> tf;
  for (const auto& t : tokens) {
    if (idf_.count(t)) tf[t] += 1.0;
  }
  for (auto& [t, v] : tf) v *= idf_.at(t);
  return tf;
}

std::size_t TfidfBaseline::nearest_source(const std::vector<std::string>& query) const {
  const auto q = weights(query);
  double q_norm = 0.0;
  for (const auto& [t, v] : q) q_norm += v * v;
  q_norm = std::sqrt(q_norm);
  if (q_norm == 0.0) {
    warn("tfidf baseline: query has no known weighted terms; using source document 0");
    return 0;
  }
  std::vector<double> scores(doc_weights_.size(), 0.0);
  for (std::size_t i = 0; i < doc_weights_.size(); ++i) {
    if (doc_norms_[i] == 0.0) continue;
    double s = 0.0;
    for (const auto& [t, v] : q) {
      auto it = doc_weights_[i].find(t);
      if (it != doc_weights_[i].end()) s += v * it->second;
    }
    scores[i] = s / (q_norm * doc_norms_[i]);
  }
  return argmax_lowest(scores);
}

std::size_t TfidfBaseline::nearest_target(std::size_t source_doc) const {
  const auto& pivot = *source_->documents.at(source_doc).image_feature;
  std::vector<double> neg_dist;
  neg_dist.reserve(target_->size());
  for (const Document& d : target_->documents) {
    double s = 0.0;
    for (std::size_t k = 0; k < pivot.size(); ++k) {
      const double diff = static_cast<double>((*d.image_feature)[k]) - static_cast<double>(pivot[k]);
      s += diff * diff;
    }
    neg_dist.push_back(-s);
  }
  return argmax_lowest(neg_dist);
}

std::size_t TfidfBaseline::translate(const std::vector<std::string>& query) const {
  return nearest_target(nearest_source(query));
}

std::size_t random_baseline(std::size_t corpus_size, std::uint64_t seed, std::size_t query_index) {
  if (corpus_size == 0) throw ContractError("random baseline: empty corpus");
  Rng rng(mix_seed(seed, 0x72616e646f6d, query_index));
  return uniform_index(rng, corpus_size);
}

}  // namespace pivotmt
