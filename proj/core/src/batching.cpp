#include "pivotmt/batching.hpp"

#include <algorithm>

#include "pivotmt/error.hpp"
#include "pivotmt/random.hpp"

namespace pivotmt {

std::vector<TokenId> TokenBatch::column(std::size_t t) const {
  std::vector<TokenId> col(rows);
  for (std::size_t r = 0; r < rows; ++r) col[r] = at(r, t);
  return col;
}

std::vector<std::vector<TokenId>> TokenBatch::unpad() const {
  std::vector<std::vector<TokenId>> out(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    out[r].assign(ids.begin() + static_cast<std::ptrdiff_t>(r * max_len),
                  ids.begin() + static_cast<std::ptrdiff_t>(r * max_len + lengths[r]));
  }
  return out;
}

TokenBatch pad_sequences(const std::vector<std::vector<TokenId>>& sequences) {
  TokenBatch b;
  b.rows = sequences.size();
  for (const auto& s : sequences) {
    const auto len = static_cast<std::size_t>(std::find(s.begin(), s.end(), Vocabulary::kNull) - s.begin());
    b.lengths.push_back(len);
    b.max_len = std::max(b.max_len, len);
  }
  b.ids.assign(b.rows * b.max_len, Vocabulary::kNull);
  for (std::size_t r = 0; r < b.rows; ++r)
    std::copy_n(sequences[r].begin(), b.lengths[r], b.ids.begin() + static_cast<std::ptrdiff_t>(r * b.max_len));
  return b;
}

Batch make_batch(const Corpus& corpus, std::span<const std::size_t> doc_indices) {
  Batch batch;
  batch.doc_indices.assign(doc_indices.begin(), doc_indices.end());
  std::vector<std::vector<TokenId>> seqs;
  seqs.reserve(doc_indices.size());
  for (std::size_t i : doc_indices) seqs.push_back(corpus.documents.at(i).tokens);
  batch.tokens = pad_sequences(seqs);

  const std::size_t dim = corpus.feature_dim();
  if (dim > 0 && !doc_indices.empty()) {
    Tensor f = Tensor::matrix(doc_indices.size(), dim);
    for (std::size_t r = 0; r < doc_indices.size(); ++r) {
      const auto& feat = *corpus.documents[doc_indices[r]].image_feature;
      std::copy(feat.begin(), feat.end(), f.row(r).begin());
    }
    batch.features = std::move(f);
  }
  return batch;
}

std::vector<Batch> make_batches(const Corpus& corpus, std::size_t batch_size, std::uint64_t seed,
                                std::size_t epoch) {
  if (batch_size < 2) throw ConfigError("make_batches: batch_size must be >= 2 for in-batch negatives");
  Rng rng(mix_seed(seed, 0x6261746368ULL, epoch));
  const auto order = shuffled_indices(corpus.size(), rng);
  std::vector<Batch> out;
  for (std::size_t b = 0; b < order.size(); b += batch_size) {
    std::size_t e = std::min(order.size(), b + batch_size);
    if (order.size() - e == 1) e = order.size();
    out.push_back(make_batch(corpus, std::span<const std::size_t>(order).subspan(b, e - b)));
    if (e == order.size()) break;
  }
  return out;
}

std::vector<Batch> fixed_batches(const Corpus& corpus, std::size_t batch_size) {
  if (batch_size < 2) throw ConfigError("fixed_batches: batch_size must be >= 2");
  std::vector<std::size_t> order(corpus.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  for (std::size_t b = 0; b < order.size(); b += batch_size) ranges.emplace_back(b, std::min(order.size(), b + batch_size));
  if (ranges.size() > 1 && ranges.back().second - ranges.back().first == 1) {
    ranges[ranges.size() - 2].second = ranges.back().second;
    ranges.pop_back();
  }
  std::vector<Batch> out;
  for (auto [b, e] : ranges) out.push_back(make_batch(corpus, std::span<const std::size_t>(order).subspan(b, e - b)));
  return out;
}

}  // namespace pivotmt
