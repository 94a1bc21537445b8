#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pivotmt/corpus.hpp"
#include "pivotmt/tensor.hpp"

namespace pivotmt {

// rows x max_len token ids, NULL-padded past each row's length.
struct TokenBatch {
  std::size_t rows = 0;
  std::size_t max_len = 0;
  std::vector<TokenId> ids;
  std::vector<std::size_t> lengths;

  TokenId at(std::size_t r, std::size_t t) const { return ids[r * max_len + t]; }
  std::vector<TokenId> column(std::size_t t) const;
  // Original sequences with padding removed.
  std::vector<std::vector<TokenId>> unpad() const;
};

// Pads sequences to the longest one. A sequence's length is the position of
// its first NULL (trailing NULLs in the input are treated as padding).
TokenBatch pad_sequences(const std::vector<std::vector<TokenId>>& sequences);

// Mini-batch of documents: row k of `features` belongs to row k of `tokens`.
struct Batch {
  TokenBatch tokens;
  std::optional<Tensor> features;
  std::vector<std::size_t> doc_indices;

  std::size_t size() const noexcept { return tokens.rows; }
};

Batch make_batch(const Corpus& corpus, std::span<const std::size_t> doc_indices);

// Shuffles the corpus with a stream derived from (seed, epoch) and cuts it
// into consecutive batches; the final short batch is kept, except that a
// lone leftover document joins the batch before it. Throws
// ConfigError when batch_size < 2.
std::vector<Batch> make_batches(const Corpus& corpus, std::size_t batch_size, std::uint64_t seed,
                                std::size_t epoch);

// Batches in corpus order for evaluation. A trailing single-document batch
// is merged into its predecessor so every batch has in-batch negatives.
std::vector<Batch> fixed_batches(const Corpus& corpus, std::size_t batch_size);

}  // namespace pivotmt
