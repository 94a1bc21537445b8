#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pivotmt {

using TokenId = std::size_t;

// Bidirectional token <-> id map. Ids 0..3 are the reserved specials;
// ordinary tokens follow by descending training count, ties broken by
// byte-wise token order.
class Vocabulary {
 public:
  static constexpr TokenId kNull = 0;
  static constexpr TokenId kUnk = 1;
  static constexpr TokenId kBos = 2;
  static constexpr TokenId kEos = 3;
  static constexpr std::size_t kSpecialCount = 4;

  Vocabulary();

  // Tokens occurring fewer than `min_count` times are left out and resolve
  // to UNK at lookup. Throws ContractError on an empty corpus.
  static Vocabulary build(const std::vector<std::vector<std::string>>& sentences, std::size_t min_count);

  // File format: one `token<TAB>count` line per id, specials first.
  static Vocabulary load(const std::string& path);
  void save(const std::string& path) const;

  std::size_t size() const noexcept { return tokens_.size(); }
  std::size_t min_count() const noexcept { return min_count_; }
  TokenId lookup(std::string_view token) const;
  bool contains(std::string_view token) const;
  const std::string& token(TokenId id) const;
  std::size_t count(TokenId id) const { return counts_.at(id); }

  std::vector<TokenId> encode(const std::vector<std::string>& words) const;
  std::vector<std::string> decode(std::span<const TokenId> ids) const;

  // Hash of the token sequence in id order; two vocabularies with equal
  // hashes assign identical ids.
  std::uint64_t content_hash() const;

 private:
  void add(std::string token, std::size_t count);

  std::vector<std::string> tokens_;
  std::vector<std::size_t> counts_;
  std::unordered_map<std::string, TokenId> index_;
  std::size_t min_count_ = 1;
};

}  // namespace pivotmt
