#include "pivotmt/vocabulary.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "pivotmt/error.hpp"
#include "pivotmt/hashing.hpp"

namespace pivotmt {
namespace {

constexpr const char* kSpecialNames[] = {"<null>", "<unk>", "<bos>", "<eos>"};

}  // namespace

Vocabulary::Vocabulary() {
  for (const char* name : kSpecialNames) add(name, 0);
}

void Vocabulary::add(std::string token, std::size_t count) {
  index_.emplace(token, tokens_.size());
  tokens_.push_back(std::move(token));
  counts_.push_back(count);
}

Vocabulary Vocabulary::build(const std::vector<std::vector<std::string>>& sentences, std::size_t min_count) {
  if (sentences.empty()) throw ContractError("build_vocabulary: empty corpus");
  std::map<std::string, std::size_t> counts;
  for (const auto& s : sentences)
    for (const auto& t : s) ++counts[t];

  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [tok, n] : counts) {
    if (n >= min_count && std::find(std::begin(kSpecialNames), std::end(kSpecialNames), tok) == std::end(kSpecialNames))
      kept.emplace_back(tok, n);
  }
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  Vocabulary v;
  v.min_count_ = min_count;
  for (auto& [tok, n] : kept) v.add(tok, n);
  return v;
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open vocabulary '" + path + "'");
  Vocabulary v;
  v.tokens_.clear();
  v.counts_.clear();
  v.index_.clear();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.rfind("#min_count\t", 0) == 0) {
      v.min_count_ = std::stoul(line.substr(11));
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw FormatError(path + ":" + std::to_string(line_no) + ": expected token<TAB>count");
    }
    std::string tok = line.substr(0, tab);
    if (v.index_.count(tok)) throw FormatError(path + ": duplicate token '" + tok + "'");
    v.add(std::move(tok), std::stoul(line.substr(tab + 1)));
  }
  if (v.tokens_.size() < kSpecialCount) throw FormatError(path + ": missing special tokens");
  for (std::size_t i = 0; i < kSpecialCount; ++i) {
    if (v.tokens_[i] != kSpecialNames[i]) throw FormatError(path + ": specials must occupy ids 0-3");
  }
  return v;
}

void Vocabulary::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write vocabulary '" + path + "'");
  out << "#min_count\t" << min_count_ << '\n';
  for (std::size_t i = 0; i < tokens_.size(); ++i) out << tokens_[i] << '\t' << counts_[i] << '\n';
}

TokenId Vocabulary::lookup(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnk : it->second;
}

bool Vocabulary::contains(std::string_view token) const { return index_.count(std::string(token)) > 0; }

const std::string& Vocabulary::token(TokenId id) const {
  if (id >= tokens_.size()) throw ContractError("vocabulary: id " + std::to_string(id) + " out of range");
  return tokens_[id];
}

std::vector<TokenId> Vocabulary::encode(const std::vector<std::string>& words) const {
  std::vector<TokenId> ids;
  ids.reserve(words.size());
  for (const auto& w : words) ids.push_back(lookup(w));
  return ids;
}

std::vector<std::string> Vocabulary::decode(std::span<const TokenId> ids) const {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (TokenId id : ids) out.push_back(token(id));
  return out;
}

std::uint64_t Vocabulary::content_hash() const {
  Fnv1a h;
  for (const auto& t : tokens_) {
    h.update(t);
    h.update(std::string_view("\n"));
  }
  return h.digest();
}

}  // namespace pivotmt
