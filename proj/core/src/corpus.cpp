#include "pivotmt/corpus.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <unordered_set>

#include "pivotmt/error.hpp"
#include "pivotmt/random.hpp"
#include "pivotmt/text.hpp"

namespace pivotmt {
namespace fs = std::filesystem;

namespace {

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + path + "'");
  for (const auto& l : lines) out << l << '\n';
}

FeatureMatrix corpus_features(const Corpus& c) {
  FeatureMatrix m;
  m.count = c.size();
  m.dim = c.feature_dim();
  for (const auto& d : c.documents) m.values.insert(m.values.end(), d.image_feature->begin(), d.image_feature->end());
  return m;
}

Corpus load_split(const fs::path& dir, Split split, Language lang, const Vocabulary& vocab) {
  const std::string stem = split_name(split);
  const auto sentences = read_descriptions((dir / (stem + ".txt")).string());
  std::vector<std::string> ids;
  if (fs::exists(dir / (stem + ".ids"))) {
    ids = read_lines((dir / (stem + ".ids")).string());
  } else {
    for (std::size_t i = 0; i < sentences.size(); ++i) ids.push_back(stem + ":" + std::to_string(i));
  }
  if (ids.size() != sentences.size()) throw FormatError(stem + ": id count does not match description count");
  std::optional<FeatureFile> feats;
  if (fs::exists(dir / (stem + ".feat"))) feats = load_features((dir / (stem + ".feat")).string());
  return make_corpus(split, lang, ids, sentences, feats ? &feats->matrix : nullptr, vocab);
}

ParallelCorpus load_parallel(const fs::path& src_path, const fs::path& tgt_path, const fs::path& ids_path,
                             const Vocabulary& src_vocab) {
  ParallelCorpus pc;
  if (!fs::exists(src_path) && !fs::exists(tgt_path)) return pc;
  const auto src = read_descriptions(src_path.string());
  const auto tgt = read_descriptions(tgt_path.string());
  if (src.size() != tgt.size()) {
    throw FormatError(src_path.string() + " and " + tgt_path.string() + " differ in line count");
  }
  std::vector<std::string> ids;
  if (fs::exists(ids_path)) ids = read_lines(ids_path.string());
  for (std::size_t i = 0; i < src.size(); ++i) {
    ParallelPair p;
    p.id = i < ids.size() ? ids[i] : std::to_string(i);
    p.source_words = src[i];
    p.source_tokens = src_vocab.encode(src[i]);
    p.references.push_back(tgt[i]);
    pc.pairs.push_back(std::move(p));
  }
  return pc;
}

}  // namespace

std::string split_name(Split s) {
  switch (s) {
    case Split::train_src: return "train_src";
    case Split::train_tgt: return "train_tgt";
    case Split::val_src: return "val_src";
    case Split::val_tgt: return "val_tgt";
    case Split::test_parallel: return "test";
  }
  return "unknown";
}

std::size_t Corpus::feature_dim() const noexcept {
  if (documents.empty() || !documents.front().image_feature) return 0;
  const std::size_t d = documents.front().image_feature->size();
  for (const auto& doc : documents) {
    if (!doc.image_feature || doc.image_feature->size() != d) return 0;
  }
  return d;
}

std::vector<std::vector<std::string>> Corpus::sentences() const {
  std::vector<std::vector<std::string>> out;
  out.reserve(documents.size());
  for (const auto& d : documents) out.push_back(d.words);
  return out;
}

void CorpusBundle::validate() const {
  std::unordered_set<std::string> src_ids;
  for (const auto& d : train_src.documents) src_ids.insert(d.id);
  for (const auto& d : train_tgt.documents) {
    if (src_ids.count(d.id)) throw ContractError("train_src and train_tgt share document id '" + d.id + "'");
  }
  for (const Corpus* c : {&train_src, &train_tgt, &val_src, &val_tgt}) {
    const std::size_t dim = c->feature_dim();
    for (const auto& d : c->documents) {
      if (d.tokens.empty()) throw ContractError(split_name(c->split) + ": document '" + d.id + "' has no tokens");
      if (d.image_feature && d.image_feature->size() != dim) {
        throw ContractError(split_name(c->split) + ": inconsistent image feature dimension");
      }
    }
  }
}

std::size_t CorpusBundle::feature_dim() const {
  const std::size_t d = train_src.feature_dim();
  if (d == 0 || train_tgt.feature_dim() != d) {
    throw ContractError("corpus: training splits need image features of one common dimension");
  }
  return d;
}

std::vector<std::vector<std::string>> read_descriptions(const std::string& path) {
  std::vector<std::vector<std::string>> out;
  const auto lines = read_lines(path);
  out.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    try {
      out.push_back(tokenize(lines[i]));
    } catch (const ContractError&) {
      throw FormatError(path + ":" + std::to_string(i + 1) + ": empty sentence");
    }
  }
  return out;
}

void write_descriptions(const std::string& path, const std::vector<std::vector<std::string>>& sentences) {
  std::vector<std::string> lines;
  lines.reserve(sentences.size());
  for (const auto& s : sentences) lines.push_back(join_tokens(s));
  write_lines(path, lines);
}

Corpus make_corpus(Split split, Language language, const std::vector<std::string>& ids,
                   const std::vector<std::vector<std::string>>& sentences, const FeatureMatrix* features,
                   const Vocabulary& vocab) {
  if (ids.size() != sentences.size()) throw FormatError(split_name(split) + ": id/description count mismatch");
  if (features && features->count != sentences.size()) {
    throw FormatError(split_name(split) + ": " + std::to_string(sentences.size()) + " descriptions but " +
                      std::to_string(features->count) + " feature rows");
  }
  Corpus c;
  c.split = split;
  c.documents.reserve(sentences.size());
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (sentences[i].empty()) throw ContractError(split_name(split) + ": empty sentence at line " + std::to_string(i + 1));
    Document d;
    d.id = ids[i];
    d.language = language;
    d.words = sentences[i];
    d.tokens = vocab.encode(sentences[i]);
    if (features) {
      auto row = features->row(i);
      d.image_feature = std::vector<float>(row.begin(), row.end());
    }
    c.documents.push_back(std::move(d));
  }
  return c;
}

CorpusBundle load_corpus_dir(const std::string& dir_str) {
  const fs::path dir(dir_str);
  if (!fs::is_directory(dir)) throw FormatError("corpus directory '" + dir_str + "' does not exist");
  CorpusBundle b;
  b.source_vocab = Vocabulary::load((dir / "vocab_src.txt").string());
  b.target_vocab = Vocabulary::load((dir / "vocab_tgt.txt").string());
  b.train_src = load_split(dir, Split::train_src, Language::source, b.source_vocab);
  b.train_tgt = load_split(dir, Split::train_tgt, Language::target, b.target_vocab);
  b.val_src = load_split(dir, Split::val_src, Language::source, b.source_vocab);
  b.val_tgt = load_split(dir, Split::val_tgt, Language::target, b.target_vocab);
  b.test = load_parallel(dir / "test_src.txt", dir / "test_tgt.txt", dir / "test.ids", b.source_vocab);
  b.parallel_train =
      load_parallel(dir / "parallel_src.txt", dir / "parallel_tgt.txt", dir / "parallel.ids", b.source_vocab);
  b.validate();
  return b;
}

std::vector<std::string> save_corpus_dir(const CorpusBundle& b, const std::string& dir_str) {
  const fs::path dir(dir_str);
  fs::create_directories(dir);
  std::vector<std::string> written;
  auto path = [&](const std::string& name) {
    written.push_back(name);
    return (dir / name).string();
  };
  b.source_vocab.save(path("vocab_src.txt"));
  b.target_vocab.save(path("vocab_tgt.txt"));
  for (const Corpus* c : {&b.train_src, &b.train_tgt, &b.val_src, &b.val_tgt}) {
    const std::string stem = split_name(c->split);
    write_descriptions(path(stem + ".txt"), c->sentences());
    std::vector<std::string> ids;
    for (const auto& d : c->documents) ids.push_back(d.id);
    write_lines(path(stem + ".ids"), ids);
    if (c->feature_dim() > 0 || c->empty()) save_features(path(stem + ".feat"), corpus_features(*c));
  }
  auto save_parallel = [&](const ParallelCorpus& pc, const std::string& stem) {
    std::vector<std::vector<std::string>> src, tgt;
    std::vector<std::string> ids;
    for (const auto& p : pc.pairs) {
      src.push_back(p.source_words);
      tgt.push_back(p.references.front());
      ids.push_back(p.id);
    }
    write_descriptions(path(stem + "_src.txt"), src);
    write_descriptions(path(stem + "_tgt.txt"), tgt);
    write_lines(path(stem + ".ids"), ids);
  };
  save_parallel(b.test, "test");
  if (!b.parallel_train.empty()) save_parallel(b.parallel_train, "parallel");
  return written;
}

SplitSizes SplitSizes::parse(std::string_view text) {
  std::size_t v[5];
  std::size_t k = 0;
  const char* p = text.data();
  const char* end = text.data() + text.size();
  while (k < 5) {
    auto [next, ec] = std::from_chars(p, end, v[k]);
    if (ec != std::errc()) break;
    ++k;
    p = next;
    if (p == end || *p != ',') break;
    ++p;
  }
  if (k != 5 || p != end) {
    throw ConfigError("split spec '" + std::string(text) + "' must be five counts: train_src,train_tgt,val_src,val_tgt,test");
  }
  return SplitSizes{v[0], v[1], v[2], v[3], v[4]};
}

CorpusBundle split_triplets(const std::vector<std::vector<std::string>>& source,
                            const std::vector<std::vector<std::string>>& target, const FeatureMatrix& features,
                            const SplitSizes& sizes, std::uint64_t seed, std::size_t min_count) {
  const std::size_t n = source.size();
  if (target.size() != n || features.count != n) {
    throw FormatError("prepare: " + std::to_string(n) + " source descriptions, " + std::to_string(target.size()) +
                      " target descriptions and " + std::to_string(features.count) + " feature rows");
  }
  if (sizes.total() > n) {
    throw ConfigError("prepare: split sizes add up to " + std::to_string(sizes.total()) + " but only " +
                      std::to_string(n) + " items exist");
  }
  if (sizes.train_src < 1 || sizes.train_tgt < 1) throw ConfigError("prepare: training splits must be non-empty");

  Rng rng(mix_seed(seed, 0x7072657061));
  const auto order = shuffled_indices(n, rng);
  std::size_t cursor = 0;
  auto take = [&](std::size_t count) {
    std::vector<std::size_t> r(order.begin() + static_cast<std::ptrdiff_t>(cursor),
                               order.begin() + static_cast<std::ptrdiff_t>(cursor + count));
    cursor += count;
    return r;
  };
  const auto i_train_src = take(sizes.train_src);
  const auto i_train_tgt = take(sizes.train_tgt);
  const auto i_val_src = take(sizes.val_src);
  const auto i_val_tgt = take(sizes.val_tgt);
  const auto i_test = take(sizes.test);

  auto pick = [](const std::vector<std::vector<std::string>>& all, const std::vector<std::size_t>& idx) {
    std::vector<std::vector<std::string>> out;
    for (std::size_t i : idx) out.push_back(all[i]);
    return out;
  };
  auto ids = [](const std::vector<std::size_t>& idx) {
    std::vector<std::string> out;
    for (std::size_t i : idx) out.push_back(std::to_string(i));
    return out;
  };
  auto feats = [&](const std::vector<std::size_t>& idx) {
    FeatureMatrix m;
    m.count = idx.size();
    m.dim = features.dim;
    for (std::size_t i : idx) {
      auto row = features.row(i);
      m.values.insert(m.values.end(), row.begin(), row.end());
    }
    return m;
  };
  auto parallel = [&](const std::vector<std::size_t>& idx, const Vocabulary& vocab) {
    ParallelCorpus pc;
    for (std::size_t i : idx) {
      ParallelPair p;
      p.id = std::to_string(i);
      p.source_words = source[i];
      p.source_tokens = vocab.encode(source[i]);
      p.references.push_back(target[i]);
      pc.pairs.push_back(std::move(p));
    }
    return pc;
  };

  CorpusBundle b;
  b.source_vocab = Vocabulary::build(pick(source, i_train_src), min_count);
  b.target_vocab = Vocabulary::build(pick(target, i_train_tgt), min_count);
  auto make = [&](Split split, Language lang, const std::vector<std::size_t>& idx) {
    const FeatureMatrix m = feats(idx);
    return make_corpus(split, lang, ids(idx), pick(lang == Language::source ? source : target, idx), &m,
                       lang == Language::source ? b.source_vocab : b.target_vocab);
  };
  b.train_src = make(Split::train_src, Language::source, i_train_src);
  b.train_tgt = make(Split::train_tgt, Language::target, i_train_tgt);
  b.val_src = make(Split::val_src, Language::source, i_val_src);
  b.val_tgt = make(Split::val_tgt, Language::target, i_val_tgt);
  b.test = parallel(i_test, b.source_vocab);
  b.parallel_train = parallel(i_train_src, b.source_vocab);
  b.validate();
  return b;
}

}  // namespace pivotmt
