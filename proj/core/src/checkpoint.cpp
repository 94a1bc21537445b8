#include "pivotmt/checkpoint.hpp"

#include <bit>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "pivotmt/config.hpp"
#include "pivotmt/error.hpp"
#include "pivotmt/hashing.hpp"

namespace fs = std::filesystem;

namespace pivotmt {
namespace {

std::uint64_t parse_u64(const std::string& s, const char* what, int base = 10) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw FormatError(std::string("checkpoint: bad ") + what + " '" + s + "'");
  }
  return v;
}

struct TensorEntry {
  std::string name;
  std::size_t rows, cols, offset, length;
};

}  // namespace

std::vector<std::string> save_checkpoint(const Model& model, const CheckpointMeta& meta, const std::string& dir) {
  fs::create_directories(dir);
  const ModelSpec& s = model.spec();
  std::ostringstream m;
  m << "schema: " << kCheckpointSchema << '\n';
  m << "kind: " << to_string(s.kind) << '\n';
  m << "context_mode: " << to_string(s.context) << '\n';
  m << "d_word: " << s.dims.d_word << '\n';
  m << "d_hid: " << s.dims.d_hid << '\n';
  m << "d_emb: " << s.dims.d_emb << '\n';
  m << "d_img: " << s.dims.d_img << '\n';
  m << "d_img_hid: " << s.dims.d_img_hid << '\n';
  m << "source_vocab_size: " << s.source_vocab << '\n';
  m << "target_vocab_size: " << s.target_vocab << '\n';
  m << "source_vocab_hash: " << hex64(meta.source_vocab_hash) << '\n';
  m << "target_vocab_hash: " << hex64(meta.target_vocab_hash) << '\n';
  m << "max_decode_len: " << meta.max_decode_len << '\n';
  for (const auto& [k, v] : meta.config.entries()) m << "config." << k << ": " << v << '\n';

  std::string blob;
  std::size_t offset = 0;
  for (const Parameter& p : model.store()) {
    const std::size_t length = p.value.size() * 4;
    m << "tensor: " << p.name << ' ' << p.value.rows() << ' ' << p.value.cols() << ' ' << offset << ' ' << length
      << '\n';
    for (double v : p.value.data()) {
      const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
      for (int b = 0; b < 4; ++b) blob.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
    }
    offset += length;
  }

  const std::string manifest_path = (fs::path(dir) / kManifestFile).string();
  const std::string blob_path = (fs::path(dir) / kBlobFile).string();
  std::ofstream mf(manifest_path, std::ios::binary);
  mf << m.str();
  std::ofstream bf(blob_path, std::ios::binary);
  bf.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  if (!mf || !bf) throw FormatError("checkpoint: cannot write into " + dir);
  return {manifest_path, blob_path};
}

Checkpoint load_checkpoint(const std::string& dir) {
  const fs::path manifest_path = fs::path(dir) / kManifestFile;
  const fs::path blob_path = fs::path(dir) / kBlobFile;
  std::ifstream mf(manifest_path);
  if (!mf) throw FormatError("checkpoint: cannot read " + manifest_path.string());

  std::map<std::string, std::string> fields;
  KeyValueConfig config;
  std::vector<TensorEntry> tensors;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(mf, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto colon = line.find(": ");
    if (colon == std::string::npos) {
      throw FormatError("checkpoint: " + manifest_path.string() + ":" + std::to_string(lineno) + ": expected 'key: value'");
    }
    std::string key = line.substr(0, colon);
    std::string value = line.substr(colon + 2);
    if (key == "tensor") {
      std::istringstream in(value);
      TensorEntry e{};
      if (!(in >> e.name >> e.rows >> e.cols >> e.offset >> e.length)) {
        throw FormatError("checkpoint: malformed tensor line " + std::to_string(lineno));
      }
      tensors.push_back(e);
    } else if (key.rfind("config.", 0) == 0) {
      config.set(key.substr(7), value);
    } else if (!fields.emplace(key, value).second) {
      throw FormatError("checkpoint: duplicate key '" + key + "'");
    }
  }
  auto field = [&](const char* k) -> const std::string& {
    auto it = fields.find(k);
    if (it == fields.end()) throw FormatError(std::string("checkpoint: manifest lacks '") + k + "'");
    return it->second;
  };
  if (field("schema") != kCheckpointSchema) throw FormatError("checkpoint: unsupported schema '" + field("schema") + "'");

  ModelSpec spec;
  spec.kind = model_kind_from_string(field("kind"));
  const std::string& cm = field("context_mode");
  if (cm == "init-state") {
    spec.context = ContextMode::init_state;
  } else if (cm == "per-step") {
    spec.context = ContextMode::per_step;
  } else {
    throw FormatError("checkpoint: unknown context_mode '" + cm + "'");
  }
  spec.dims.d_word = parse_u64(field("d_word"), "d_word");
  spec.dims.d_hid = parse_u64(field("d_hid"), "d_hid");
  spec.dims.d_emb = parse_u64(field("d_emb"), "d_emb");
  spec.dims.d_img = parse_u64(field("d_img"), "d_img");
  spec.dims.d_img_hid = parse_u64(field("d_img_hid"), "d_img_hid");
  spec.source_vocab = parse_u64(field("source_vocab_size"), "source_vocab_size");
  spec.target_vocab = parse_u64(field("target_vocab_size"), "target_vocab_size");

  CheckpointMeta meta;
  meta.source_vocab_hash = parse_u64(field("source_vocab_hash"), "source_vocab_hash", 16);
  meta.target_vocab_hash = parse_u64(field("target_vocab_hash"), "target_vocab_hash", 16);
  meta.max_decode_len = parse_u64(field("max_decode_len"), "max_decode_len");
  meta.config = std::move(config);

  std::ifstream bf(blob_path, std::ios::binary);
  if (!bf) throw FormatError("checkpoint: cannot read " + blob_path.string());
  const std::string blob((std::istreambuf_iterator<char>(bf)), std::istreambuf_iterator<char>());

  Model model(spec, 0);
  if (tensors.size() != model.store().size()) {
    throw FormatError("checkpoint: manifest lists " + std::to_string(tensors.size()) + " tensors, model has " +
                      std::to_string(model.store().size()));
  }
  std::size_t i = 0;
  std::size_t expected_offset = 0;
  for (Parameter& p : model.store()) {
    const TensorEntry& e = tensors[i++];
    if (e.name != p.name || e.rows != p.value.rows() || e.cols != p.value.cols()) {
      throw FormatError("checkpoint: tensor '" + e.name + "' does not match parameter '" + p.name + "' " +
                        shape_string(p.value.shape()));
    }
    if (e.offset != expected_offset || e.length != p.value.size() * 4 || e.offset + e.length > blob.size()) {
      throw FormatError("checkpoint: bad offset/length for tensor '" + e.name + "'");
    }
    auto dst = p.value.data();
    for (std::size_t k = 0; k < dst.size(); ++k) {
      std::uint32_t bits = 0;
      for (int b = 0; b < 4; ++b) {
        bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(blob[e.offset + 4 * k + b])) << (8 * b);
      }
      dst[k] = static_cast<double>(std::bit_cast<float>(bits));
    }
    expected_offset += e.length;
  }
  if (expected_offset != blob.size()) throw FormatError("checkpoint: trailing bytes in " + blob_path.string());
  return Checkpoint{std::move(model), std::move(meta)};
}

void check_vocabularies(const CheckpointMeta& meta, const Vocabulary& source, const Vocabulary& target) {
  if (source.content_hash() != meta.source_vocab_hash) {
    throw CompatibilityError("checkpoint: source vocabulary hash " + hex64(source.content_hash()) +
                             " differs from the trained " + hex64(meta.source_vocab_hash));
  }
  if (target.content_hash() != meta.target_vocab_hash) {
    throw CompatibilityError("checkpoint: target vocabulary hash " + hex64(target.content_hash()) +
                             " differs from the trained " + hex64(meta.target_vocab_hash));
  }
}

}  // namespace pivotmt
