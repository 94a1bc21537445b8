#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pivotmt/key_value.hpp"
#include "pivotmt/model.hpp"
#include "pivotmt/vocabulary.hpp"

namespace pivotmt {

inline constexpr const char* kCheckpointSchema = "pivotmt-checkpoint-1";
inline constexpr const char* kManifestFile = "model.manifest";
inline constexpr const char* kBlobFile = "model.bin";

struct CheckpointMeta {
  std::uint64_t source_vocab_hash = 0;
  std::uint64_t target_vocab_hash = 0;
  std::size_t max_decode_len = 0;
  // Training configuration snapshot, written as `config.<key>` lines.
  KeyValueConfig config;
};

struct Checkpoint {
  Model model;
  CheckpointMeta meta;
};

// Writes `model.manifest` (key: value lines) and `model.bin` (little-endian
// float32 values in declaration order) into `dir`, creating it if needed.
// Returns the two file paths.
std::vector<std::string> save_checkpoint(const Model& model, const CheckpointMeta& meta, const std::string& dir);

// Throws FormatError on malformed or inconsistent files.
Checkpoint load_checkpoint(const std::string& dir);

// Throws CompatibilityError when either vocabulary differs from the one the
// checkpoint was trained with.
void check_vocabularies(const CheckpointMeta& meta, const Vocabulary& source, const Vocabulary& target);

}  // namespace pivotmt
