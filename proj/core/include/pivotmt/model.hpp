#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pivotmt/decoder.hpp"
#include "pivotmt/encoders.hpp"
#include "pivotmt/graph.hpp"

namespace pivotmt {

// two_way: E^s, E^v, D^t. three_way: adds E^t. supervised: E^s and D^t only.
enum class ModelKind { two_way, three_way, supervised };

std::string to_string(ModelKind k);
ModelKind model_kind_from_string(const std::string& s);

struct ModelSpec {
  ModelKind kind = ModelKind::three_way;
  ModelDims dims;
  ContextMode context = ContextMode::init_state;
  std::size_t source_vocab = 0;
  std::size_t target_vocab = 0;

  bool operator==(const ModelSpec&) const = default;
};

// Owns the parameter store and the modules built on it. Parameters are
// created in a fixed order (image, source, target, decoder), so a spec and a
// seed determine every initial value.
class Model {
 public:
  Model(const ModelSpec& spec, std::uint64_t seed);
  Model(Model&&) noexcept = default;
  Model& operator=(Model&&) noexcept = default;

  const ModelSpec& spec() const noexcept { return spec_; }
  ParameterStore& store() noexcept { return *store_; }
  const ParameterStore& store() const noexcept { return *store_; }

  bool has_image_encoder() const noexcept { return image_.has_value(); }
  bool has_target_encoder() const noexcept { return target_.has_value(); }
  // Throw UnsupportedModeError when the module is absent from this topology.
  const ImageEncoder& image() const;
  const SeqEncoder& source() const { return *source_; }
  const SeqEncoder& target() const;
  const Decoder& decoder() const { return *decoder_; }

  std::vector<Parameter*> parameters();
  std::vector<Parameter*> encoder_parameters();
  void set_encoders_frozen(bool frozen);

  std::vector<Tensor> snapshot() const;
  void restore(const std::vector<Tensor>& values);

  // Source tokens -> target tokens through E^s and D^t.
  std::vector<TokenId> translate(std::span<const TokenId> source, std::size_t max_len,
                                 std::size_t beam_width = 1) const;

 private:
  ModelSpec spec_;
  std::unique_ptr<ParameterStore> store_;
  std::optional<ImageEncoder> image_;
  std::optional<SeqEncoder> source_;
  std::optional<SeqEncoder> target_;
  std::optional<Decoder> decoder_;
};

// FNV-1a over each parameter's name and the little-endian bytes of its
// stored values.
std::uint64_t hash_parameters(std::span<Parameter* const> params);

}  // namespace pivotmt
