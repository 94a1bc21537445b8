#include "pivotmt/model.hpp"

#include <bit>

#include "pivotmt/error.hpp"
#include "pivotmt/hashing.hpp"
#include "pivotmt/random.hpp"

namespace pivotmt {

std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::two_way: return "two-way";
    case ModelKind::three_way: return "three-way";
    case ModelKind::supervised: return "supervised";
  }
  return "?";
}

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "two-way") return ModelKind::two_way;
  if (s == "three-way") return ModelKind::three_way;
  if (s == "supervised") return ModelKind::supervised;
  throw FormatError("unknown model kind '" + s + "'");
}

Model::Model(const ModelSpec& spec, std::uint64_t seed) : spec_(spec), store_(std::make_unique<ParameterStore>()) {
  if (spec.source_vocab <= Vocabulary::kSpecialCount || spec.target_vocab <= Vocabulary::kSpecialCount) {
    throw ContractError("model: vocabularies must contain ordinary tokens");
  }
  Rng rng(mix_seed(seed, 0x6d6f64656c));
  if (spec.kind != ModelKind::supervised) image_.emplace(*store_, "image", spec.dims, rng);
  source_.emplace(*store_, "source", spec.source_vocab, spec.dims, rng);
  if (spec.kind == ModelKind::three_way) target_.emplace(*store_, "target", spec.target_vocab, spec.dims, rng);
  decoder_.emplace(*store_, "decoder", spec.target_vocab, spec.dims, spec.context, rng);
}

const ImageEncoder& Model::image() const {
  if (!image_) throw UnsupportedModeError("model: " + to_string(spec_.kind) + " model has no image encoder");
  return *image_;
}

const SeqEncoder& Model::target() const {
  if (!target_) throw UnsupportedModeError("model: " + to_string(spec_.kind) + " model has no target encoder");
  return *target_;
}

std::vector<Parameter*> Model::parameters() {
  std::vector<Parameter*> out;
  for (Parameter& p : *store_) out.push_back(&p);
  return out;
}

std::vector<Parameter*> Model::encoder_parameters() {
  std::vector<Parameter*> out;
  if (image_) out = image_->parameters();
  for (Parameter* p : source_->parameters()) out.push_back(p);
  if (target_) {
    for (Parameter* p : target_->parameters()) out.push_back(p);
  }
  return out;
}

void Model::set_encoders_frozen(bool frozen) {
  for (Parameter* p : encoder_parameters()) p->frozen = frozen;
}

std::vector<Tensor> Model::snapshot() const {
  std::vector<Tensor> out;
  out.reserve(store_->size());
  for (const Parameter& p : *store_) out.push_back(p.value);
  return out;
}

void Model::restore(const std::vector<Tensor>& values) {
  if (values.size() != store_->size()) throw ContractError("model: snapshot has the wrong parameter count");
  std::size_t i = 0;
  for (Parameter& p : *store_) {
    if (values[i].shape() != p.value.shape()) throw ContractError("model: snapshot shape mismatch for " + p.name);
    p.value = values[i++];
  }
}

std::vector<TokenId> Model::translate(std::span<const TokenId> source, std::size_t max_len,
                                      std::size_t beam_width) const {
  const Tensor context = source_->encode(source);
  if (beam_width <= 1) return decoder_->greedy_decode(context, max_len);
  return decoder_->beam_decode(context, beam_width, max_len);
}

std::uint64_t hash_parameters(std::span<Parameter* const> params) {
  Fnv1a h;
  for (const Parameter* p : params) {
    h.update(p->name);
    for (double v : p->value.data()) {
      const auto bits = std::bit_cast<std::uint64_t>(v);
      unsigned char bytes[8];
      for (int b = 0; b < 8; ++b) bytes[b] = static_cast<unsigned char>(bits >> (8 * b));
      h.update(bytes);
    }
  }
  return h.digest();
}

}  // namespace pivotmt
