#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "pivotmt/decoder.hpp"
#include "pivotmt/key_value.hpp"
#include "pivotmt/multimodal.hpp"

namespace pivotmt {

enum class Topology { two_way, three_way };
enum class Strategy { two_step, end_to_end };
enum class DecoderInputs { image, description, image_description };
enum class Preset { desk, full };

std::string to_string(Topology t);
std::string to_string(Strategy s);
std::string to_string(DecoderInputs d);
std::string to_string(Preset p);
std::string to_string(ContextMode m);

struct TrainConfig {
  Topology topology = Topology::three_way;
  Strategy strategy = Strategy::end_to_end;
  DecoderInputs decoder_inputs = DecoderInputs::image;

  double alpha = 0.1;
  double lambda = 100.0;
  NegativeMode negatives = NegativeMode::all_in_batch;
  std::size_t sampled_k = 1;
  bool symmetric = false;
  Reduction reduction = Reduction::mean;

  std::size_t batch_size = 32;
  double learning_rate = 2e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t patience = 5;
  std::size_t max_epochs = 50;
  std::uint64_t seed = 1;

  Preset preset = Preset::desk;
  ContextMode context_mode = ContextMode::init_state;
  // 0 means twice the longest training sentence.
  std::size_t max_decode_len = 0;
  std::size_t beam_width = 1;
  bool log_wall_time = false;

  // Supervised baseline: parallel pairs to keep (0 = all).
  std::size_t subsample = 0;

  // Reads every key, rejects unknown ones, then validates.
  static TrainConfig from(const KeyValueConfig& kv);
  KeyValueConfig to_key_values() const;
  // Throws ConfigError on out-of-range values and on decoder inputs that need
  // a target encoder with a two-way topology.
  void validate() const;

  RankLossConfig rank_loss() const;
  bool uses_image_decoder_input() const noexcept { return decoder_inputs != DecoderInputs::description; }
  bool uses_description_decoder_input() const noexcept { return decoder_inputs != DecoderInputs::image; }
};

}  // namespace pivotmt
