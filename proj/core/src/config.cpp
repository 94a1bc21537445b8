#include "pivotmt/config.hpp"

#include <cmath>

#include "pivotmt/error.hpp"
#include "pivotmt/text.hpp"

namespace pivotmt {
namespace {

template <typename E, std::size_t N>
E parse_enum(const KeyValueConfig& kv, const char* key, E fallback, const std::pair<const char*, E> (&names)[N]) {
  if (!kv.has(key)) return fallback;
  const std::string v = kv.get_string(key, "");
  for (const auto& [name, value] : names) {
    if (v == name) return value;
  }
  std::string allowed;
  for (const auto& [name, value] : names) allowed += std::string(allowed.empty() ? "" : ", ") + name;
  throw ConfigError("config: " + std::string(key) + " must be one of {" + allowed + "}, got '" + v + "'");
}

constexpr std::pair<const char*, Topology> kTopologies[] = {{"two-way", Topology::two_way},
                                                            {"three-way", Topology::three_way}};
constexpr std::pair<const char*, Strategy> kStrategies[] = {{"two-step", Strategy::two_step},
                                                            {"end-to-end", Strategy::end_to_end}};
constexpr std::pair<const char*, DecoderInputs> kInputs[] = {{"image", DecoderInputs::image},
                                                             {"description", DecoderInputs::description},
                                                             {"image+description", DecoderInputs::image_description}};
constexpr std::pair<const char*, Preset> kPresets[] = {{"desk", Preset::desk}, {"full", Preset::full}};
constexpr std::pair<const char*, ContextMode> kContext[] = {{"init-state", ContextMode::init_state},
                                                            {"per-step", ContextMode::per_step}};
constexpr std::pair<const char*, Reduction> kReductions[] = {{"mean", Reduction::mean}, {"sum", Reduction::sum}};
constexpr std::pair<const char*, NegativeMode> kNegatives[] = {{"all-in-batch", NegativeMode::all_in_batch},
                                                               {"sampled-k", NegativeMode::sampled_k}};

template <typename E, std::size_t N>
std::string name_of(E v, const std::pair<const char*, E> (&names)[N]) {
  for (const auto& [name, value] : names) {
    if (value == v) return name;
  }
  return "?";
}

}  // namespace

std::string to_string(Topology t) { return name_of(t, kTopologies); }
std::string to_string(Strategy s) { return name_of(s, kStrategies); }
std::string to_string(DecoderInputs d) { return name_of(d, kInputs); }
std::string to_string(Preset p) { return name_of(p, kPresets); }
std::string to_string(ContextMode m) { return name_of(m, kContext); }

TrainConfig TrainConfig::from(const KeyValueConfig& kv) {
  TrainConfig c;
  c.topology = parse_enum(kv, "topology", c.topology, kTopologies);
  c.strategy = parse_enum(kv, "strategy", c.strategy, kStrategies);
  c.decoder_inputs = parse_enum(kv, "decoder_inputs", c.decoder_inputs, kInputs);
  c.alpha = kv.get_double("alpha", c.alpha);
  c.lambda = kv.get_double("lambda", c.lambda);
  c.negatives = parse_enum(kv, "negatives", c.negatives, kNegatives);
  c.sampled_k = kv.get_uint("sampled_k", c.sampled_k);
  c.symmetric = kv.get_bool("symmetric", c.symmetric);
  c.reduction = parse_enum(kv, "reduction", c.reduction, kReductions);
  c.batch_size = kv.get_uint("batch_size", c.batch_size);
  c.learning_rate = kv.get_double("learning_rate", c.learning_rate);
  c.beta1 = kv.get_double("beta1", c.beta1);
  c.beta2 = kv.get_double("beta2", c.beta2);
  c.epsilon = kv.get_double("epsilon", c.epsilon);
  c.patience = kv.get_uint("patience", c.patience);
  c.max_epochs = kv.get_uint("max_epochs", c.max_epochs);
  c.seed = kv.get_uint("seed", c.seed);
  c.preset = parse_enum(kv, "preset", c.preset, kPresets);
  c.context_mode = parse_enum(kv, "context_mode", c.context_mode, kContext);
  c.max_decode_len = kv.get_uint("max_decode_len", c.max_decode_len);
  c.beam_width = kv.get_uint("beam_width", c.beam_width);
  c.log_wall_time = kv.get_bool("log_wall_time", c.log_wall_time);
  c.subsample = kv.get_uint("subsample", c.subsample);
  kv.reject_unknown();
  c.validate();
  return c;
}

KeyValueConfig TrainConfig::to_key_values() const {
  KeyValueConfig kv;
  kv.set("topology", to_string(topology));
  kv.set("strategy", to_string(strategy));
  kv.set("decoder_inputs", to_string(decoder_inputs));
  kv.set("alpha", format_number(alpha));
  kv.set("lambda", format_number(lambda));
  kv.set("negatives", name_of(negatives, kNegatives));
  kv.set("sampled_k", std::to_string(sampled_k));
  kv.set("symmetric", symmetric ? "true" : "false");
  kv.set("reduction", name_of(reduction, kReductions));
  kv.set("batch_size", std::to_string(batch_size));
  kv.set("learning_rate", format_number(learning_rate));
  kv.set("beta1", format_number(beta1));
  kv.set("beta2", format_number(beta2));
  kv.set("epsilon", format_number(epsilon));
  kv.set("patience", std::to_string(patience));
  kv.set("max_epochs", std::to_string(max_epochs));
  kv.set("seed", std::to_string(seed));
  kv.set("preset", to_string(preset));
  kv.set("context_mode", to_string(context_mode));
  kv.set("max_decode_len", std::to_string(max_decode_len));
  kv.set("beam_width", std::to_string(beam_width));
  kv.set("log_wall_time", log_wall_time ? "true" : "false");
  kv.set("subsample", std::to_string(subsample));
  return kv;
}

void TrainConfig::validate() const {
  if (topology == Topology::two_way && decoder_inputs != DecoderInputs::image) {
    throw ConfigError("config: decoder_inputs=" + to_string(decoder_inputs) +
                      " needs topology=three-way (two-way model has no target encoder)");
  }
  rank_loss().validate();
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("config: lambda must be finite and >= 0");
  if (batch_size < 2) throw ConfigError("config: batch_size must be >= 2");
  if (!(learning_rate > 0.0)) throw ConfigError("config: learning_rate must be > 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ConfigError("config: beta1 and beta2 must lie in [0, 1)");
  }
  if (!(epsilon > 0.0)) throw ConfigError("config: epsilon must be > 0");
  if (patience < 1) throw ConfigError("config: patience must be >= 1");
  if (max_epochs < 1) throw ConfigError("config: max_epochs must be >= 1");
  if (beam_width < 1) throw ConfigError("config: beam_width must be >= 1");
}

RankLossConfig TrainConfig::rank_loss() const {
  RankLossConfig r;
  r.alpha = alpha;
  r.negatives = negatives;
  r.sampled_k = sampled_k;
  r.symmetric = symmetric;
  r.reduction = reduction;
  return r;
}

}  // namespace pivotmt
