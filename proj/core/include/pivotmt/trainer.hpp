#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pivotmt/adam.hpp"
#include "pivotmt/batching.hpp"
#include "pivotmt/checkpoint.hpp"
#include "pivotmt/config.hpp"
#include "pivotmt/corpus.hpp"
#include "pivotmt/loss_log.hpp"
#include "pivotmt/model.hpp"

namespace pivotmt {

// Counts validations since the best loss; stops after `patience` of them.
class EarlyStopping {
 public:
  explicit EarlyStopping(std::size_t patience);

  // Returns true when `loss` is strictly below the best so far. Non-finite
  // losses never improve.
  bool observe(double loss);
  bool should_stop() const noexcept { return since_best_ >= patience_; }

  double best() const noexcept { return best_; }
  std::size_t best_index() const noexcept { return best_index_; }
  std::size_t observed() const noexcept { return observed_; }

 private:
  std::size_t patience_;
  double best_;
  std::size_t best_index_ = 0;
  std::size_t since_best_ = 0;
  std::size_t observed_ = 0;
};

// One optimization step's batches.
struct StepBatches {
  std::optional<Batch> src;
  std::optional<Batch> tgt;
};

// Shuffled batches of both streams for one epoch. The stream with fewer
// batches is recycled, reshuffled on every pass, until the longer stream is
// used up once.
std::vector<StepBatches> pair_batches(const Corpus& src, const Corpus& tgt, std::size_t batch_size,
                                      std::uint64_t seed, std::size_t epoch);

// J^E on one step: the source term only for two-way models, both terms for
// three-way models (`tgt` required).
Var compute_encoder_loss(Graph& g, const Model& model, const Batch& src, const Batch* tgt, const RankLossConfig& cfg,
                         Rng* rng = nullptr);

// J^D on a target batch: image -> D(E^v(i^t)), description -> D(E^t(d^t)),
// image+description -> the sum of both. Throws ConfigError when the model
// lacks the encoder the mode needs.
Var compute_decoder_loss(Graph& g, const Model& model, const Batch& tgt, DecoderInputs mode);

ModelSpec model_spec_for(const TrainConfig& cfg, const CorpusBundle& corpora, ModelKind kind);
std::size_t default_max_decode_len(const CorpusBundle& corpora);

// Mean decoder NLL of the test references given E^s(source); nullopt when the
// bundle has no test pairs.
std::optional<double> test_loss(const Model& model, const CorpusBundle& corpora, std::size_t batch_size);

struct TrainResult {
  Model model;
  LossLog log;
  std::size_t max_decode_len = 0;
  // Encoder hash at the end of phase 1 and after phase 2 (two-step only).
  std::optional<std::uint64_t> encoder_hash_phase1;
  std::optional<std::uint64_t> encoder_hash_phase2;
  // Set when training stopped on a non-finite loss or gradient; the model
  // then holds the best parameters seen before the failure.
  std::optional<std::string> failure;

  CheckpointMeta meta(const CorpusBundle& corpora, const TrainConfig& cfg) const;
};

TrainResult train_two_step(const TrainConfig& cfg, const CorpusBundle& corpora);
TrainResult train_end_to_end(const TrainConfig& cfg, const CorpusBundle& corpora);
// Dispatches on cfg.strategy.
TrainResult train(const TrainConfig& cfg, const CorpusBundle& corpora);

// Sorted subset of k indices out of n chosen by `seed`; all of them when
// k == 0 or k >= n.
std::vector<std::size_t> subsample_indices(std::size_t n, std::size_t k, std::uint64_t seed);

// Sequence-to-sequence baseline on corpora.parallel_train: E^s output as
// the decoder context. Early stopping watches the training loss. Throws
// ContractError on an empty parallel corpus.
TrainResult train_supervised(const TrainConfig& cfg, const CorpusBundle& corpora);

// Greedy (or beam) translation of tokenized sentences.
std::vector<std::vector<std::string>> translate_sentences(const Model& model, const Vocabulary& source_vocab,
                                                          const Vocabulary& target_vocab,
                                                          const std::vector<std::vector<std::string>>& sentences,
                                                          std::size_t max_len, std::size_t beam_width = 1);

}  // namespace pivotmt
