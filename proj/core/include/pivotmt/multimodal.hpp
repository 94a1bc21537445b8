#pragma once

#include <cstddef>
#include <span>

#include "pivotmt/batching.hpp"
#include "pivotmt/encoders.hpp"
#include "pivotmt/graph.hpp"
#include "pivotmt/random.hpp"

namespace pivotmt {

enum class NegativeMode { all_in_batch, sampled_k };
enum class Reduction { mean, sum };

struct RankLossConfig {
  double alpha = 0.1;
  NegativeMode negatives = NegativeMode::all_in_batch;
  // Negatives drawn per anchor in sampled_k mode (capped at batch - 1).
  std::size_t sampled_k = 1;
  // Adds the text-anchored term (text k against images j != k).
  bool symmetric = false;
  // mean: divided by the number of anchors; sum: the corpus-sum form.
  Reduction reduction = Reduction::mean;

  void validate() const;
};

// Dot product of two unit-norm embeddings.
double similarity(std::span<const double> u, std::span<const double> v);

// Hinge ranking loss over index-aligned rows. For every anchor k and every
// negative j != k: max(0, alpha - s(a_k, p_k) + s(a_k, p_j)). Throws
// ContractError for batches smaller than 2. `rng` is required in sampled_k
// mode.
Var rank_loss(Graph& g, Var anchors, Var positives, const RankLossConfig& cfg, Rng* rng = nullptr);

// Source-side loss: rank loss over (E^v(i^s), E^s(d^s)).
Var encoder_loss_two_way(Graph& g, const ImageEncoder& image, const SeqEncoder& source, const Batch& src_batch,
                         const RankLossConfig& cfg, Rng* rng = nullptr);

// Two-way term on the source batch plus the same loss over
// (E^v(i^t), E^t(d^t)) on the target batch.
Var encoder_loss_three_way(Graph& g, const ImageEncoder& image, const SeqEncoder& source, const SeqEncoder& target,
                           const Batch& src_batch, const Batch& tgt_batch, const RankLossConfig& cfg,
                           Rng* rng = nullptr);

}  // namespace pivotmt
