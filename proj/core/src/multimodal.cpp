#include "pivotmt/multimodal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pivotmt/error.hpp"
#include "pivotmt/ops.hpp"

namespace pivotmt {
namespace {

Tensor negative_mask(std::size_t n, const RankLossConfig& cfg, Rng* rng) {
  Tensor m = Tensor::matrix(n, n, 1.0);
  for (std::size_t k = 0; k < n; ++k) m(k, k) = 0.0;
  if (cfg.negatives == NegativeMode::all_in_batch || cfg.sampled_k >= n - 1) return m;
  if (rng == nullptr) throw ContractError("rank_loss: sampled negatives need a random stream");
  m.fill(0.0);
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<std::size_t> others;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != k) others.push_back(j);
    }
    for (std::size_t s = 0; s < cfg.sampled_k; ++s) {
      const std::size_t pick = s + uniform_index(*rng, others.size() - s);
      std::swap(others[s], others[pick]);
      m(k, others[s]) = 1.0;
    }
  }
  return m;
}

const Tensor& require_features(const Batch& b, const char* what) {
  if (!b.features) throw ContractError(std::string(what) + ": batch has no image features");
  return *b.features;
}

}  // namespace

void RankLossConfig::validate() const {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ConfigError("rank loss margin must be finite and >= 0");
  if (negatives == NegativeMode::sampled_k && sampled_k < 1) throw ConfigError("sampled_k must be >= 1");
}

double similarity(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw DimensionError("similarity: lengths " + std::to_string(u.size()) + " and " + std::to_string(v.size()));
  }
  return dot(u, v);
}

Var rank_loss(Graph& g, Var anchors, Var positives, const RankLossConfig& cfg, Rng* rng) {
  cfg.validate();
  const Tensor& a = anchors.value();
  const Tensor& p = positives.value();
  if (a.rank() != 2 || a.shape() != p.shape()) {
    throw DimensionError("rank_loss: anchors " + shape_string(a.shape()) + " vs positives " +
                         shape_string(p.shape()));
  }
  const std::size_t n = a.rows();
  if (n < 2) throw ContractError("rank_loss: batch of " + std::to_string(n) + " has no negatives");

  Tensor eye = Tensor::matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) eye(k, k) = 1.0;
  Var ones_col = g.constant(Tensor::matrix(n, 1, 1.0));
  Var ones_row = g.constant(Tensor::matrix(1, n, 1.0));
  Var mask = g.constant(negative_mask(n, cfg, rng));

  // s[k][j] = s(a_k, p_j); diag[k] = s(a_k, p_k)
  Var s = matmul(anchors, transpose(positives));
  Var diag = matmul(mul(s, g.constant(std::move(eye))), ones_col);

  Var image_side = sum(mul(hinge(add_scalar(s - matmul(diag, ones_row), cfg.alpha)), mask));
  Var total = image_side;
  if (cfg.symmetric) {
    // column j: text anchor p_j against images a_k, k != j
    Var text_side = sum(mul(hinge(add_scalar(s - matmul(ones_col, transpose(diag)), cfg.alpha)), transpose(mask)));
    total = image_side + text_side;
  }
  if (cfg.reduction == Reduction::mean) total = scale(total, 1.0 / static_cast<double>(n));
  return total;
}

Var encoder_loss_two_way(Graph& g, const ImageEncoder& image, const SeqEncoder& source, const Batch& src_batch,
                         const RankLossConfig& cfg, Rng* rng) {
  Var img = image.encode(g, require_features(src_batch, "encoder_loss"));
  Var txt = source.encode(g, src_batch.tokens);
  return rank_loss(g, img, txt, cfg, rng);
}

Var encoder_loss_three_way(Graph& g, const ImageEncoder& image, const SeqEncoder& source, const SeqEncoder& target,
                           const Batch& src_batch, const Batch& tgt_batch, const RankLossConfig& cfg, Rng* rng) {
  Var src_term = encoder_loss_two_way(g, image, source, src_batch, cfg, rng);
  Var img = image.encode(g, require_features(tgt_batch, "encoder_loss"));
  Var txt = target.encode(g, tgt_batch.tokens);
  return src_term + rank_loss(g, img, txt, cfg, rng);
}

}  // namespace pivotmt
