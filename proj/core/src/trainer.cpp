#include "pivotmt/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "pivotmt/error.hpp"
#include "pivotmt/multimodal.hpp"
#include "pivotmt/ops.hpp"

namespace pivotmt {
namespace {

constexpr std::uint64_t kSrcStream = 0x737263;
constexpr std::uint64_t kTgtStream = 0x746774;
constexpr std::uint64_t kNegStream = 0x6e6567;
constexpr std::uint64_t kSupStream = 0x737570;

enum class Objective { encoder, decoder, joint };

const Tensor& features_of(const Batch& b) {
  if (!b.features) throw ContractError("trainer: batch without image features");
  return *b.features;
}

std::vector<TokenId> target_ids(const Vocabulary& vocab, const std::vector<std::string>& words) {
  return vocab.encode(words);
}

// Running mean weighted by rows.
struct Mean {
  double total = 0.0;
  double weight = 0.0;
  void add(double v, double w = 1.0) {
    total += v * w;
    weight += w;
  }
  std::optional<double> value() const {
    if (weight == 0.0) return std::nullopt;
    return total / weight;
  }
};

struct Trainer {
  const TrainConfig& cfg;
  const CorpusBundle& corpora;
  Model& model;
  LossLog& log;
  std::size_t& epoch_counter;
  Rng neg_rng;

  bool three_way() const { return model.spec().kind == ModelKind::three_way; }

  Var encoder_term(Graph& g, const StepBatches& s) {
    return compute_encoder_loss(g, model, *s.src, s.tgt ? &*s.tgt : nullptr, cfg.rank_loss(), &neg_rng);
  }

  std::vector<StepBatches> schedule(Objective obj, std::uint64_t phase_seed, std::size_t epoch) const {
    if (obj == Objective::decoder || (obj == Objective::encoder && !three_way())) {
      const bool src_side = obj == Objective::encoder;
      const Corpus& c = src_side ? corpora.train_src : corpora.train_tgt;
      std::vector<StepBatches> out;
      for (Batch& b : make_batches(c, cfg.batch_size, mix_seed(phase_seed, src_side ? kSrcStream : kTgtStream), epoch)) {
        StepBatches s;
        (src_side ? s.src : s.tgt) = std::move(b);
        out.push_back(std::move(s));
      }
      return out;
    }
    return pair_batches(corpora.train_src, corpora.train_tgt, cfg.batch_size, phase_seed, epoch);
  }

  // Validation loss of the objective on the validation image-text pairs.
  double validate(Objective obj) {
    Mean je_src, je_tgt, jd;
    if (obj != Objective::decoder) {
      const RankLossConfig rl = cfg.rank_loss();
      for (const Batch& b : fixed_batches(corpora.val_src, cfg.batch_size)) {
        Graph g;
        je_src.add(encoder_loss_two_way(g, model.image(), model.source(), b, rl, &neg_rng).item(),
                   static_cast<double>(b.size()));
      }
      if (three_way()) {
        for (const Batch& b : fixed_batches(corpora.val_tgt, cfg.batch_size)) {
          Graph g;
          Var img = model.image().encode(g, features_of(b));
          Var txt = model.target().encode(g, b.tokens);
          je_tgt.add(rank_loss(g, img, txt, rl, &neg_rng).item(), static_cast<double>(b.size()));
        }
      }
    }
    if (obj != Objective::encoder) {
      for (const Batch& b : fixed_batches(corpora.val_tgt, cfg.batch_size)) {
        Graph g;
        jd.add(compute_decoder_loss(g, model, b, cfg.decoder_inputs).item(), static_cast<double>(b.size()));
      }
    }
    const double je = je_src.value().value_or(0.0) + je_tgt.value().value_or(0.0);
    switch (obj) {
      case Objective::encoder: return je;
      case Objective::decoder: return *jd.value();
      case Objective::joint: return *jd.value() + cfg.lambda * je;
    }
    return 0.0;
  }

  // Runs one phase to early stopping; returns a failure message if training
  // diverged. The best-validation parameters are restored either way.
  std::optional<std::string> run(Objective obj, std::uint64_t phase_seed) {
    Adam adam(AdamConfig{cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.epsilon});
    EarlyStopping stop(cfg.patience);
    std::vector<Tensor> best = model.snapshot();
    std::vector<Parameter*> params = model.parameters();
    std::optional<std::string> failure;

    for (std::size_t epoch = 0; epoch < cfg.max_epochs && !stop.should_stop(); ++epoch) {
      const auto t0 = std::chrono::steady_clock::now();
      Mean je, jd, jall;
      for (const StepBatches& s : schedule(obj, phase_seed, epoch)) {
        Graph g;
        std::optional<Var> e, d;
        if (obj != Objective::decoder) e = encoder_term(g, s);
        if (obj != Objective::encoder) d = compute_decoder_loss(g, model, *s.tgt, cfg.decoder_inputs);
        Var total = obj == Objective::encoder ? *e : obj == Objective::decoder ? *d : *d + scale(*e, cfg.lambda);
        if (!std::isfinite(total.item())) {
          failure = "non-finite training loss at epoch " + std::to_string(epoch_counter + 1);
          break;
        }
        model.store().zero_grad();
        g.backward(total);
        try {
          adam.step(params);
        } catch (const TrainingError& ex) {
          failure = std::string(ex.what()) + " at epoch " + std::to_string(epoch_counter + 1);
          break;
        }
        if (e) je.add(e->item());
        if (d) jd.add(d->item());
        if (obj == Objective::joint) jall.add(total.item());
      }
      if (failure) break;

      const double val = validate(obj);
      LossRow row;
      row.epoch = ++epoch_counter;
      row.train_je = je.value();
      row.train_jd = jd.value();
      row.train_jall = jall.value();
      row.val_loss = val;
      row.test_loss = test_loss(model, corpora, cfg.batch_size);
      if (cfg.log_wall_time) {
        row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      }
      log.append(row);
      if (stop.observe(val)) best = model.snapshot();
    }
    model.restore(best);
    return failure;
  }
};

}  // namespace

EarlyStopping::EarlyStopping(std::size_t patience)
    : patience_(patience), best_(std::numeric_limits<double>::infinity()) {
  if (patience < 1) throw ConfigError("early stopping: patience must be >= 1");
}

bool EarlyStopping::observe(double loss) {
  const std::size_t index = observed_++;
  if (std::isfinite(loss) && loss < best_) {
    best_ = loss;
    best_index_ = index;
    since_best_ = 0;
    return true;
  }
  ++since_best_;
  return false;
}

std::vector<StepBatches> pair_batches(const Corpus& src, const Corpus& tgt, std::size_t batch_size,
                                      std::uint64_t seed, std::size_t epoch) {
  if (src.empty() || tgt.empty()) throw ContractError("pair_batches: both corpora must be non-empty");
  const std::uint64_t src_seed = mix_seed(seed, kSrcStream);
  const std::uint64_t tgt_seed = mix_seed(seed, kTgtStream);
  std::vector<Batch> a = make_batches(src, batch_size, src_seed, epoch);
  std::vector<Batch> b = make_batches(tgt, batch_size, tgt_seed, epoch);
  const bool src_longer = a.size() >= b.size();
  const Corpus& short_corpus = src_longer ? tgt : src;
  const std::uint64_t short_seed = src_longer ? tgt_seed : src_seed;
  std::vector<Batch>& longer = src_longer ? a : b;
  std::vector<Batch> shorter = src_longer ? std::move(b) : std::move(a);

  std::vector<StepBatches> out;
  out.reserve(longer.size());
  std::size_t pos = 0;
  std::size_t cycle = 0;
  for (Batch& l : longer) {
    if (pos == shorter.size()) {
      ++cycle;
      shorter = make_batches(short_corpus, batch_size, mix_seed(short_seed, cycle), epoch);
      pos = 0;
    }
    StepBatches s;
    if (src_longer) {
      s.src = std::move(l);
      s.tgt = shorter[pos++];
    } else {
      s.src = shorter[pos++];
      s.tgt = std::move(l);
    }
    out.push_back(std::move(s));
  }
  return out;
}

Var compute_encoder_loss(Graph& g, const Model& model, const Batch& src, const Batch* tgt, const RankLossConfig& cfg,
                         Rng* rng) {
  if (model.spec().kind == ModelKind::three_way) {
    if (tgt == nullptr) throw ContractError("encoder loss: three-way model needs a target batch");
    return encoder_loss_three_way(g, model.image(), model.source(), model.target(), src, *tgt, cfg, rng);
  }
  return encoder_loss_two_way(g, model.image(), model.source(), src, cfg, rng);
}

Var compute_decoder_loss(Graph& g, const Model& model, const Batch& tgt, DecoderInputs mode) {
  if (mode != DecoderInputs::image && !model.has_target_encoder()) {
    throw ConfigError("decoder_inputs=" + to_string(mode) + " needs a target encoder (three-way model)");
  }
  if (mode != DecoderInputs::description && !model.has_image_encoder()) {
    throw ConfigError("decoder_inputs=" + to_string(mode) + " needs an image encoder");
  }
  std::optional<Var> im, de;
  if (mode != DecoderInputs::description) {
    im = model.decoder().nll(g, model.image().encode(g, features_of(tgt)), tgt.tokens);
  }
  if (mode != DecoderInputs::image) {
    de = model.decoder().nll(g, model.target().encode(g, tgt.tokens), tgt.tokens);
  }
  if (im && de) return *im + *de;
  return im ? *im : *de;
}

ModelSpec model_spec_for(const TrainConfig& cfg, const CorpusBundle& corpora, ModelKind kind) {
  ModelSpec spec;
  spec.kind = kind;
  const std::size_t d_img = kind == ModelKind::supervised ? 1 : corpora.feature_dim();
  spec.dims = cfg.preset == Preset::full ? ModelDims::full(d_img) : ModelDims::desk(d_img);
  spec.context = cfg.context_mode;
  spec.source_vocab = corpora.source_vocab.size();
  spec.target_vocab = corpora.target_vocab.size();
  return spec;
}

std::size_t default_max_decode_len(const CorpusBundle& corpora) {
  std::size_t longest = 0;
  for (const Document& d : corpora.train_tgt.documents) longest = std::max(longest, d.tokens.size());
  for (const ParallelPair& p : corpora.parallel_train.pairs) {
    for (const auto& r : p.references) longest = std::max(longest, r.size());
  }
  return std::max<std::size_t>(1, 2 * longest);
}

std::optional<double> test_loss(const Model& model, const CorpusBundle& corpora, std::size_t batch_size) {
  const auto& pairs = corpora.test.pairs;
  if (pairs.empty()) return std::nullopt;
  Mean m;
  for (std::size_t b = 0; b < pairs.size(); b += batch_size) {
    const std::size_t e = std::min(pairs.size(), b + batch_size);
    std::vector<std::vector<TokenId>> src, tgt;
    for (std::size_t i = b; i < e; ++i) {
      if (pairs[i].references.empty()) continue;
      src.push_back(pairs[i].source_tokens);
      tgt.push_back(target_ids(corpora.target_vocab, pairs[i].references.front()));
    }
    if (src.empty()) continue;
    Graph g;
    Var ctx = model.source().encode(g, pad_sequences(src));
    m.add(model.decoder().nll(g, ctx, pad_sequences(tgt)).item(), static_cast<double>(src.size()));
  }
  return m.value();
}

CheckpointMeta TrainResult::meta(const CorpusBundle& corpora, const TrainConfig& cfg) const {
  CheckpointMeta m;
  m.source_vocab_hash = corpora.source_vocab.content_hash();
  m.target_vocab_hash = corpora.target_vocab.content_hash();
  m.max_decode_len = max_decode_len;
  m.config = cfg.to_key_values();
  return m;
}

TrainResult train_two_step(const TrainConfig& cfg, const CorpusBundle& corpora) {
  cfg.validate();
  corpora.validate();
  const ModelKind kind = cfg.topology == Topology::three_way ? ModelKind::three_way : ModelKind::two_way;
  TrainResult r{Model(model_spec_for(cfg, corpora, kind), cfg.seed), {}, 0, {}, {}, {}};
  r.max_decode_len = cfg.max_decode_len ? cfg.max_decode_len : default_max_decode_len(corpora);
  std::size_t epochs = 0;
  Trainer t{cfg, corpora, r.model, r.log, epochs, Rng(mix_seed(cfg.seed, kNegStream))};

  r.failure = t.run(Objective::encoder, mix_seed(cfg.seed, 1));
  r.encoder_hash_phase1 = hash_parameters(r.model.encoder_parameters());
  if (r.failure) return r;

  r.model.set_encoders_frozen(true);
  r.failure = t.run(Objective::decoder, mix_seed(cfg.seed, 2));
  r.model.set_encoders_frozen(false);
  r.encoder_hash_phase2 = hash_parameters(r.model.encoder_parameters());
  return r;
}

TrainResult train_end_to_end(const TrainConfig& cfg, const CorpusBundle& corpora) {
  cfg.validate();
  corpora.validate();
  const ModelKind kind = cfg.topology == Topology::three_way ? ModelKind::three_way : ModelKind::two_way;
  TrainResult r{Model(model_spec_for(cfg, corpora, kind), cfg.seed), {}, 0, {}, {}, {}};
  r.max_decode_len = cfg.max_decode_len ? cfg.max_decode_len : default_max_decode_len(corpora);
  std::size_t epochs = 0;
  Trainer t{cfg, corpora, r.model, r.log, epochs, Rng(mix_seed(cfg.seed, kNegStream))};
  r.failure = t.run(Objective::joint, mix_seed(cfg.seed, 3));
  return r;
}

TrainResult train(const TrainConfig& cfg, const CorpusBundle& corpora) {
  return cfg.strategy == Strategy::two_step ? train_two_step(cfg, corpora) : train_end_to_end(cfg, corpora);
}

std::vector<std::size_t> subsample_indices(std::size_t n, std::size_t k, std::uint64_t seed) {
  std::vector<std::size_t> idx;
  if (k == 0 || k >= n) {
    idx.resize(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    return idx;
  }
  Rng rng(mix_seed(seed, kSupStream, k));
  idx = shuffled_indices(n, rng);
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

TrainResult train_supervised(const TrainConfig& cfg, const CorpusBundle& corpora) {
  cfg.validate();
  const auto& all = corpora.parallel_train.pairs;
  if (all.empty()) throw ContractError("train_supervised: empty parallel corpus");

  std::vector<std::vector<TokenId>> src, tgt;
  for (std::size_t i : subsample_indices(all.size(), cfg.subsample, cfg.seed)) {
    if (all[i].references.empty()) throw ContractError("train_supervised: pair '" + all[i].id + "' has no reference");
    src.push_back(all[i].source_tokens);
    tgt.push_back(target_ids(corpora.target_vocab, all[i].references.front()));
  }

  TrainResult r{Model(model_spec_for(cfg, corpora, ModelKind::supervised), cfg.seed), {}, 0, {}, {}, {}};
  r.max_decode_len = cfg.max_decode_len ? cfg.max_decode_len : default_max_decode_len(corpora);
  Adam adam(AdamConfig{cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.epsilon});
  EarlyStopping stop(cfg.patience);
  std::vector<Tensor> best = r.model.snapshot();
  std::vector<Parameter*> params = r.model.parameters();

  for (std::size_t epoch = 0; epoch < cfg.max_epochs && !stop.should_stop(); ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(mix_seed(cfg.seed, kSupStream, epoch));
    const auto order = shuffled_indices(src.size(), rng);
    Mean loss;
    for (std::size_t b = 0; b < order.size() && !r.failure; b += cfg.batch_size) {
      const std::size_t e = std::min(order.size(), b + cfg.batch_size);
      std::vector<std::vector<TokenId>> bs, bt;
      for (std::size_t i = b; i < e; ++i) {
        bs.push_back(src[order[i]]);
        bt.push_back(tgt[order[i]]);
      }
      Graph g;
      Var l = r.model.decoder().nll(g, r.model.source().encode(g, pad_sequences(bs)), pad_sequences(bt));
      if (!std::isfinite(l.item())) {
        r.failure = "non-finite training loss at epoch " + std::to_string(epoch + 1);
        break;
      }
      r.model.store().zero_grad();
      g.backward(l);
      try {
        adam.step(params);
      } catch (const TrainingError& ex) {
        r.failure = std::string(ex.what()) + " at epoch " + std::to_string(epoch + 1);
        break;
      }
      loss.add(l.item(), static_cast<double>(e - b));
    }
    if (r.failure) break;
    LossRow row;
    row.epoch = epoch + 1;
    row.train_jd = loss.value();
    row.test_loss = test_loss(r.model, corpora, cfg.batch_size);
    if (cfg.log_wall_time) row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.log.append(row);
    if (stop.observe(*loss.value())) best = r.model.snapshot();
  }
  r.model.restore(best);
  return r;
}

std::vector<std::vector<std::string>> translate_sentences(const Model& model, const Vocabulary& source_vocab,
                                                          const Vocabulary& target_vocab,
                                                          const std::vector<std::vector<std::string>>& sentences,
                                                          std::size_t max_len, std::size_t beam_width) {
  std::vector<std::vector<std::string>> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) {
    if (s.empty()) {
      out.emplace_back();
      continue;
    }
    const auto ids = model.translate(source_vocab.encode(s), max_len, beam_width);
    out.push_back(target_vocab.decode(ids));
  }
  return out;
}

}  // namespace pivotmt
