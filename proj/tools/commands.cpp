#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include "pivotmt/checkpoint.hpp"
#include "pivotmt/config.hpp"
#include "pivotmt/corpus.hpp"
#include "pivotmt/features.hpp"
#include "pivotmt/gradient_suite.hpp"
#include "pivotmt/metrics.hpp"
#include "pivotmt/retrieval.hpp"
#include "pivotmt/synth.hpp"
#include "pivotmt/text.hpp"
#include "pivotmt/trainer.hpp"
#include "run_manifest.hpp"

namespace fs = std::filesystem;

namespace pivotmt::cli {
namespace {

KeyValueConfig load_config(const GlobalOptions& g) {
  if (g.config.empty()) return {};
  if (!fs::is_regular_file(g.config)) throw ConfigError("config file '" + g.config + "' not found");
  return KeyValueConfig::load(g.config);
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read '" + path + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

// Tokenized lines; blank lines stay empty so line k maps to output line k.
std::vector<Tokens> read_sentences(const std::string& path) {
  std::vector<Tokens> out;
  for (const auto& line : read_lines(path)) {
    out.push_back(split_whitespace(line).empty() ? Tokens{} : tokenize(line));
  }
  return out;
}

std::string write_sentences(const std::string& path, const std::vector<Tokens>& sentences) {
  if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
  std::ofstream out(path, std::ios::binary);
  for (const auto& s : sentences) out << join_tokens(s) << '\n';
  if (!out) throw FormatError("cannot write '" + path + "'");
  return path;
}

TrainConfig train_config(const GlobalOptions& g, KeyValueConfig kv) {
  if (g.seed) kv.set("seed", std::to_string(*g.seed));
  return TrainConfig::from(kv);
}

std::string join(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

void write_training_outputs(const TrainResult& r, const TrainConfig& cfg, const CorpusBundle& corpora,
                            const std::string& out, RunManifest& manifest) {
  for (const auto& p : save_checkpoint(r.model, r.meta(corpora, cfg), join(out, "checkpoint"))) manifest.artifact(p);
  const std::string log_path = join(out, "loss_log.csv");
  r.log.save(log_path);
  manifest.artifact(log_path);
}

}  // namespace

int cmd_prepare(const GlobalOptions& g, const PrepareOptions& o) {
  KeyValueConfig kv = load_config(g);
  const std::size_t min_count = o.min_count ? *o.min_count : kv.get_uint("min_count", 5);
  const std::uint64_t seed = g.seed ? *g.seed : kv.get_uint("seed", 1);
  const std::string split_text = o.split.empty() ? kv.get_string("split", "") : o.split;
  kv.reject_unknown();
  if (split_text.empty()) throw UsageError("prepare: --split a,b,c,d,e is required");
  const SplitSizes sizes = SplitSizes::parse(split_text);

  const auto src = read_descriptions(o.src);
  const auto tgt = read_descriptions(o.tgt);
  const auto feats = load_features(o.features);
  const CorpusBundle bundle = split_triplets(src, tgt, feats.matrix, sizes, seed, min_count);

  const std::string out = g.out_or(".");
  RunManifest manifest("prepare");
  manifest.set("seed", std::to_string(seed));
  manifest.set("min_count", std::to_string(min_count));
  manifest.set("split", split_text);
  for (const auto* p : {&o.src, &o.tgt, &o.features}) manifest.input(*p);
  for (const auto& f : save_corpus_dir(bundle, out)) manifest.artifact(join(out, f));
  manifest.write(out);
  std::cout << "prepared " << bundle.train_src.size() << '/' << bundle.train_tgt.size() << '/'
            << bundle.val_src.size() << '/' << bundle.val_tgt.size() << '/' << bundle.test.size()
            << " documents in " << out << " (vocab " << bundle.source_vocab.size() << " / "
            << bundle.target_vocab.size() << ")\n";
  return 0;
}

int cmd_synth(const GlobalOptions& g) {
  const WorldConfig cfg = WorldConfig::from(load_config(g));
  const std::uint64_t seed = g.seed.value_or(1);
  const SynthWorld world = synth_generate(cfg, seed);
  const std::string out = g.out_or(".");
  RunManifest manifest("synth");
  manifest.set("seed", std::to_string(seed));
  manifest.config(cfg.to_key_values());
  for (const auto& f : save_synth_world(world, out)) manifest.artifact(join(out, f));
  manifest.write(out);
  std::cout << "synthetic world: " << world.corpora.train_src.size() << '/' << world.corpora.train_tgt.size()
            << " training documents, " << world.corpora.test.size() << " test pairs in " << out << '\n';
  return 0;
}

int cmd_train(const GlobalOptions& g, const TrainOptions& o) {
  const TrainConfig cfg = train_config(g, load_config(g));
  const CorpusBundle corpora = load_corpus_dir(o.corpus);
  const TrainResult r = train(cfg, corpora);

  const std::string out = g.out_or(".");
  RunManifest manifest("train");
  manifest.set("seed", std::to_string(cfg.seed));
  manifest.set("precision", std::to_string(g.precision));
  manifest.config(cfg.to_key_values());
  manifest.input(o.corpus);
  write_training_outputs(r, cfg, corpora, out, manifest);
  manifest.write(out);
  for (const auto& row : r.log.rows()) {
    std::cout << "epoch " << row.epoch;
    if (row.train_jall) std::cout << " J_all=" << format_number(*row.train_jall);
    if (row.train_je) std::cout << " J_E=" << format_number(*row.train_je);
    if (row.train_jd) std::cout << " J_D=" << format_number(*row.train_jd);
    if (row.val_loss) std::cout << " val=" << format_number(*row.val_loss);
    std::cout << '\n';
  }
  if (r.failure) {
    std::cerr << "error: training aborted: " << *r.failure << " (best checkpoint kept in " << out << ")\n";
    return 1;
  }
  return 0;
}

int cmd_translate(const GlobalOptions& g, const TranslateOptions& o) {
  const Checkpoint ckpt = load_checkpoint(o.checkpoint);
  const CorpusBundle corpora = load_corpus_dir(o.corpus);
  check_vocabularies(ckpt.meta, corpora.source_vocab, corpora.target_vocab);
  const std::size_t beam = o.beam.value_or(ckpt.meta.config.get_uint("beam_width", 1));
  const std::size_t max_len = o.max_len.value_or(ckpt.meta.max_decode_len);
  if (beam < 1 || max_len < 1) throw UsageError("translate: --beam and --max-len must be >= 1");

  const auto sources = read_sentences(o.input);
  const auto hyps = translate_sentences(ckpt.model, corpora.source_vocab, corpora.target_vocab, sources, max_len, beam);
  const std::string out = g.out_or(".");
  const std::string path = o.output.empty() ? join(out, "hypotheses.txt") : o.output;
  write_sentences(path, hyps);

  RunManifest manifest("translate");
  manifest.set("beam_width", std::to_string(beam));
  manifest.set("max_len", std::to_string(max_len));
  manifest.input(join(o.checkpoint, kManifestFile));
  manifest.input(join(o.checkpoint, kBlobFile));
  manifest.input(o.input);
  manifest.artifact(path);
  manifest.write(out);
  return 0;
}

int cmd_retrieve(const GlobalOptions& g, const RetrieveOptions& o) {
  const std::string& m = o.method;
  if (m != "image" && m != "description" && m != "tfidf" && m != "random") {
    throw UsageError("retrieve: --method must be image, description, tfidf or random");
  }
  const CorpusBundle corpora = load_corpus_dir(o.corpus);
  const auto queries = read_sentences(o.input);
  const Corpus& targets = corpora.train_tgt;
  const std::uint64_t seed = g.seed.value_or(1);

  std::vector<Tokens> hyps;
  if (m == "image" || m == "description") {
    if (o.checkpoint.empty()) throw UsageError("retrieve: --checkpoint is required for method " + m);
    const Checkpoint ckpt = load_checkpoint(o.checkpoint);
    check_vocabularies(ckpt.meta, corpora.source_vocab, corpora.target_vocab);
    if (m == "description" && !ckpt.model.has_target_encoder()) {
      throw UnsupportedModeError("retrieve: method description needs a three-way checkpoint (" +
                                 to_string(ckpt.model.spec().kind) + " model has no target encoder)");
    }
    const TargetIndex index = TargetIndex::build(ckpt.model, targets);
    for (const auto& q : queries) {
      if (q.empty()) {
        hyps.emplace_back();
        continue;
      }
      const auto ids = corpora.source_vocab.encode(q);
      const std::size_t k = m == "image" ? nn_translate_image(ids, index, ckpt.model)
                                         : nn_translate_description(ids, index, ckpt.model);
      hyps.push_back(index[k].words);
    }
  } else if (m == "tfidf") {
    const TfidfBaseline tfidf(corpora.train_src, targets);
    for (const auto& q : queries) hyps.push_back(q.empty() ? Tokens{} : targets.documents[tfidf.translate(q)].words);
  } else {
    for (std::size_t i = 0; i < queries.size(); ++i) {
      hyps.push_back(queries[i].empty() ? Tokens{} : targets.documents[random_baseline(targets.size(), seed, i)].words);
    }
  }

  const std::string out = g.out_or(".");
  const std::string path = o.output.empty() ? join(out, "hypotheses.txt") : o.output;
  write_sentences(path, hyps);
  RunManifest manifest("retrieve");
  manifest.set("method", m);
  manifest.set("seed", std::to_string(seed));
  if (!o.checkpoint.empty()) manifest.input(join(o.checkpoint, kBlobFile));
  manifest.input(o.input);
  manifest.artifact(path);
  manifest.write(out);
  return 0;
}

int cmd_evaluate(const GlobalOptions& g, const EvaluateOptions& o) {
  std::vector<Tokens> hyps, refs;
  for (const auto& l : read_lines(o.hyp)) hyps.push_back(split_whitespace(l));
  for (const auto& l : read_lines(o.ref)) refs.push_back(split_whitespace(l));
  if (hyps.size() != refs.size()) {
    throw UsageError("evaluate: " + std::to_string(hyps.size()) + " hypothesis lines vs " +
                     std::to_string(refs.size()) + " reference lines");
  }
  const ScoreReport report = corpus_bleu(hyps, refs);
  std::cout << report.to_json() << '\n' << report.summary() << '\n';
  if (!g.out.empty()) {
    fs::create_directories(g.out);
    const std::string path = join(g.out, "score.json");
    std::ofstream(path, std::ios::binary) << report.to_json() << '\n';
    RunManifest manifest("evaluate");
    manifest.input(o.hyp);
    manifest.input(o.ref);
    manifest.artifact(path);
    manifest.write(g.out);
  }
  return 0;
}

int cmd_baseline_supervised(const GlobalOptions& g, const SupervisedOptions& o) {
  KeyValueConfig kv = load_config(g);
  if (o.subsample) kv.set("subsample", std::to_string(*o.subsample));
  const TrainConfig cfg = train_config(g, std::move(kv));
  const CorpusBundle corpora = load_corpus_dir(o.corpus);
  const TrainResult r = train_supervised(cfg, corpora);

  const std::string out = g.out_or(".");
  RunManifest manifest("baseline-supervised");
  manifest.set("seed", std::to_string(cfg.seed));
  manifest.config(cfg.to_key_values());
  manifest.input(o.corpus);
  write_training_outputs(r, cfg, corpora, out, manifest);
  if (!corpora.test.empty()) {
    std::vector<Tokens> srcs, refs;
    for (const auto& p : corpora.test.pairs) {
      srcs.push_back(p.source_words);
      refs.push_back(p.references.front());
    }
    const auto hyps = translate_sentences(r.model, corpora.source_vocab, corpora.target_vocab, srcs, r.max_decode_len,
                                          cfg.beam_width);
    manifest.artifact(write_sentences(join(out, "test_hypotheses.txt"), hyps));
    const ScoreReport report = corpus_bleu(hyps, refs);
    const std::string score = join(out, "score.json");
    std::ofstream(score, std::ios::binary) << report.to_json() << '\n';
    manifest.artifact(score);
    std::cout << "test: " << report.summary() << '\n';
  }
  manifest.write(out);
  if (r.failure) {
    std::cerr << "error: training aborted: " << *r.failure << '\n';
    return 1;
  }
  return 0;
}

int cmd_gradcheck(const GlobalOptions& g, const GradcheckOptions& o) {
  const GradientSuiteReport report = run_gradient_suite(g.seed.value_or(1), o.rounds);
  for (const auto& c : report.cases) {
    std::printf("%-30s max_rel_err=%.3e entries=%zu%s\n", c.name.c_str(), c.result.max_relative_error,
                c.result.entries_checked,
                c.result.max_relative_error < o.tolerance ? "" : ("  FAIL at " + c.result.worst_parameter).c_str());
  }
  const bool ok = report.passed(o.tolerance);
  std::printf("%zu checks, max relative error %.3e, %.2f s: %s\n", report.cases.size(), report.max_relative_error(),
              report.seconds, ok ? "ok" : "FAILED");
  return ok ? 0 : 1;
}

}  // namespace pivotmt::cli
