#include "CLI11.hpp"

#include <iostream>

#include "commands.hpp"
#include "pivotmt/error.hpp"
#include "pivotmt/tensor.hpp"
#include "pivotmt/version.hpp"

using namespace pivotmt;
using namespace pivotmt::cli;

int main(int argc, char** argv) {
  CLI::App app{"Zero-resource translation through an image pivot", "pivotmt"};
  app.set_version_flag("--version", std::string("pivotmt ") + kVersion);
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  std::uint64_t seed = 0;
  app.add_option("--config", g.config, "key=value config file");
  auto* seed_opt = app.add_option("--seed", seed, "random seed (overrides config)");
  app.add_option("--out", g.out, "output directory");
  app.add_option("--precision", g.precision, "arithmetic precision")->check(CLI::IsMember({32, 64}));

  PrepareOptions prep;
  auto* prepare = app.add_subcommand("prepare", "tokenize, split and build vocabularies");
  prepare->add_option("--src", prep.src, "source descriptions, one per line")->required();
  prepare->add_option("--tgt", prep.tgt, "target descriptions, one per line")->required();
  prepare->add_option("--features", prep.features, "image feature file")->required();
  prepare->add_option("--split", prep.split, "train_src,train_tgt,val_src,val_tgt,test sizes");
  prepare->add_option("--min-count", prep.min_count, "vocabulary cutoff (default 5)");

  auto* synth = app.add_subcommand("synth", "generate the synthetic world");

  TrainOptions tr;
  auto* train = app.add_subcommand("train", "train a pivot model");
  train->add_option("--corpus", tr.corpus, "prepared corpus directory")->required();

  TranslateOptions tl;
  auto* translate = app.add_subcommand("translate", "translate source sentences");
  translate->add_option("--checkpoint", tl.checkpoint)->required();
  translate->add_option("--corpus", tl.corpus, "prepared corpus directory (vocabularies)")->required();
  translate->add_option("--input", tl.input, "source sentences, one per line")->required();
  translate->add_option("--output", tl.output, "hypothesis file (default OUT/hypotheses.txt)");
  translate->add_option("--beam", tl.beam, "beam width");
  translate->add_option("--max-len", tl.max_len, "maximum output length");

  RetrieveOptions rt;
  auto* retrieve = app.add_subcommand("retrieve", "nearest-neighbour translation and baselines");
  retrieve->add_option("--method", rt.method)
      ->required()
      ->check(CLI::IsMember({"image", "description", "tfidf", "random"}));
  retrieve->add_option("--checkpoint", rt.checkpoint);
  retrieve->add_option("--corpus", rt.corpus, "prepared corpus directory")->required();
  retrieve->add_option("--input", rt.input, "source sentences, one per line")->required();
  retrieve->add_option("--output", rt.output);

  EvaluateOptions ev;
  auto* evaluate = app.add_subcommand("evaluate", "corpus BLEU and mean BLEU+1");
  evaluate->add_option("--hyp", ev.hyp)->required();
  evaluate->add_option("--ref", ev.ref)->required();

  SupervisedOptions sv;
  auto* supervised = app.add_subcommand("baseline-supervised", "train on the parallel pairs");
  supervised->add_option("--corpus", sv.corpus)->required();
  supervised->add_option("--subsample", sv.subsample, "number of parallel pairs (0 = all)");

  GradcheckOptions gc;
  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient suite");
  gradcheck->add_option("--rounds", gc.rounds);
  gradcheck->add_option("--tolerance", gc.tolerance);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (*seed_opt) g.seed = seed;
  set_precision(g.precision == 64 ? Precision::f64 : Precision::f32);

  try {
    if (*prepare) return cmd_prepare(g, prep);
    if (*synth) return cmd_synth(g);
    if (*train) return cmd_train(g, tr);
    if (*translate) return cmd_translate(g, tl);
    if (*retrieve) return cmd_retrieve(g, rt);
    if (*evaluate) return cmd_evaluate(g, ev);
    if (*supervised) return cmd_baseline_supervised(g, sv);
    if (*gradcheck) return cmd_gradcheck(g, gc);
  } catch (const CompatibilityError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const UnsupportedModeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
