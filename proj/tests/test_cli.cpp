#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "pivotmt/text.hpp"
#include "support.hpp"

using testing_support::slurp;
using testing_support::TempDir;
using testing_support::write_file;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(PIVOTMT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::size_t line_count(const std::string& text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')); }

const char* kSmallWorld =
    "scenes=122\ntrain_src=48\ntrain_tgt=48\nval_src=8\nval_tgt=8\ntest=10\nmin_count=2\n";

// Small world plus a two-epoch three-way model shared by the tests.
class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new TempDir();
    write_file(dir_->str("world.cfg"), kSmallWorld);
    write_file(dir_->str("train.cfg"), "batch_size=16\nmax_epochs=2\nlearning_rate=0.003\n");
    ASSERT_EQ(run("--config " + dir_->str("world.cfg") + " --seed 3 --out " + dir_->str("world") + " synth"), 0);
    ASSERT_EQ(run("--config " + dir_->str("train.cfg") + " --out " + dir_->str("run") + " train --corpus " +
                  dir_->str("world")),
              0);
  }
  static void TearDownTestSuite() { delete dir_; }

  static std::string p(const std::string& name) { return dir_->str(name); }
  static TempDir* dir_;
};

TempDir* Cli::dir_ = nullptr;

}  // namespace

TEST_F(Cli, SynthIsReproducible) {
  ASSERT_EQ(run("--config " + p("world.cfg") + " --seed 3 --out " + p("world2") + " synth"), 0);
  for (const auto& f : std::filesystem::directory_iterator(p("world"))) {
    EXPECT_EQ(slurp(f.path().string()), slurp(p("world2/" + f.path().filename().string()))) << f.path();
  }
}

TEST_F(Cli, SynthDefaultShape) {
  ASSERT_EQ(run("--out " + p("default") + " synth"), 0);
  EXPECT_EQ(line_count(slurp(p("default/train_src.txt"))), 250u);
  EXPECT_EQ(line_count(slurp(p("default/train_tgt.txt"))), 250u);
  EXPECT_TRUE(std::filesystem::exists(p("default/oracle.tsv")));
}

TEST_F(Cli, MalformedConfigExits2) {
  write_file(p("bad.cfg"), "scenes=ten\n");
  EXPECT_EQ(run("--config " + p("bad.cfg") + " --out " + p("x") + " synth"), 2);
  write_file(p("bad2.cfg"), "no equals sign\n");
  EXPECT_EQ(run("--config " + p("bad2.cfg") + " --out " + p("x") + " synth"), 2);
  EXPECT_EQ(run("--config " + p("missing.cfg") + " synth"), 2);
}

TEST_F(Cli, UsageErrorsExit2) {
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("--precision 16 synth"), 2);
  EXPECT_EQ(run("--help"), 0);
}

TEST_F(Cli, TrainWritesArtifacts) {
  EXPECT_TRUE(std::filesystem::exists(p("run/checkpoint/model.manifest")));
  EXPECT_TRUE(std::filesystem::exists(p("run/checkpoint/model.bin")));
  const std::string log = slurp(p("run/loss_log.csv"));
  EXPECT_EQ(log.rfind("epoch,", 0), 0u);
  EXPECT_EQ(line_count(log), 3u);
  const std::string manifest = slurp(p("run/run_manifest.txt"));
  EXPECT_NE(manifest.find("artifact: loss_log.csv"), std::string::npos);
  EXPECT_NE(manifest.find("artifact: checkpoint/model.bin"), std::string::npos);
  EXPECT_NE(manifest.find("config.batch_size: 16"), std::string::npos);
}

TEST_F(Cli, TwoWayDescriptionRejectedBeforeTraining) {
  write_file(p("tw.cfg"), "topology=two-way\ndecoder_inputs=description\n");
  EXPECT_EQ(run("--config " + p("tw.cfg") + " --out " + p("tw") + " train --corpus " + p("world")), 2);
  EXPECT_FALSE(std::filesystem::exists(p("tw/loss_log.csv")));
}

TEST_F(Cli, TranslatePreservesLinesAndIsDeterministic) {
  const std::string in = p("world/test_src.txt");
  ASSERT_EQ(run("--out " + p("t1") + " translate --checkpoint " + p("run/checkpoint") + " --corpus " + p("world") +
                " --input " + in),
            0);
  ASSERT_EQ(run("--out " + p("t2") + " translate --checkpoint " + p("run/checkpoint") + " --corpus " + p("world") +
                " --input " + in),
            0);
  const std::string h = slurp(p("t1/hypotheses.txt"));
  EXPECT_EQ(h, slurp(p("t2/hypotheses.txt")));
  EXPECT_EQ(line_count(h), line_count(slurp(in)));
}

TEST_F(Cli, TranslateEmptyInput) {
  write_file(p("empty.txt"), "");
  ASSERT_EQ(run("--out " + p("te") + " translate --checkpoint " + p("run/checkpoint") + " --corpus " + p("world") +
                " --input " + p("empty.txt")),
            0);
  EXPECT_EQ(slurp(p("te/hypotheses.txt")), "");
}

TEST_F(Cli, TranslateVocabularyMismatchExits3) {
  ASSERT_EQ(run("--config " + p("world.cfg") + " --seed 99 --out " + p("other") + " synth"), 0);
  write_file(p("other/vocab_tgt.txt"), slurp(p("other/vocab_tgt.txt")) + "extra\t1\n");
  EXPECT_EQ(run("--out " + p("tm") + " translate --checkpoint " + p("run/checkpoint") + " --corpus " + p("other") +
                " --input " + p("world/test_src.txt")),
            3);
}

TEST_F(Cli, RetrieveOutputsAreTargetSentences) {
  std::set<std::string> targets;
  {
    std::istringstream in(slurp(p("world/train_tgt.txt")));
    for (std::string line; std::getline(in, line);) targets.insert(line);
  }
  for (const char* m : {"image", "description", "tfidf", "random"}) {
    const std::string out = p(std::string("r_") + m);
    ASSERT_EQ(run("--seed 5 --out " + out + " retrieve --method " + m + " --checkpoint " + p("run/checkpoint") +
                  " --corpus " + p("world") + " --input " + p("world/test_src.txt")),
              0)
        << m;
    std::istringstream in(slurp(out + "/hypotheses.txt"));
    std::size_t n = 0;
    for (std::string line; std::getline(in, line); ++n) EXPECT_EQ(targets.count(line), 1u) << m << ": " << line;
    EXPECT_EQ(n, 10u);
  }
  ASSERT_EQ(run("--seed 5 --out " + p("r_random2") + " retrieve --method random --corpus " + p("world") + " --input " +
                p("world/test_src.txt")),
            0);
  EXPECT_EQ(slurp(p("r_random/hypotheses.txt")), slurp(p("r_random2/hypotheses.txt")));
}

TEST_F(Cli, RetrieveDescriptionOnTwoWayExits2) {
  write_file(p("two.cfg"), "topology=two-way\nmax_epochs=1\nbatch_size=16\n");
  ASSERT_EQ(run("--config " + p("two.cfg") + " --out " + p("two") + " train --corpus " + p("world")), 0);
  EXPECT_EQ(run("--out " + p("rd") + " retrieve --method description --checkpoint " + p("two/checkpoint") +
                " --corpus " + p("world") + " --input " + p("world/test_src.txt")),
            2);
}

TEST_F(Cli, EvaluateIdenticalAndMismatched) {
  const std::string ref = p("world/test_tgt.txt");
  ASSERT_EQ(run("--out " + p("ev") + " evaluate --hyp " + ref + " --ref " + ref), 0);
  const std::string score = slurp(p("ev/score.json"));
  EXPECT_NE(score.find("\"bleu_x100\":100.0"), std::string::npos) << score;
  EXPECT_NE(score.find("bleu_plus1"), std::string::npos);
  write_file(p("short.txt"), "a b\n");
  EXPECT_EQ(run("evaluate --hyp " + p("short.txt") + " --ref " + ref), 2);
}

TEST_F(Cli, PrepareDeterministicAndValidated) {
  const std::string src = p("world/train_src.txt"), tgt = p("world/train_tgt.txt"), feat = p("world/train_src.feat");
  const std::string common = " prepare --src " + src + " --tgt " + tgt + " --features " + feat + " --split 20,20,2,2,4";
  ASSERT_EQ(run("--out " + p("prep1") + common), 0);
  ASSERT_EQ(run("--out " + p("prep2") + common), 0);
  for (const auto& f : std::filesystem::directory_iterator(p("prep1"))) {
    EXPECT_EQ(slurp(f.path().string()), slurp(p("prep2/" + f.path().filename().string()))) << f.path();
  }
  write_file(p("three.txt"), "a b\nc d\ne f\n");
  EXPECT_EQ(run("--out " + p("prep3") + " prepare --src " + p("three.txt") + " --tgt " + p("three.txt") +
                " --features " + feat + " --split 1,1,0,0,1"),
            2);
  write_file(p("bad.feat"), "3 4096\n1 2 3\n");
  EXPECT_EQ(run("--out " + p("prep4") + " prepare --src " + p("three.txt") + " --tgt " + p("three.txt") +
                " --features " + p("bad.feat") + " --split 1,1,0,0,1"),
            2);
}

TEST_F(Cli, BaselineSupervisedAndGradcheck) {
  write_file(p("sup.cfg"), "max_epochs=2\nbatch_size=16\n");
  ASSERT_EQ(run("--config " + p("sup.cfg") + " --out " + p("sup") + " baseline-supervised --corpus " + p("world") +
                " --subsample 20"),
            0);
  EXPECT_TRUE(std::filesystem::exists(p("sup/score.json")));
  EXPECT_EQ(line_count(slurp(p("sup/test_hypotheses.txt"))), 10u);
  EXPECT_EQ(run("gradcheck --rounds 1"), 0);
}
