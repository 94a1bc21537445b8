#include <gtest/gtest.h>

#include "pivotmt/checkpoint.hpp"
#include "pivotmt/config.hpp"
#include "pivotmt/error.hpp"
#include "pivotmt/loss_log.hpp"
#include "pivotmt/model.hpp"
#include "pivotmt/synth.hpp"
#include "support.hpp"

using namespace pivotmt;
using testing_support::slurp;
using testing_support::TempDir;
using testing_support::write_file;

namespace {

ModelSpec small_spec(ModelKind kind = ModelKind::three_way) {
  ModelSpec s;
  s.kind = kind;
  s.dims = ModelDims{4, 6, 5, 3, 4};
  s.source_vocab = 9;
  s.target_vocab = 11;
  return s;
}

CheckpointMeta meta_for(const Vocabulary& src, const Vocabulary& tgt) {
  CheckpointMeta m;
  m.source_vocab_hash = src.content_hash();
  m.target_vocab_hash = tgt.content_hash();
  m.max_decode_len = 12;
  m.config = TrainConfig{}.to_key_values();
  return m;
}

}  // namespace

TEST(Model, TopologiesOwnTheRightModules) {
  Model three(small_spec(ModelKind::three_way), 1);
  Model two(small_spec(ModelKind::two_way), 1);
  Model sup(small_spec(ModelKind::supervised), 1);
  EXPECT_TRUE(three.has_target_encoder());
  EXPECT_FALSE(two.has_target_encoder());
  EXPECT_TRUE(two.has_image_encoder());
  EXPECT_FALSE(sup.has_image_encoder());
  EXPECT_THROW(two.target(), UnsupportedModeError);
  EXPECT_THROW(sup.image(), UnsupportedModeError);
  EXPECT_GT(three.parameters().size(), two.parameters().size());
}

TEST(Model, SeedDeterminesParameters) {
  Model a(small_spec(), 3), b(small_spec(), 3), c(small_spec(), 4);
  EXPECT_EQ(hash_parameters(a.parameters()), hash_parameters(b.parameters()));
  EXPECT_NE(hash_parameters(a.parameters()), hash_parameters(c.parameters()));
}

TEST(Model, FreezeAndSnapshot) {
  Model m(small_spec(), 5);
  m.set_encoders_frozen(true);
  for (Parameter* p : m.encoder_parameters()) EXPECT_TRUE(p->frozen);
  for (Parameter* p : m.decoder().parameters()) EXPECT_FALSE(p->frozen);
  const auto snap = m.snapshot();
  const auto h = hash_parameters(m.parameters());
  m.parameters()[0]->value[0] += 1.0;
  EXPECT_NE(hash_parameters(m.parameters()), h);
  m.restore(snap);
  EXPECT_EQ(hash_parameters(m.parameters()), h);
}

TEST(Checkpoint, SaveLoadSaveIsByteIdentical) {
  TempDir dir;
  const Vocabulary src = Vocabulary::build({{"a", "b"}}, 1);
  const Vocabulary tgt = Vocabulary::build({{"c"}}, 1);
  for (ModelKind kind : {ModelKind::two_way, ModelKind::three_way, ModelKind::supervised}) {
    Model m(small_spec(kind), 7);
    const std::string a = dir.str("a" + to_string(kind));
    const std::string b = dir.str("b" + to_string(kind));
    save_checkpoint(m, meta_for(src, tgt), a);
    Checkpoint loaded = load_checkpoint(a);
    EXPECT_EQ(loaded.model.spec(), m.spec());
    EXPECT_EQ(loaded.meta.max_decode_len, 12u);
    EXPECT_EQ(loaded.meta.config.entries(), TrainConfig{}.to_key_values().entries());
    save_checkpoint(loaded.model, loaded.meta, b);
    EXPECT_EQ(slurp(a + "/" + kManifestFile), slurp(b + "/" + kManifestFile));
    EXPECT_EQ(slurp(a + "/" + kBlobFile), slurp(b + "/" + kBlobFile));
    // f32 storage: a loaded model reproduces its own bytes
    const auto params = loaded.model.parameters();
    for (std::size_t i = 0; i < params.size(); ++i) {
      for (double v : params[i]->value.data()) EXPECT_EQ(v, static_cast<double>(static_cast<float>(v)));
    }
  }
}

TEST(Checkpoint, VocabularyMismatchIsCompatibilityError) {
  TempDir dir;
  const Vocabulary src = Vocabulary::build({{"a", "b"}}, 1);
  const Vocabulary tgt = Vocabulary::build({{"c"}}, 1);
  Model m(small_spec(), 8);
  save_checkpoint(m, meta_for(src, tgt), dir.str());
  const Checkpoint c = load_checkpoint(dir.str());
  EXPECT_NO_THROW(check_vocabularies(c.meta, src, tgt));
  EXPECT_THROW(check_vocabularies(c.meta, Vocabulary::build({{"a", "z"}}, 1), tgt), CompatibilityError);
  EXPECT_THROW(check_vocabularies(c.meta, src, src), CompatibilityError);
}

TEST(Checkpoint, CorruptFilesAreFormatErrors) {
  TempDir dir;
  Model m(small_spec(), 9);
  const Vocabulary v = Vocabulary::build({{"a"}}, 1);
  save_checkpoint(m, meta_for(v, v), dir.str());
  const std::string blob = slurp(dir.str(kBlobFile));
  write_file(dir.str(kBlobFile), blob.substr(0, blob.size() - 4));
  EXPECT_THROW(load_checkpoint(dir.str()), FormatError);
  write_file(dir.str(kBlobFile), blob);
  const std::string manifest = slurp(dir.str(kManifestFile));
  write_file(dir.str(kManifestFile), "schema: other\n" + manifest.substr(manifest.find('\n') + 1));
  EXPECT_THROW(load_checkpoint(dir.str()), FormatError);
  EXPECT_THROW(load_checkpoint(dir.str("nowhere")), FormatError);
}

TEST(LossLog, CsvRoundTripWithEmptyFields) {
  LossLog log;
  LossRow a;
  a.epoch = 1;
  a.train_je = 0.25;
  a.val_loss = 1.0 / 3.0;
  LossRow b;
  b.epoch = 2;
  b.train_jd = 2.0;
  b.train_jall = 1e-9;
  b.test_loss = 4.5;
  log.append(a);
  log.append(b);
  const std::string csv = log.to_csv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), LossLog::kHeader);
  EXPECT_NE(csv.find("1,0.25,,,"), std::string::npos);
  const LossLog back = LossLog::parse_csv(csv);
  EXPECT_EQ(back.to_csv(), csv);
  EXPECT_EQ(*back.rows()[0].val_loss, 1.0 / 3.0);
  EXPECT_FALSE(back.rows()[1].train_je);
  EXPECT_THROW(log.append(a), ContractError);
  EXPECT_THROW(LossLog::parse_csv("epoch,x\n"), FormatError);
}
