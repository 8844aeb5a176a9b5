// Copyright 2026 The Cner Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cner/model.h"

#include <cmath>
#include <vector>

#include "cner/errors.h"
#include "cner/grad_check.h"
#include "gtest/gtest.h"
#include "testing/reference.h"
#include "testing/synthetic.h"

namespace cner {
namespace {

TrainingConfig SmallConfig() {
  TrainingConfig c;
  c.embed_dim = 6;
  c.filters = 8;
  c.windows = {2, 3};
  c.hidden = 5;
  c.seed = 21;
  return c;
}

struct Fixture {
  Dataset data;
  Tagger model;
};

Fixture MakeFixture(std::size_t sentences = 6) {
  testing::TemplateCorpusOptions options;
  options.sentences = sentences;
  options.seed = 2;
  Dataset data = testing::MakeTemplateCorpus(options);
  // One sentence without segmentation labels.
  data.samples[1].cws.reset();
  Tagger model(Vocabulary::Build(data), LabelAlphabet(data.entity_types),
               SmallConfig());
  return {std::move(data), std::move(model)};
}

double Loss(Tagger& model, std::span<const LabeledSentence> batch,
            double lambda) {
  Tape tape;
  LossOptions options;
  options.lambda = lambda;
  return model.JointLoss(tape, batch, options).value().item();
}

TEST(TaggerTest, JointLossRecomposesFromHeads) {
  Fixture f = MakeFixture();
  testing::RandomizeParameters(f.model, 4);
  const testing::HeadLosses ref =
      testing::ReferenceHeadLosses(f.model, f.data.samples);
  EXPECT_GT(ref.ner, 0.0);
  EXPECT_GT(ref.cws, 0.0);
  for (double lambda : {0.0, 0.4, 0.9}) {
    const double expected =
        lambda == 0.0 ? ref.ner : (1 - lambda) * ref.ner + lambda * ref.cws;
    EXPECT_NEAR(Loss(f.model, f.data.samples, lambda), expected, 1e-10)
        << lambda;
  }
}

TEST(TaggerTest, ZeroLambdaIsTheNerLossBitForBit) {
  Fixture f = MakeFixture();
  std::vector<const LabeledSentence*> batch;
  for (const auto& s : f.data.samples) batch.push_back(&s);
  Tape joint_tape, ner_tape;
  LossOptions options;
  options.lambda = 0.0;
  const double joint = f.model.JointLoss(joint_tape, batch, options).value().item();
  const double ner =
      f.model.ComputeLossTerms(ner_tape, batch, false, options).ner.value().item();
  EXPECT_EQ(joint, ner);
  // Nothing beyond the NER computation was recorded.
  EXPECT_EQ(joint_tape.size(), ner_tape.size());
}

TEST(TaggerTest, BatchingDoesNotChangeTheLoss) {
  Fixture f = MakeFixture(9);
  testing::RandomizeParameters(f.model, 5);
  const double whole = Loss(f.model, f.data.samples, 0.4);
  double parts = 0.0;
  for (const auto& s : f.data.samples) {
    parts += Loss(f.model, std::span<const LabeledSentence>(&s, 1), 0.4);
  }
  EXPECT_NEAR(whole, parts, 1e-9);
}

TEST(TaggerTest, GradientsMatchFiniteDifferences) {
  Fixture f = MakeFixture(2);
  testing::RandomizeParameters(f.model, 6);
  const GradCheckReport report = GradCheck(
      [&](Tape& tape) {
        LossOptions options;
        options.lambda = 0.4;
        return f.model.JointLoss(tape, f.data.samples, options);
      },
      f.model.Parameters(), 1e-4, 1e-4);
  EXPECT_TRUE(report.passed()) << report.max_rel_error();
}

TEST(TaggerTest, DropoutOnlyActsInTraining) {
  Fixture f = MakeFixture();
  LossOptions eval;
  eval.dropout = 0.5;
  LossOptions train = eval;
  train.train = true;
  train.seed = 3;
  Tape a, b, c;
  const double base = f.model.JointLoss(a, f.data.samples, LossOptions{}).value().item();
  EXPECT_EQ(f.model.JointLoss(b, f.data.samples, eval).value().item(), base);
  EXPECT_NE(f.model.JointLoss(c, f.data.samples, train).value().item(), base);
}

TEST(TaggerTest, CheckpointRoundTripPreservesBehaviour) {
  Fixture f = MakeFixture();
  testing::RandomizeParameters(f.model, 7);
  const Checkpoint ck = f.model.ToCheckpoint();
  EXPECT_EQ(ck.Meta("format"), "cner-tagger");
  EXPECT_EQ(ck.Meta("entity_types"), "LOC\nPER\n");
  EXPECT_EQ(ck.Meta("config.hidden"), "5");
  Tagger back = Tagger::FromCheckpoint(ParseCheckpoint(SerializeCheckpoint(ck)));
  EXPECT_EQ(Loss(back, f.data.samples, 0.4), Loss(f.model, f.data.samples, 0.4));
  std::vector<std::u32string> texts;
  for (const auto& s : f.data.samples) texts.push_back(s.chars);
  const auto p1 = f.model.Predict(texts);
  const auto p2 = back.Predict(texts);
  for (std::size_t i = 0; i < texts.size(); ++i) {
    EXPECT_EQ(p1[i].labels, p2[i].labels);
  }
  EXPECT_EQ(SerializeCheckpoint(back.ToCheckpoint()), SerializeCheckpoint(ck));
}

TEST(TaggerTest, LoadParametersChecksShapes) {
  Fixture f = MakeFixture();
  Checkpoint ck = f.model.ToCheckpoint();
  for (auto& [name, t] : ck.tensors) {
    if (name == "crf.ner.T") t = Tensor({2, 2});
  }
  EXPECT_THROW(f.model.LoadParameters(ck), InputError);
  Checkpoint missing = f.model.ToCheckpoint();
  missing.tensors.pop_back();
  EXPECT_THROW(f.model.LoadParameters(missing), InputError);
  Checkpoint foreign;
  EXPECT_THROW(Tagger::FromCheckpoint(foreign), InputError);
}

TEST(TaggerTest, PredictHandlesBatchesEmptyAndUnknownInput) {
  Fixture f = MakeFixture();
  std::vector<std::u32string> texts = {f.data.samples[0].chars, U"",
                                       U"龘龘龘", f.data.samples[2].chars};
  const auto batched = f.model.Predict(texts, false, 2);
  const auto single = f.model.Predict(texts, false, 1);
  ASSERT_EQ(batched.size(), 4u);
  EXPECT_TRUE(batched[1].labels.empty());
  EXPECT_EQ(batched[2].labels.size(), 3u);
  for (std::size_t i = 0; i < texts.size(); ++i) {
    EXPECT_EQ(batched[i].labels, single[i].labels);
  }
  const auto constrained = f.model.Predict(texts, true);
  for (const auto& p : constrained) {
    EXPECT_FALSE(FindBioViolation(p.labels).has_value());
    EXPECT_EQ(p.repairs, 0u);
  }
}

TEST(TaggerTest, ParametersHaveStableNamesAndShapes) {
  Fixture f = MakeFixture();
  std::vector<std::string> names;
  for (Parameter* p : f.model.Parameters()) names.push_back(p->name);
  const std::vector<std::string> expected = {
      "embed.E",      "cnn.K2.w",     "cnn.K2.b",     "cnn.K3.w",
      "cnn.K3.b",     "lstm.fwd.wx",  "lstm.fwd.wh",  "lstm.fwd.b",
      "lstm.bwd.wx",  "lstm.bwd.wh",  "lstm.bwd.b",   "crf.ner.W",
      "crf.ner.T",    "crf.ner.start", "crf.cws.W",   "crf.cws.T",
      "crf.cws.start"};
  EXPECT_EQ(names, expected);
  EXPECT_EQ(f.model.ner_head().weights().value.shape(), (Shape{10, 5}));
  EXPECT_EQ(f.model.cws_head().weights().value.shape(), (Shape{8, 2}));
}

}  // namespace
}  // namespace cner
