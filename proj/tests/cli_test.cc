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

#include "cner/cli.h"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cner/checkpoint.h"
#include "cner/corpus.h"
#include "cner/eval.h"
#include "cner/model.h"
#include "cner/trainer.h"
#include "gtest/gtest.h"
#include "testing/synthetic.h"

namespace cner {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("cner_cli_test_" +
            std::string(::testing::UnitTest::GetInstance()
                            ->current_test_info()
                            ->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    testing::TemplateCorpusOptions options;
    options.sentences = 30;
    WriteColumnFile(Path("train.txt"), testing::MakeTemplateCorpus(options));
    options.sentences = 6;
    options.seed = 9;
    WriteColumnFile(Path("test.txt"), testing::MakeTemplateCorpus(options));
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Path(const std::string& name) const {
    return (dir_ / name).string();
  }

  int Run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return RunCli(args, out_, err_);
  }

  std::vector<std::string> TrainArgs(const std::string& out_name) {
    return {"train",          "--train",       Path("train.txt"),
            "--out",          Path(out_name),  "--embed-dim",
            "4",              "--filters",     "4",
            "--windows",      "2,3",           "--hidden",
            "3",              "--max-epochs",  "2",
            "--batch-size",   "8",             "--seed",
            "5"};
  }

  static std::string Slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

TEST_F(CliTest, TrainPredictEvalRoundTrip) {
  auto args = TrainArgs("model.bin");
  args.insert(args.end(), {"--report", Path("report.txt")});
  ASSERT_EQ(Run(args), kExitOk) << err_.str();
  EXPECT_NE(out_.str().find("fscore="), std::string::npos);
  EXPECT_EQ(Slurp(Path("report.txt")), out_.str());
  EXPECT_NE(err_.str().find("resolved options"), std::string::npos);
  const Checkpoint ck = ReadCheckpoint(Path("model.bin"));
  EXPECT_EQ(ck.Meta("config.hidden"), "3");
  EXPECT_EQ(ck.Meta("train.epochs_run"), "2");

  ASSERT_EQ(Run({"predict", "--model", Path("model.bin"), "--input",
                 Path("test.txt"), "--output", Path("pred.txt")}),
            kExitOk)
      << err_.str();
  const Dataset pred = LoadColumnFile(Path("pred.txt"),
                                      ColumnOptions{false, LabelPolicy::kLenient});
  EXPECT_EQ(pred.size(), 6u);

  ASSERT_EQ(Run({"eval", "--gold", Path("test.txt"), "--pred", Path("pred.txt"),
                 "--train-corpus", Path("train.txt")}),
            kExitOk)
      << err_.str();
  EXPECT_NE(out_.str().find("run            P"), std::string::npos);
  EXPECT_NE(out_.str().find("oov_recall="), std::string::npos);
}

TEST_F(CliTest, PredictTextFormatToStdout) {
  ASSERT_EQ(Run(TrainArgs("model.bin")), kExitOk) << err_.str();
  std::ofstream(Path("raw.txt")) << "李刚在北京\n\n王芳去了上海\n";
  ASSERT_EQ(Run({"predict", "--model", Path("model.bin"), "--input",
                 Path("raw.txt"), "--format", "text", "--constrain-bio"}),
            kExitOk)
      << err_.str();
  const Dataset pred = ParseColumnText(out_.str(), "stdout");
  ASSERT_EQ(pred.size(), 2u);
  EXPECT_EQ(pred.samples[1].chars, U"王芳去了上海");
}

TEST_F(CliTest, TrainingIsReproducible) {
  ASSERT_EQ(Run(TrainArgs("a.bin")), kExitOk);
  const std::string report_a = out_.str();
  ASSERT_EQ(Run(TrainArgs("b.bin")), kExitOk);
  EXPECT_EQ(out_.str(), report_a);
  EXPECT_EQ(Slurp(Path("a.bin")), Slurp(Path("b.bin")));
}

TEST_F(CliTest, AugmentWritesPseudoSamples) {
  ASSERT_EQ(Run({"augment", "--input", Path("train.txt"), "--output",
                 Path("aug.txt"), "--count", "12", "--seed", "3"}),
            kExitOk)
      << err_.str();
  const Dataset generated = LoadColumnFile(Path("aug.txt"));
  ASSERT_EQ(generated.size(), 12u);
  for (const auto& s : generated.samples) {
    EXPECT_EQ(s.provenance, Provenance::kPseudo);
  }
  ASSERT_EQ(Run({"augment", "--input", Path("train.txt"), "--merge"}), kExitOk);
  EXPECT_EQ(ParseColumnText(out_.str(), "stdout").size(), 60u);
}

TEST_F(CliTest, GradCheckPassesAndFailsWithExitCodes) {
  EXPECT_EQ(Run({"gradcheck", "--scale", "tiny"}), kExitOk) << out_.str();
  EXPECT_NE(out_.str().find("gradcheck: PASS"), std::string::npos);
  EXPECT_EQ(Run({"gradcheck", "--scale", "tiny", "--tolerance", "1e-30"}),
            kExitCheckFailed);
  EXPECT_NE(out_.str().find("gradcheck: FAIL"), std::string::npos);
}

TEST_F(CliTest, UserErrorsExitWithOne) {
  EXPECT_EQ(Run({}), kExitUserError);
  EXPECT_EQ(Run({"frobnicate"}), kExitUserError);
  EXPECT_EQ(Run({"train", "--train", Path("train.txt")}), kExitUserError);
  EXPECT_EQ(Run({"train", "--train", Path("missing.txt"), "--out",
                 Path("m.bin")}),
            kExitUserError);
  EXPECT_NE(err_.str().find("missing.txt"), std::string::npos);
  auto args = TrainArgs("m.bin");
  args.push_back("--no-such-flag");
  EXPECT_EQ(Run(args), kExitUserError);
  args = TrainArgs("m.bin");
  args.insert(args.end(), {"--lambda", "1.5"});
  EXPECT_EQ(Run(args), kExitUserError);
  args = TrainArgs("m.bin");
  args.insert(args.end(), {"--pseudo", "many"});
  EXPECT_EQ(Run(args), kExitUserError);

  std::ofstream(Path("bad.txt")) << "李\tB-PER\n刚\tQ\n";
  EXPECT_EQ(Run({"augment", "--input", Path("bad.txt")}), kExitUserError);
  EXPECT_NE(err_.str().find("bad.txt:2"), std::string::npos);

  EXPECT_EQ(Run({"predict", "--model", Path("train.txt"), "--input",
                 Path("test.txt")}),
            kExitUserError);
  EXPECT_EQ(Run({"eval", "--gold", Path("test.txt"), "--pred",
                 Path("train.txt")}),
            kExitUserError);
}

TEST_F(CliTest, PredictThenEvalMatchesDirectScoring) {
  ASSERT_EQ(Run(TrainArgs("model.bin")), kExitOk) << err_.str();
  ASSERT_EQ(Run({"predict", "--model", Path("model.bin"), "--input",
                 Path("test.txt"), "--output", Path("pred.txt")}),
            kExitOk);
  ASSERT_EQ(Run({"eval", "--gold", Path("test.txt"), "--pred", Path("pred.txt"),
                 "--train-corpus", Path("train.txt")}),
            kExitOk);
  Tagger model = Tagger::FromCheckpoint(ReadCheckpoint(Path("model.bin")));
  const Dataset test = LoadColumnFile(Path("test.txt"));
  const auto surfaces = EntitySurfaces(LoadColumnFile(Path("train.txt")));
  const EvalReport direct[] = {EvaluateModel(model, test, &surfaces)};
  EXPECT_EQ(out_.str(), FormatReport(direct));
}

TEST_F(CliTest, EvalOfGoldAgainstItselfAndAgainstNothing) {
  ASSERT_EQ(Run({"eval", "--gold", Path("test.txt"), "--pred",
                 Path("test.txt")}),
            kExitOk);
  EXPECT_NE(out_.str().find("100.00  100.00  100.00       -"),
            std::string::npos);
  EXPECT_NE(out_.str().find("oov_recall=undefined"), std::string::npos);

  Dataset blank = LoadColumnFile(Path("test.txt"));
  for (auto& s : blank.samples) s.ner.assign(s.size(), NerLabel::O());
  WriteColumnFile(Path("blank.txt"), blank);
  ASSERT_EQ(Run({"eval", "--gold", Path("test.txt"), "--pred",
                 Path("blank.txt")}),
            kExitOk);
  EXPECT_NE(out_.str().find("fscore=0.000000"), std::string::npos);
  EXPECT_NE(out_.str().find("predicted=0"), std::string::npos);
}

TEST_F(CliTest, DecodeRepairsAreLoggedUnlessConstrained) {
  ASSERT_EQ(Run(TrainArgs("model.bin")), kExitOk);
  // Force every sentence to open with I-PER: zero emissions and
  // transitions, and a start score that favours I-PER.
  Checkpoint ck = ReadCheckpoint(Path("model.bin"));
  for (auto& [name, t] : ck.tensors) {
    if (name == "crf.ner.W" || name == "crf.ner.T") t.Fill(0.0);
    if (name == "crf.ner.start") {
      t.Fill(0.0);
      t[4] = 50.0;  // O, B-LOC, I-LOC, B-PER, I-PER
    }
  }
  WriteCheckpoint(Path("bad.bin"), ck);
  ASSERT_EQ(Run({"predict", "--model", Path("bad.bin"), "--input",
                 Path("test.txt")}),
            kExitOk);
  EXPECT_NE(err_.str().find("6 BIO repairs"), std::string::npos) << err_.str();
  ASSERT_EQ(Run({"predict", "--model", Path("bad.bin"), "--input",
                 Path("test.txt"), "--constrain-bio"}),
            kExitOk);
  EXPECT_NE(err_.str().find(" 0 BIO repairs"), std::string::npos) << err_.str();
}

TEST_F(CliTest, TinyGradCheckIsFastAndRepeatable) {
  const auto start = std::chrono::steady_clock::now();
  ASSERT_EQ(Run({"gradcheck", "--scale", "tiny", "--seed", "4"}), kExitOk);
  const double secs = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  EXPECT_LT(secs, 60.0);
  const std::string first = out_.str();
  ASSERT_EQ(Run({"gradcheck", "--scale", "tiny", "--seed", "4"}), kExitOk);
  EXPECT_EQ(out_.str(), first);
}

TEST_F(CliTest, HelpExitsCleanly) {
  EXPECT_EQ(Run({"--help"}), kExitOk);
  EXPECT_NE(out_.str().find("train"), std::string::npos);
}

}  // namespace
}  // namespace cner
