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

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "cner/augment.h"
#include "cner/checkpoint.h"
#include "cner/config.h"
#include "cner/corpus.h"
#include "cner/errors.h"
#include "cner/eval.h"
#include "cner/grad_check.h"
#include "cner/model.h"
#include "cner/rng.h"
#include "cner/trainer.h"
#include "cner/utf8.h"

namespace cner {
namespace {

// Seed streams for the training pipeline.
constexpr std::uint64_t kSubsampleStream = 11;
constexpr std::uint64_t kSplitStream = 12;
constexpr std::uint64_t kAugmentStream = 13;
constexpr std::uint64_t kEmbeddingStream = 14;

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw InputError("failed writing '" + path + "'");
}

// "auto" or a non-negative integer.
std::optional<std::size_t> ParseCount(const std::string& text,
                                      const std::string& flag) {
  if (text == "auto") return std::nullopt;
  std::size_t n = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw InputError(flag + " expects 'auto' or a non-negative integer, got '" +
                     text + "'");
  }
  return n;
}

std::string FlagName(const std::string& key) {
  std::string flag = "--" + key;
  std::replace(flag.begin(), flag.end(), '_', '-');
  return flag;
}

// Options shared by every subcommand that reads corpus files.
struct CorpusFlags {
  bool lenient = false;
  bool require_cws = false;

  ColumnOptions Options() const {
    ColumnOptions o;
    o.has_cws = require_cws;
    o.policy = lenient ? LabelPolicy::kLenient : LabelPolicy::kStrict;
    return o;
  }
};

void AddCorpusFlags(CLI::App* cmd, CorpusFlags& flags) {
  cmd->add_flag("--lenient", flags.lenient,
                "Repair ill-formed BIO/BI labels instead of rejecting them");
  cmd->add_flag("--require-cws", flags.require_cws,
                "Require the segmentation column on every line");
}

Dataset LoadCorpus(const std::string& path, const CorpusFlags& flags,
                   std::ostream& err) {
  ColumnStats stats;
  Dataset data = LoadColumnFile(path, flags.Options(), &stats);
  err << "[cner] loaded " << data.size() << " sentences from " << path;
  if (stats.repairs > 0) {
    err << " (" << stats.repairs << " label repairs in "
        << stats.repaired_sentences << " sentences)";
  }
  err << "\n";
  return data;
}

void LogOptions(std::ostream& err, const std::string& command,
                const std::map<std::string, std::string>& options) {
  err << "[cner] " << command << " resolved options:\n";
  for (const auto& [key, value] : options) {
    err << "[cner]   " << key << " = " << value << "\n";
  }
}

// ---------------------------------------------------------------- train

struct TrainFlags {
  std::string train_path;
  std::string val_path;
  std::string config_path;
  std::string output_path;
  std::string report_path;
  std::string embeddings_path;
  std::string pseudo = "auto";
  double val_ratio = kDefaultValidationRatio;
  double subsample = 1.0;
  std::map<std::string, std::string> overrides;
  CorpusFlags corpus;
};

int RunTrain(const TrainFlags& flags, std::ostream& out, std::ostream& err) {
  TrainingConfig config;
  if (!flags.config_path.empty()) ApplyConfigFile(config, flags.config_path);
  for (const auto& [key, value] : flags.overrides) {
    SetConfigValue(config, key, value);
  }
  config.Validate();
  if (!(flags.val_ratio > 0.0 && flags.val_ratio < 1.0)) {
    throw InputError("--val-ratio must be in (0, 1)");
  }
  if (!(flags.subsample > 0.0 && flags.subsample <= 1.0)) {
    throw InputError("--subsample must be in (0, 1]");
  }
  const std::optional<std::size_t> pseudo = ParseCount(flags.pseudo, "--pseudo");

  std::map<std::string, std::string> resolved;
  for (const std::string& key : ConfigKeys()) {
    resolved[key] = GetConfigValue(config, key);
  }
  resolved["train"] = flags.train_path;
  resolved["val"] = flags.val_path.empty() ? "(split)" : flags.val_path;
  resolved["val_ratio"] = FormatDouble(flags.val_ratio);
  resolved["subsample"] = FormatDouble(flags.subsample);
  resolved["pseudo"] = flags.pseudo;
  resolved["embeddings"] =
      flags.embeddings_path.empty() ? "(random)" : flags.embeddings_path;
  resolved["output"] = flags.output_path;
  resolved["lenient"] = flags.corpus.lenient ? "true" : "false";
  LogOptions(err, "train", resolved);

  Dataset data = LoadCorpus(flags.train_path, flags.corpus, err);
  if (flags.subsample < 1.0) {
    data = Subsample(data, flags.subsample,
                     DeriveSeed(config.seed, kSubsampleStream));
    err << "[cner] subsampled to " << data.size() << " sentences\n";
  }
  Dataset train, val;
  if (flags.val_path.empty()) {
    std::tie(train, val) = SplitTrainVal(
        data, flags.val_ratio, DeriveSeed(config.seed, kSplitStream));
  } else {
    train = std::move(data);
    val = LoadCorpus(flags.val_path, flags.corpus, err);
  }

  std::size_t real_count = 0;
  for (const LabeledSentence& s : train.samples) {
    if (s.provenance == Provenance::kReal) ++real_count;
  }
  const std::size_t pseudo_count = pseudo.value_or(real_count);
  if (pseudo_count > 0) {
    const EntityInventory inventory = ExtractInventory(train);
    const std::vector<PseudoSample> generated = GeneratePseudo(
        train, inventory, pseudo_count, DeriveSeed(config.seed, kAugmentStream));
    train = Merge(train, generated);
  }
  err << "[cner] train=" << train.size() << " (pseudo " << pseudo_count
      << ") val=" << val.size() << "\n";

  std::set<std::string> types = train.entity_types;
  types.insert(val.entity_types.begin(), val.entity_types.end());
  if (types.empty()) throw InputError("no entity mentions in training data");

  Tagger model(Vocabulary::Build(train), LabelAlphabet(types), config);
  err << "[cner] vocabulary " << model.vocab().size() << " entries, "
      << model.alphabet().size() << " NER labels\n";
  if (!flags.embeddings_path.empty()) {
    const LoadedEmbeddings loaded = LoadEmbeddings(
        flags.embeddings_path, model.vocab(), config.embed_dim,
        DeriveSeed(config.seed, kEmbeddingStream));
    model.encoder().embedding().SetRows(loaded.rows);
    err << "[cner] embeddings cover " << loaded.found << " characters ("
        << FormatDouble(100.0 * loaded.coverage) << "%)\n";
  }

  TrainState state = Fit(model, train, val, config, [&](const EpochRecord& r) {
    err << "[cner] epoch " << r.epoch << " loss=" << FormatDouble(r.train_loss)
        << " val_f=" << FormatDouble(r.val_fscore)
        << (r.improved ? " *" : "") << "\n";
  });
  Checkpoint ck = std::move(state.best);
  ck.metadata["train.best_epoch"] = std::to_string(state.best_epoch);
  ck.metadata["train.epochs_run"] = std::to_string(state.epochs_run);
  WriteCheckpoint(flags.output_path, ck);
  err << "[cner] best epoch " << state.best_epoch << " of " << state.epochs_run
      << ", checkpoint written to " << flags.output_path << "\n";

  const EvalReport reports[] = {state.best_report};
  const std::string report = FormatReport(reports);
  out << report;
  if (!flags.report_path.empty()) WriteFile(flags.report_path, report);
  return kExitOk;
}

// -------------------------------------------------------------- predict

struct PredictFlags {
  std::string model_path;
  std::string input_path;
  std::string output_path;
  std::string format = "column";
  bool constrain_bio = false;
  CorpusFlags corpus;
};

std::vector<std::u32string> ReadTextLines(const std::string& path) {
  const std::u32string text = DecodeUtf8(ReadFile(path));
  std::vector<std::u32string> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find(U'\n', pos);
    if (eol == std::u32string::npos) eol = text.size();
    std::u32string line = text.substr(pos, eol - pos);
    if (!line.empty() && line.back() == U'\r') line.pop_back();
    if (!line.empty()) lines.push_back(std::move(line));
    pos = eol + 1;
  }
  return lines;
}

int RunPredict(const PredictFlags& flags, std::ostream& out,
               std::ostream& err) {
  LogOptions(err, "predict",
             {{"model", flags.model_path},
              {"input", flags.input_path},
              {"output", flags.output_path.empty() ? "(stdout)"
                                                   : flags.output_path},
              {"format", flags.format},
              {"constrain_bio", flags.constrain_bio ? "true" : "false"}});
  Tagger model = Tagger::FromCheckpoint(ReadCheckpoint(flags.model_path));

  std::vector<std::u32string> sentences;
  if (flags.format == "text") {
    sentences = ReadTextLines(flags.input_path);
  } else {
    const Dataset input = LoadCorpus(flags.input_path, flags.corpus, err);
    for (const LabeledSentence& s : input.samples) sentences.push_back(s.chars);
  }

  std::size_t unknown = 0;
  for (const std::u32string& s : sentences) {
    for (char32_t c : s) unknown += model.vocab().Contains(c) ? 0 : 1;
  }
  const std::vector<Prediction> predictions =
      model.Predict(sentences, flags.constrain_bio, model.config().batch_size);

  Dataset result;
  std::size_t repairs = 0;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    LabeledSentence s;
    s.chars = sentences[i];
    s.ner = predictions[i].labels;
    repairs += predictions[i].repairs;
    result.samples.push_back(std::move(s));
  }
  err << "[cner] predicted " << sentences.size() << " sentences, " << unknown
      << " unknown characters, " << repairs << " BIO repairs\n";
  const std::string text = FormatColumnText(result);
  if (flags.output_path.empty()) {
    out << text;
  } else {
    WriteFile(flags.output_path, text);
  }
  return kExitOk;
}

// ----------------------------------------------------------------- eval

struct EvalFlags {
  std::string gold_path;
  std::string pred_path;
  std::string train_entities_path;
  std::string train_corpus_path;
  std::string report_path;
  CorpusFlags corpus;
};

int RunEval(const EvalFlags& flags, std::ostream& out, std::ostream& err) {
  LogOptions(err, "eval",
             {{"gold", flags.gold_path},
              {"pred", flags.pred_path},
              {"train_entities", flags.train_entities_path.empty()
                                     ? "(none)"
                                     : flags.train_entities_path},
              {"train_corpus", flags.train_corpus_path.empty()
                                   ? "(none)"
                                   : flags.train_corpus_path}});
  if (!flags.train_entities_path.empty() && !flags.train_corpus_path.empty()) {
    throw InputError("--train-entities and --train-corpus are exclusive");
  }
  const Dataset gold = LoadCorpus(flags.gold_path, flags.corpus, err);
  CorpusFlags pred_flags = flags.corpus;
  pred_flags.lenient = true;  // decoded the same way the scorer would
  const Dataset pred = LoadCorpus(flags.pred_path, pred_flags, err);
  if (gold.size() != pred.size()) {
    throw InputError("gold has " + std::to_string(gold.size()) +
                     " sentences but predictions have " +
                     std::to_string(pred.size()));
  }
  std::vector<std::vector<NerLabel>> labels;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold.samples[i].chars != pred.samples[i].chars) {
      throw InputError("sentence " + std::to_string(i + 1) +
                       " differs between gold and predictions");
    }
    labels.push_back(pred.samples[i].ner);
  }

  std::optional<std::set<std::u32string>> surfaces;
  if (!flags.train_entities_path.empty()) {
    const std::vector<std::u32string> lines =
        ReadTextLines(flags.train_entities_path);
    surfaces.emplace(lines.begin(), lines.end());
  } else if (!flags.train_corpus_path.empty()) {
    surfaces = EntitySurfaces(LoadCorpus(flags.train_corpus_path, flags.corpus, err));
  }
  const EvalReport reports[] = {
      Evaluate(gold, labels, surfaces ? &*surfaces : nullptr)};
  const std::string report = FormatReport(reports);
  out << report;
  if (!flags.report_path.empty()) WriteFile(flags.report_path, report);
  return kExitOk;
}

// -------------------------------------------------------------- augment

struct AugmentFlags {
  std::string input_path;
  std::string output_path;
  std::string count = "auto";
  std::uint64_t seed = 0;
  bool merge = false;
  CorpusFlags corpus;
};

int RunAugment(const AugmentFlags& flags, std::ostream& out,
               std::ostream& err) {
  LogOptions(err, "augment",
             {{"input", flags.input_path},
              {"output", flags.output_path.empty() ? "(stdout)"
                                                   : flags.output_path},
              {"count", flags.count},
              {"seed", std::to_string(flags.seed)},
              {"merge", flags.merge ? "true" : "false"}});
  const Dataset data = LoadCorpus(flags.input_path, flags.corpus, err);
  const std::size_t count =
      ParseCount(flags.count, "--count").value_or(data.size());
  const std::vector<PseudoSample> generated =
      GeneratePseudo(data, ExtractInventory(data), count, flags.seed);
  Dataset result;
  if (flags.merge) {
    result = Merge(data, generated);
  } else {
    for (const PseudoSample& p : generated) result.Add(p.sentence);
  }
  err << "[cner] generated " << generated.size() << " pseudo sentences\n";
  const std::string text = FormatColumnText(result);
  if (flags.output_path.empty()) {
    out << text;
  } else {
    WriteFile(flags.output_path, text);
  }
  return kExitOk;
}

// ------------------------------------------------------------ gradcheck

struct GradCheckFlags {
  std::string scale = "tiny";
  double tolerance = 1e-4;
  double eps = 1e-4;
  std::uint64_t seed = 0;
};

Tensor RandomTensor(Shape shape, Rng& rng) {
  Tensor t(std::move(shape));
  for (double& v : t.values()) v = rng.Normal();
  return t;
}

// sum(x * w) for a fixed random w, so every output entry matters.
Var Project(Tape& tape, Var x, Rng& rng) {
  return Sum(Mul(x, tape.Constant(RandomTensor(x.shape(), rng))));
}

struct NamedCheck {
  std::string name;
  GradCheckReport report;
};

std::vector<NamedCheck> OpChecks(const GradCheckFlags& flags) {
  Rng init(DeriveSeed(flags.seed, 1));
  Parameter a("a", RandomTensor({3, 4}, init));
  Parameter b("b", RandomTensor({4, 5}, init));
  Parameter v("v", RandomTensor({4}, init));
  Parameter m("m", RandomTensor({3, 4}, init));
  Parameter t("t", RandomTensor({4, 4}, init));
  Parameter s("s", RandomTensor({4}, init));
  const std::uint64_t projection_seed = DeriveSeed(flags.seed, 2);
  const std::size_t rows[] = {2, 0, 2};
  const std::size_t cols[] = {1, 3};
  const std::size_t flat[] = {0, 5, 11, 5};
  const std::size_t labels[] = {1, 3, 0};

  using Op = std::function<Var(Tape&, Var, Var, Var)>;
  const std::vector<std::pair<std::string, Op>> ops = {
      {"matmul", [](Tape&, Var x, Var, Var) { return x; }},
      {"add_broadcast", [](Tape&, Var x, Var, Var w) { return Add(x, w); }},
      {"sub", [](Tape&, Var x, Var y, Var) { return Sub(x, y); }},
      {"mul", [](Tape&, Var x, Var y, Var) { return Mul(x, y); }},
      {"scale", [](Tape&, Var x, Var, Var) { return Scale(x, -1.7); }},
      {"tanh", [](Tape&, Var x, Var, Var) { return Tanh(x); }},
      {"sigmoid", [](Tape&, Var x, Var, Var) { return Sigmoid(x); }},
      {"relu", [](Tape&, Var x, Var, Var) { return Relu(x); }},
      {"softmax", [](Tape&, Var x, Var, Var) { return SoftmaxLastAxis(x); }},
      {"logsumexp0", [](Tape&, Var x, Var, Var) { return LogSumExp(x, 0); }},
      {"logsumexp1", [](Tape&, Var x, Var, Var) { return LogSumExp(x, 1); }},
      {"concat",
       [](Tape&, Var x, Var y, Var) {
         const Var parts[] = {x, y};
         return Concat(parts, 1);
       }},
      {"slice", [](Tape&, Var x, Var, Var) { return Slice(x, 1, 1, 3); }},
      {"reshape", [](Tape&, Var x, Var, Var) { return Reshape(x, {2, 6}); }},
      {"gather_rows",
       [&](Tape&, Var x, Var, Var) { return GatherRows(x, rows); }},
      {"gather_columns",
       [&](Tape&, Var x, Var, Var) { return GatherColumns(x, cols); }},
      {"gather_elements",
       [&](Tape&, Var x, Var, Var) { return GatherElements(x, flat); }},
      {"window", [](Tape&, Var x, Var, Var) { return Window(x, 1, -1, 1); }},
  };

  std::vector<NamedCheck> out;
  Parameter* params[] = {&a, &b, &v, &m};
  for (const auto& [name, op] : ops) {
    auto build = [&, op = op](Tape& tape) {
      Rng rng(projection_seed);
      Var x = MatMul(tape.Watch(a), tape.Watch(b));  // 3 x 5
      Var y = tape.Watch(m);
      Var x4 = Slice(x, 1, 0, 4);                     // 3 x 4
      return Project(tape, op(tape, x4, y, tape.Watch(v)), rng);
    };
    out.push_back({name, GradCheck(build, params, flags.eps, flags.tolerance)});
  }

  Parameter* crf_params[] = {&m, &t, &s};
  auto crf = [&](Tape& tape) {
    Var emissions = tape.Watch(m);  // 3 x 4
    return Sub(CrfLogPartition(emissions, tape.Watch(t), tape.Watch(s)),
               CrfSequenceScore(emissions, tape.Watch(t), tape.Watch(s),
                                labels));
  };
  out.push_back({"crf_nll",
                 GradCheck(crf, crf_params, flags.eps, flags.tolerance)});
  return out;
}

// Two short sentences with two entity types and segmentation labels.
Dataset ToyBatch() {
  Dataset data;
  auto add = [&](std::u32string chars, std::vector<EntityMention> mentions,
                 std::vector<std::size_t> words) {
    LabeledSentence s;
    s.ner = EncodeMentions(chars.size(), mentions);
    s.chars = std::move(chars);
    s.cws = EncodeSegmentation(words);
    data.Add(std::move(s));
  };
  add(U"李刚在北京", {{"PER", 0, 2}, {"LOC", 3, 5}}, {2, 1, 2});
  add(U"王芳去上海了", {{"PER", 0, 2}, {"LOC", 3, 5}}, {2, 1, 2, 1});
  return data;
}

// Moves every parameter to a random point away from initialization. At
// initialization the convolution pre-activations sit close to the ReLU kink
// and many recurrent-weight gradients are near 1e-9, so finite differences
// there measure kink crossings and rounding rather than the gradient.
void RandomizeParameters(Tagger& model, std::uint64_t seed) {
  Rng rng(seed);
  for (Parameter* p : model.Parameters()) {
    for (double& v : p->value.values()) v = rng.Uniform(-0.5, 0.5);
  }
  EmbeddingLayer& embedding = model.encoder().embedding();
  embedding.SetRows(
      RandomTensor({embedding.vocab_size(), embedding.dim()}, rng));
}

NamedCheck ModelCheck(const GradCheckFlags& flags) {
  const Dataset toy = ToyBatch();
  TrainingConfig config;
  config.seed = flags.seed;
  config.dropout = 0.0;
  config.lambda = 0.4;
  if (flags.scale == "tiny") {
    config.embed_dim = 4;
    config.filters = 4;
    config.hidden = 3;
  } else {
    config.embed_dim = 8;
    config.filters = 8;
    config.hidden = 6;
  }
  Tagger model(Vocabulary::Build(toy), LabelAlphabet(toy.entity_types), config);
  RandomizeParameters(model, DeriveSeed(flags.seed, 3));
  auto build = [&](Tape& tape) {
    LossOptions options;
    options.lambda = config.lambda;
    return model.JointLoss(tape, toy.samples, options);
  };
  const std::vector<Parameter*> params = model.Parameters();
  return {"model_joint_loss",
          GradCheck(build, params, flags.eps, flags.tolerance)};
}

int RunGradCheck(const GradCheckFlags& flags, std::ostream& out,
                 std::ostream& err) {
  LogOptions(err, "gradcheck",
             {{"scale", flags.scale},
              {"tolerance", FormatDouble(flags.tolerance)},
              {"eps", FormatDouble(flags.eps)},
              {"seed", std::to_string(flags.seed)}});
  std::vector<NamedCheck> checks = OpChecks(flags);
  checks.push_back(ModelCheck(flags));
  bool all_passed = true;
  for (const NamedCheck& check : checks) {
    const bool ok = check.report.passed();
    all_passed = all_passed && ok;
    char line[160];
    std::snprintf(line, sizeof(line), "%-18s max_rel_error=%.3e %s\n",
                  check.name.c_str(), check.report.max_rel_error(),
                  ok ? "PASS" : "FAIL");
    out << line;
    if (!ok) {
      for (const ParameterGradCheck& p : check.report.parameters) {
        if (p.max_rel_error < check.report.tolerance) continue;
        out << "  " << p.name << "[" << p.worst_index
            << "] analytic=" << p.analytic_at_worst
            << " numeric=" << p.numeric_at_worst << "\n";
      }
    }
  }
  out << "gradcheck: " << (all_passed ? "PASS" : "FAIL") << "\n";
  return all_passed ? kExitOk : kExitCheckFailed;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Chinese NER with joint segmentation and pseudo samples",
               "cner"};
  app.require_subcommand(1);

  TrainFlags train;
  CLI::App* train_cmd = app.add_subcommand("train", "Train a tagger");
  train_cmd->add_option("--train", train.train_path, "Training corpus")
      ->required();
  train_cmd->add_option("--val", train.val_path,
                        "Validation corpus (default: split from --train)");
  train_cmd->add_option("--config", train.config_path,
                        "Config file of key = value lines");
  train_cmd->add_option("--out", train.output_path, "Checkpoint to write")
      ->required();
  train_cmd->add_option("--report", train.report_path,
                        "Also write the validation report here");
  train_cmd->add_option("--embeddings", train.embeddings_path,
                        "Pretrained character vectors (text format)");
  train_cmd->add_option("--pseudo", train.pseudo,
                        "Pseudo sample count: auto (= real train size) or N");
  train_cmd->add_option("--val-ratio", train.val_ratio,
                        "Validation fraction when splitting");
  train_cmd->add_option("--subsample", train.subsample,
                        "Seeded fraction of the training corpus to use");
  for (const std::string& key : ConfigKeys()) {
    train_cmd->add_option_function<std::string>(
        FlagName(key),
        [&train, key](const std::string& v) { train.overrides[key] = v; },
        "Override config '" + key + "'");
  }
  AddCorpusFlags(train_cmd, train.corpus);

  PredictFlags predict;
  CLI::App* predict_cmd = app.add_subcommand("predict", "Tag sentences");
  predict_cmd->add_option("--model", predict.model_path, "Checkpoint")
      ->required();
  predict_cmd->add_option("--input", predict.input_path, "Input file")
      ->required();
  predict_cmd->add_option("--output", predict.output_path,
                          "Output column file (default: stdout)");
  predict_cmd->add_option("--format", predict.format,
                          "Input format: column or text (one per line)")
      ->check(CLI::IsMember({"column", "text"}));
  predict_cmd->add_flag("--constrain-bio", predict.constrain_bio,
                        "Forbid ill-formed BIO transitions while decoding");
  AddCorpusFlags(predict_cmd, predict.corpus);

  EvalFlags eval;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Score predictions");
  eval_cmd->add_option("--gold", eval.gold_path, "Gold column file")
      ->required();
  eval_cmd->add_option("--pred", eval.pred_path, "Predicted column file")
      ->required();
  eval_cmd->add_option("--train-entities", eval.train_entities_path,
                       "Training entity surfaces, one per line");
  eval_cmd->add_option("--train-corpus", eval.train_corpus_path,
                       "Training corpus to take entity surfaces from");
  eval_cmd->add_option("--report", eval.report_path,
                       "Also write the report here");
  AddCorpusFlags(eval_cmd, eval.corpus);

  AugmentFlags augment;
  CLI::App* augment_cmd =
      app.add_subcommand("augment", "Generate pseudo labeled sentences");
  augment_cmd->add_option("--input", augment.input_path, "Labeled corpus")
      ->required();
  augment_cmd->add_option("--output", augment.output_path,
                          "Output column file (default: stdout)");
  augment_cmd->add_option("--count", augment.count,
                          "Number of samples: auto (= input size) or N");
  augment_cmd->add_option("--seed", augment.seed, "Random seed");
  augment_cmd->add_flag("--merge", augment.merge,
                        "Write the input followed by the generated samples");
  AddCorpusFlags(augment_cmd, augment.corpus);

  GradCheckFlags gradcheck;
  CLI::App* gradcheck_cmd =
      app.add_subcommand("gradcheck", "Finite-difference gradient checks");
  gradcheck_cmd->add_option("--scale", gradcheck.scale, "tiny or small")
      ->check(CLI::IsMember({"tiny", "small"}));
  gradcheck_cmd->add_option("--tolerance", gradcheck.tolerance,
                            "Maximum relative error");
  gradcheck_cmd->add_option("--eps", gradcheck.eps, "Finite-difference step");
  gradcheck_cmd->add_option("--seed", gradcheck.seed, "Random seed");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUserError;
  }

  try {
    if (train_cmd->parsed()) return RunTrain(train, out, err);
    if (predict_cmd->parsed()) return RunPredict(predict, out, err);
    if (eval_cmd->parsed()) return RunEval(eval, out, err);
    if (augment_cmd->parsed()) return RunAugment(augment, out, err);
    if (gradcheck_cmd->parsed()) return RunGradCheck(gradcheck, out, err);
  } catch (const InputError& e) {
    err << "cner: error: " << e.what() << "\n";
    return kExitUserError;
  } catch (const NumericError& e) {
    err << "cner: numeric check failed: " << e.what() << "\n";
    return kExitCheckFailed;
  } catch (const std::exception& e) {
    err << "cner: internal error: " << e.what() << "\n";
    return kExitCheckFailed;
  }
  return kExitUserError;
}

int RunCli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return RunCli(args, std::cout, std::cerr);
}

}  // namespace cner
