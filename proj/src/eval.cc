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

#include "cner/eval.h"

#include <algorithm>
#include <cstdio>

#include "cner/errors.h"

namespace cner {
namespace {

double Ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

void CheckAligned(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw InputError(std::string(what) + ": " + std::to_string(a) +
                     " gold sentences but " + std::to_string(b) +
                     " predicted");
  }
}

bool Contains(const MentionList& list, const EntityMention& m) {
  return std::find(list.begin(), list.end(), m) != list.end();
}

std::string Percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * v);
  return buf;
}

std::string Fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string PadLeft(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string PadRight(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

struct Row {
  std::string name;
  double p, r, f;
  std::optional<double> oov;
};

std::string FormatRow(const Row& row) {
  return PadRight(row.name, 8) + PadLeft(Percent(row.p), 8) +
         PadLeft(Percent(row.r), 8) + PadLeft(Percent(row.f), 8) +
         PadLeft(row.oov ? Percent(*row.oov) : "-", 8) + "\n";
}

}  // namespace

double PrfCounts::precision() const { return Ratio(correct, predicted); }
double PrfCounts::recall() const { return Ratio(correct, gold); }

double PrfCounts::fscore() const {
  const double p = precision(), r = recall();
  return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

EvalReport EntityPrf(std::span<const MentionList> gold,
                     std::span<const MentionList> pred) {
  CheckAligned(gold.size(), pred.size(), "EntityPrf");
  EvalReport report;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    for (const EntityMention& m : gold[s]) {
      ++report.counts.gold;
      ++report.per_type[m.type].gold;
    }
    for (const EntityMention& m : pred[s]) {
      ++report.counts.predicted;
      PrfCounts& type = report.per_type[m.type];
      ++type.predicted;
      if (Contains(gold[s], m)) {
        ++report.counts.correct;
        ++type.correct;
      }
    }
  }
  return report;
}

OovResult OovRecall(std::span<const MentionList> gold,
                    std::span<const MentionList> pred,
                    const std::set<std::u32string>& training_surfaces,
                    std::span<const std::u32string> sentences) {
  CheckAligned(gold.size(), pred.size(), "OovRecall");
  CheckAligned(gold.size(), sentences.size(), "OovRecall sentences");
  OovResult out;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    for (const EntityMention& m : gold[s]) {
      if (m.end > sentences[s].size()) {
        throw InputError("mention beyond sentence end in OovRecall");
      }
      const std::u32string surface =
          sentences[s].substr(m.start, m.end - m.start);
      if (training_surfaces.count(surface) != 0) continue;
      ++out.oov_gold;
      if (Contains(pred[s], m)) ++out.oov_correct;
    }
  }
  if (out.oov_gold > 0) out.recall = Ratio(out.oov_correct, out.oov_gold);
  return out;
}

double OovRate(std::span<const MentionList> gold,
               const std::set<std::u32string>& training_surfaces,
               std::span<const std::u32string> sentences) {
  std::vector<MentionList> none(gold.size());
  const OovResult r = OovRecall(gold, none, training_surfaces, sentences);
  std::size_t total = 0;
  for (const MentionList& list : gold) total += list.size();
  return Ratio(r.oov_gold, total);
}

std::set<std::u32string> EntitySurfaces(const Dataset& dataset) {
  std::set<std::u32string> out;
  for (const LabeledSentence& s : dataset.samples) {
    for (const EntityMention& m : s.Mentions()) out.insert(s.Surface(m));
  }
  return out;
}

EvalReport Evaluate(const Dataset& gold,
                    std::span<const std::vector<NerLabel>> predicted,
                    const std::set<std::u32string>* training_surfaces) {
  CheckAligned(gold.size(), predicted.size(), "Evaluate");
  std::vector<MentionList> gold_mentions, pred_mentions;
  std::vector<std::u32string> sentences;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const LabeledSentence& s = gold.samples[i];
    if (predicted[i].size() != s.size()) {
      throw InputError("sentence " + std::to_string(i + 1) + ": " +
                       std::to_string(predicted[i].size()) +
                       " predicted labels for " + std::to_string(s.size()) +
                       " characters");
    }
    gold_mentions.push_back(s.Mentions());
    pred_mentions.push_back(DecodeLabels(predicted[i]).mentions);
    sentences.push_back(s.chars);
  }
  EvalReport report = EntityPrf(gold_mentions, pred_mentions);
  if (training_surfaces != nullptr) {
    const OovResult oov = OovRecall(gold_mentions, pred_mentions,
                                    *training_surfaces, sentences);
    report.oov_gold = oov.oov_gold;
    report.oov_correct = oov.oov_correct;
    report.oov_recall = oov.recall;
  }
  return report;
}

std::string FormatReport(std::span<const EvalReport> runs) {
  std::string out = PadRight("run", 8) + PadLeft("P", 8) + PadLeft("R", 8) +
                    PadLeft("F", 8) + PadLeft("R_oov", 8) + "\n";
  if (runs.empty()) return out;

  Row mean{"mean", 0.0, 0.0, 0.0, std::nullopt};
  double oov_sum = 0.0;
  std::size_t oov_runs = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const EvalReport& r = runs[i];
    const Row row{std::to_string(i + 1), r.precision(), r.recall(),
                  r.fscore(), r.oov_recall};
    out += FormatRow(row);
    mean.p += row.p;
    mean.r += row.r;
    mean.f += row.f;
    if (row.oov) {
      oov_sum += *row.oov;
      ++oov_runs;
    }
  }
  const double n = static_cast<double>(runs.size());
  mean.p /= n;
  mean.r /= n;
  mean.f /= n;
  if (oov_runs > 0) mean.oov = oov_sum / static_cast<double>(oov_runs);
  if (runs.size() > 1) out += FormatRow(mean);

  out += "\n";
  out += "runs=" + std::to_string(runs.size()) + "\n";
  out += "precision=" + Fixed(mean.p) + "\n";
  out += "recall=" + Fixed(mean.r) + "\n";
  out += "fscore=" + Fixed(mean.f) + "\n";
  out += "oov_recall=" + (mean.oov ? Fixed(*mean.oov) : "undefined") + "\n";
  if (runs.size() == 1) {
    const EvalReport& r = runs[0];
    out += "gold=" + std::to_string(r.counts.gold) + "\n";
    out += "predicted=" + std::to_string(r.counts.predicted) + "\n";
    out += "correct=" + std::to_string(r.counts.correct) + "\n";
    if (r.oov_recall) {
      out += "oov_gold=" + std::to_string(r.oov_gold) + "\n";
      out += "oov_correct=" + std::to_string(r.oov_correct) + "\n";
    }
    for (const auto& [type, c] : r.per_type) {
      out += type + ".precision=" + Fixed(c.precision()) + "\n";
      out += type + ".recall=" + Fixed(c.recall()) + "\n";
      out += type + ".fscore=" + Fixed(c.fscore()) + "\n";
    }
  }
  return out;
}

}  // namespace cner
