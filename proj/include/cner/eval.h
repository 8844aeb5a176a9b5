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

// Entity-level scoring. A predicted mention is correct when a gold mention
// has the same type, start and end. Counts are micro-aggregated; a ratio
// with a zero denominator is 0.

#ifndef CNER_EVAL_H_
#define CNER_EVAL_H_

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "cner/corpus.h"
#include "cner/tagset.h"

namespace cner {

using MentionList = std::vector<EntityMention>;

struct PrfCounts {
  std::size_t gold = 0;
  std::size_t predicted = 0;
  std::size_t correct = 0;

  double precision() const;
  double recall() const;
  // 2PR / (P + R), or 0 when P + R is 0.
  double fscore() const;
};

struct EvalReport {
  PrfCounts counts;
  std::map<std::string, PrfCounts> per_type;
  std::size_t oov_gold = 0;
  std::size_t oov_correct = 0;
  // Absent when no OOV scoring was requested or there are no OOV gold
  // mentions.
  std::optional<double> oov_recall;

  double precision() const { return counts.precision(); }
  double recall() const { return counts.recall(); }
  double fscore() const { return counts.fscore(); }
};

// Throws InputError if the lists differ in length.
EvalReport EntityPrf(std::span<const MentionList> gold,
                     std::span<const MentionList> pred);

struct OovResult {
  std::size_t oov_gold = 0;
  std::size_t oov_correct = 0;
  std::optional<double> recall;  // absent when oov_gold == 0
};

// A gold mention is OOV when its surface string is not in
// training_surfaces. sentences[i] holds the characters of sentence i.
OovResult OovRecall(std::span<const MentionList> gold,
                    std::span<const MentionList> pred,
                    const std::set<std::u32string>& training_surfaces,
                    std::span<const std::u32string> sentences);

// Fraction of gold mentions that are OOV; 0 when there are none.
double OovRate(std::span<const MentionList> gold,
               const std::set<std::u32string>& training_surfaces,
               std::span<const std::u32string> sentences);

// Surface strings of every mention in the dataset.
std::set<std::u32string> EntitySurfaces(const Dataset& dataset);

// Scores predicted labels against a gold dataset; OOV recall is filled in
// when training_surfaces is given. Predicted labels are decoded leniently.
EvalReport Evaluate(const Dataset& gold,
                    std::span<const std::vector<NerLabel>> predicted,
                    const std::set<std::u32string>* training_surfaces);

// Fixed-width table with P, R, F and R_oov as percentages (two decimals),
// one row per run plus a mean row when there is more than one run, followed
// by a metric=value block for the mean (or only) run.
std::string FormatReport(std::span<const EvalReport> runs);

}  // namespace cner

#endif  // CNER_EVAL_H_
