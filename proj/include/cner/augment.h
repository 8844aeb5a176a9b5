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

// Pseudo labeled samples by same-type entity replacement.

#ifndef CNER_AUGMENT_H_
#define CNER_AUGMENT_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cner/corpus.h"

namespace cner {

// Distinct entity surfaces per type, in order of first occurrence.
struct EntityInventory {
  std::map<std::string, std::vector<std::u32string>> by_type;

  bool empty() const { return by_type.empty(); }
  std::size_t size() const;
};

EntityInventory ExtractInventory(const Dataset& dataset);

struct Replacement {
  EntityMention mention;  // in the source sentence
  std::u32string surface;
};

// Rewrites `source` with each listed mention's characters replaced.
// Replacements must name mentions of the source, in left-to-right order.
// NER labels of a replaced mention become B then I; in the CWS labels the
// new entity is one word and the word boundaries around it are kept. A
// replacement whose surface equals the original leaves its labels as they
// were. The result is marked pseudo.
LabeledSentence ApplyReplacements(const LabeledSentence& source,
                                  std::span<const Replacement> replacements);

struct PseudoSample {
  LabeledSentence sentence;
  std::size_t source_index = 0;
  std::vector<Replacement> replacements;
};

// `count` times: pick a source sentence uniformly (with replacement), then
// replace every mention with a uniformly drawn same-type inventory entry.
// Throws InputError if a mention's type has no inventory entries or the
// dataset is empty while count > 0.
std::vector<PseudoSample> GeneratePseudo(const Dataset& dataset,
                                         const EntityInventory& inventory,
                                         std::size_t count,
                                         std::uint64_t seed);

// dataset followed by the pseudo sentences.
Dataset Merge(const Dataset& dataset, std::span<const PseudoSample> pseudo);

}  // namespace cner

#endif  // CNER_AUGMENT_H_
