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

#include "cner/augment.h"

#include <algorithm>

#include "cner/errors.h"
#include "cner/rng.h"

namespace cner {

std::size_t EntityInventory::size() const {
  std::size_t n = 0;
  for (const auto& [type, list] : by_type) n += list.size();
  return n;
}

EntityInventory ExtractInventory(const Dataset& dataset) {
  EntityInventory inventory;
  for (const LabeledSentence& s : dataset.samples) {
    for (const EntityMention& m : s.Mentions()) {
      auto& list = inventory.by_type[m.type];
      std::u32string surface = s.Surface(m);
      if (std::find(list.begin(), list.end(), surface) == list.end()) {
        list.push_back(std::move(surface));
      }
    }
  }
  return inventory;
}

LabeledSentence ApplyReplacements(const LabeledSentence& source,
                                  std::span<const Replacement> replacements) {
  const std::vector<EntityMention> mentions = source.Mentions();
  LabeledSentence out;
  out.provenance = Provenance::kPseudo;
  std::vector<CwsLabel> cws;
  const bool has_cws = source.cws.has_value();

  // Copies source positions [from, to) verbatim.
  auto copy = [&](std::size_t from, std::size_t to) {
    out.chars.append(source.chars, from, to - from);
    out.ner.insert(out.ner.end(), source.ner.begin() + from,
                   source.ner.begin() + to);
    if (has_cws) {
      cws.insert(cws.end(), source.cws->begin() + from,
                 source.cws->begin() + to);
    }
  };

  std::size_t cursor = 0;
  // Set when a rewritten entity ended right before `cursor`, so the next
  // character must begin a new word.
  bool boundary_pending = false;
  for (const Replacement& r : replacements) {
    const EntityMention& m = r.mention;
    if (std::find(mentions.begin(), mentions.end(), m) == mentions.end()) {
      throw InputError("replacement does not name a mention of the source");
    }
    if (m.start < cursor) {
      throw InputError("replacements are overlapping or out of order");
    }
    if (r.surface.empty()) throw InputError("empty replacement surface");
    copy(cursor, m.start);
    if (boundary_pending && has_cws && m.start > cursor) {
      cws[cws.size() - (m.start - cursor)] = CwsLabel::kB;
    }
    boundary_pending = false;
    if (r.surface == source.Surface(m)) {
      copy(m.start, m.end);
    } else {
      out.chars += r.surface;
      out.ner.push_back(NerLabel::B(m.type));
      out.ner.insert(out.ner.end(), r.surface.size() - 1, NerLabel::I(m.type));
      if (has_cws) {
        cws.push_back(CwsLabel::kB);
        cws.insert(cws.end(), r.surface.size() - 1, CwsLabel::kI);
      }
      boundary_pending = true;
    }
    cursor = m.end;
  }
  const std::size_t tail_start = out.chars.size();
  copy(cursor, source.size());
  if (boundary_pending && has_cws && out.chars.size() > tail_start) {
    cws[tail_start] = CwsLabel::kB;
  }
  if (has_cws) out.cws = std::move(cws);
  return out;
}

std::vector<PseudoSample> GeneratePseudo(const Dataset& dataset,
                                         const EntityInventory& inventory,
                                         std::size_t count,
                                         std::uint64_t seed) {
  std::vector<PseudoSample> out;
  if (count == 0) return out;
  if (dataset.empty()) {
    throw InputError("cannot generate pseudo samples from an empty dataset");
  }
  Rng rng(seed);
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    PseudoSample sample;
    sample.source_index = rng.Index(dataset.size());
    const LabeledSentence& source = dataset.samples[sample.source_index];
    for (const EntityMention& m : source.Mentions()) {
      auto it = inventory.by_type.find(m.type);
      if (it == inventory.by_type.end() || it->second.empty()) {
        throw InputError("no inventory entries for entity type '" + m.type +
                         "'");
      }
      sample.replacements.push_back(
          {m, it->second[rng.Index(it->second.size())]});
    }
    sample.sentence = ApplyReplacements(source, sample.replacements);
    out.push_back(std::move(sample));
  }
  return out;
}

Dataset Merge(const Dataset& dataset, std::span<const PseudoSample> pseudo) {
  Dataset out = dataset;
  for (const PseudoSample& p : pseudo) out.Add(p.sentence);
  return out;
}

}  // namespace cner
