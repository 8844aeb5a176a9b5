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

#include "cner/tagset.h"

#include "cner/errors.h"

namespace cner {

NerLabel NerLabel::Parse(std::string_view text) {
  if (text == "O") return O();
  if (text.size() > 2 && text[1] == '-') {
    std::string type(text.substr(2));
    if (text[0] == 'B') return B(std::move(type));
    if (text[0] == 'I') return I(std::move(type));
  }
  throw InputError("invalid NER label '" + std::string(text) + "'");
}

std::string NerLabel::ToString() const {
  switch (kind) {
    case Kind::kO: return "O";
    case Kind::kB: return "B-" + type;
    case Kind::kI: return "I-" + type;
  }
  return "O";
}

CwsLabel ParseCwsLabel(std::string_view text) {
  if (text == "B") return CwsLabel::kB;
  if (text == "I") return CwsLabel::kI;
  throw InputError("invalid CWS label '" + std::string(text) + "'");
}

std::string_view CwsLabelString(CwsLabel label) {
  return label == CwsLabel::kB ? "B" : "I";
}

std::vector<NerLabel> EncodeMentions(std::size_t n,
                                     std::span<const EntityMention> mentions) {
  std::vector<NerLabel> labels(n, NerLabel::O());
  std::size_t previous_end = 0;
  for (const EntityMention& m : mentions) {
    if (m.start >= m.end || m.end > n) {
      throw InputError("mention [" + std::to_string(m.start) + "," +
                       std::to_string(m.end) + ") out of range for length " +
                       std::to_string(n));
    }
    if (m.start < previous_end) {
      throw InputError("mentions overlap or are not sorted at offset " +
                       std::to_string(m.start));
    }
    if (m.type.empty()) throw InputError("mention with empty type");
    labels[m.start] = NerLabel::B(m.type);
    for (std::size_t i = m.start + 1; i < m.end; ++i) {
      labels[i] = NerLabel::I(m.type);
    }
    previous_end = m.end;
  }
  return labels;
}

DecodedMentions DecodeLabels(std::span<const NerLabel> labels) {
  DecodedMentions out;
  std::optional<EntityMention> open;
  auto close = [&](std::size_t at) {
    if (open) {
      open->end = at;
      out.mentions.push_back(std::move(*open));
      open.reset();
    }
  };
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const NerLabel& label = labels[i];
    switch (label.kind) {
      case NerLabel::Kind::kO:
        close(i);
        break;
      case NerLabel::Kind::kB:
        close(i);
        open = EntityMention{label.type, i, i};
        break;
      case NerLabel::Kind::kI:
        if (!open || open->type != label.type) {
          close(i);
          open = EntityMention{label.type, i, i};
          ++out.repairs;
        }
        break;
    }
  }
  close(labels.size());
  return out;
}

std::optional<std::size_t> FindBioViolation(std::span<const NerLabel> labels) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i].kind != NerLabel::Kind::kI) continue;
    if (i == 0 || labels[i - 1].kind == NerLabel::Kind::kO ||
        labels[i - 1].type != labels[i].type) {
      return i;
    }
  }
  return std::nullopt;
}

std::vector<CwsLabel> EncodeSegmentation(
    std::span<const std::size_t> word_lengths) {
  std::vector<CwsLabel> labels;
  for (std::size_t len : word_lengths) {
    if (len == 0) throw InputError("zero-length word in segmentation");
    labels.push_back(CwsLabel::kB);
    labels.insert(labels.end(), len - 1, CwsLabel::kI);
  }
  return labels;
}

std::vector<std::size_t> DecodeSegmentation(std::span<const CwsLabel> labels) {
  std::vector<std::size_t> lengths;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i == 0 || labels[i] == CwsLabel::kB) {
      lengths.push_back(1);
    } else {
      ++lengths.back();
    }
  }
  return lengths;
}

LabelAlphabet::LabelAlphabet(const std::set<std::string>& types)
    : types_(types.begin(), types.end()) {
  labels_.push_back(NerLabel::O());
  for (const std::string& type : types_) {
    labels_.push_back(NerLabel::B(type));
    labels_.push_back(NerLabel::I(type));
  }
}

std::size_t LabelAlphabet::IndexOf(const NerLabel& label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) return i;
  }
  throw InputError("label '" + label.ToString() + "' not in alphabet");
}

TransitionMask::TransitionMask(const LabelAlphabet& alphabet)
    : size_(alphabet.size()),
      allowed_(size_ * size_, 1),
      start_(size_, 1) {
  for (std::size_t to = 0; to < size_; ++to) {
    const NerLabel& next = alphabet.label(to);
    if (next.kind != NerLabel::Kind::kI) continue;
    start_[to] = 0;
    for (std::size_t from = 0; from < size_; ++from) {
      const NerLabel& prev = alphabet.label(from);
      const bool continues =
          prev.kind != NerLabel::Kind::kO && prev.type == next.type;
      allowed_[from * size_ + to] = continues ? 1 : 0;
    }
  }
}

}  // namespace cner
