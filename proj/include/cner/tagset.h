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

// Label schemes: BIO for entities, BI for word segmentation.

#ifndef CNER_TAGSET_H_
#define CNER_TAGSET_H_

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cner {

struct NerLabel {
  enum class Kind { kO, kB, kI };

  static NerLabel O() { return {Kind::kO, {}}; }
  static NerLabel B(std::string type) { return {Kind::kB, std::move(type)}; }
  static NerLabel I(std::string type) { return {Kind::kI, std::move(type)}; }

  // "O", "B-PER", "I-LOC". Throws InputError on anything else.
  static NerLabel Parse(std::string_view text);
  std::string ToString() const;

  friend bool operator==(const NerLabel&, const NerLabel&) = default;

  Kind kind = Kind::kO;
  std::string type;  // empty for O
};

enum class CwsLabel { kB, kI };

CwsLabel ParseCwsLabel(std::string_view text);
std::string_view CwsLabelString(CwsLabel label);

struct EntityMention {
  std::string type;
  std::size_t start = 0;  // inclusive
  std::size_t end = 0;    // exclusive

  friend bool operator==(const EntityMention&, const EntityMention&) = default;
  friend auto operator<=>(const EntityMention&, const EntityMention&) = default;
};

// Renders mentions as BIO labels of length n. Throws InputError if a mention
// is empty, out of range, overlapping or out of order.
std::vector<NerLabel> EncodeMentions(std::size_t n,
                                     std::span<const EntityMention> mentions);

struct DecodedMentions {
  std::vector<EntityMention> mentions;
  // Number of I-X labels that had to open a mention because they did not
  // continue a B-X/I-X run.
  std::size_t repairs = 0;
};

// Inverse of EncodeMentions; accepts ill-formed input. An I-X that does not
// continue an X run opens a new X mention and counts as one repair.
DecodedMentions DecodeLabels(std::span<const NerLabel> labels);

// Position of the first BIO violation, if any.
std::optional<std::size_t> FindBioViolation(std::span<const NerLabel> labels);

// Each word contributes B followed by (length - 1) I. Throws InputError on a
// zero-length word.
std::vector<CwsLabel> EncodeSegmentation(
    std::span<const std::size_t> word_lengths);
// Word lengths of a BI sequence; an initial I is treated as B.
std::vector<std::size_t> DecodeSegmentation(std::span<const CwsLabel> labels);

// Ordered NER label alphabet: O, then B-type, I-type per type in
// lexicographic type order.
class LabelAlphabet {
 public:
  LabelAlphabet() = default;
  explicit LabelAlphabet(const std::set<std::string>& types);

  std::size_t size() const { return labels_.size(); }
  const NerLabel& label(std::size_t index) const { return labels_[index]; }
  const std::vector<NerLabel>& labels() const { return labels_; }
  const std::vector<std::string>& types() const { return types_; }
  // Throws InputError for a label outside the alphabet.
  std::size_t IndexOf(const NerLabel& label) const;

 private:
  std::vector<std::string> types_;
  std::vector<NerLabel> labels_;
};

// L x L table of BIO-legal transitions: allowed(a, b) is false exactly when
// b is I-X and a is neither B-X nor I-X.
class TransitionMask {
 public:
  explicit TransitionMask(const LabelAlphabet& alphabet);

  std::size_t size() const { return size_; }
  bool allowed(std::size_t from, std::size_t to) const {
    return allowed_[from * size_ + to] != 0;
  }
  // Whether a sentence may start with the label (false for I-X).
  bool allowed_start(std::size_t to) const { return start_[to] != 0; }

 private:
  std::size_t size_;
  std::vector<unsigned char> allowed_;
  std::vector<unsigned char> start_;
};

}  // namespace cner

#endif  // CNER_TAGSET_H_
