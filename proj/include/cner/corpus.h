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

// Column corpus I/O, vocabularies, embedding files and data splits.
//
// Corpus files are UTF-8, one character per line:
//
//   char<TAB>ner_label[<TAB>cws_label]
//
// Sentences are separated by blank lines. A line "# pseudo" (no TAB) marks
// the sentence it precedes as generated; other '#' lines without a TAB are
// comments.

#ifndef CNER_CORPUS_H_
#define CNER_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cner/tagset.h"
#include "cner/tensor.h"

namespace cner {

enum class Provenance { kReal, kPseudo };

struct LabeledSentence {
  std::u32string chars;
  std::vector<NerLabel> ner;
  std::optional<std::vector<CwsLabel>> cws;
  Provenance provenance = Provenance::kReal;

  std::size_t size() const { return chars.size(); }
  // Mentions decoded from the NER labels.
  std::vector<EntityMention> Mentions() const;
  std::u32string Surface(const EntityMention& mention) const {
    return chars.substr(mention.start, mention.end - mention.start);
  }
};

// Throws InputError describing the first problem: empty sentence, line
// separator in chars, length mismatch, BIO violation or CWS not starting
// with B.
void ValidateSentence(const LabeledSentence& sentence);

struct Dataset {
  std::vector<LabeledSentence> samples;
  std::set<std::string> entity_types;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  // Appends and registers the sample's entity types.
  void Add(LabeledSentence sentence);
};

enum class LabelPolicy { kStrict, kLenient };

struct ColumnOptions {
  // Require the CWS column on every line. When false the column is optional
  // per sentence (all lines of a sentence must agree).
  bool has_cws = false;
  // Strict rejects ill-formed BIO/BI sequences; lenient repairs them.
  LabelPolicy policy = LabelPolicy::kStrict;
};

struct ColumnStats {
  std::size_t repaired_sentences = 0;
  std::size_t repairs = 0;
};

Dataset ParseColumnText(std::string_view text, const std::string& source_name,
                        const ColumnOptions& options = {},
                        ColumnStats* stats = nullptr);
Dataset LoadColumnFile(const std::string& path,
                       const ColumnOptions& options = {},
                       ColumnStats* stats = nullptr);

std::string FormatColumnText(const Dataset& dataset);
void WriteColumnFile(const std::string& path, const Dataset& dataset);

// Character vocabulary with PAD at index 0 and UNK at index 1.
class Vocabulary {
 public:
  static constexpr std::size_t kPad = 0;
  static constexpr std::size_t kUnk = 1;

  Vocabulary() = default;
  // Regular characters in index order (starting at 2). Duplicates throw.
  explicit Vocabulary(std::vector<char32_t> chars);

  // Characters with frequency >= min_count, ordered by code point.
  static Vocabulary Build(const Dataset& dataset, std::size_t min_count = 1);

  std::size_t size() const { return chars_.size() + 2; }
  std::size_t IndexOf(char32_t c) const;
  bool Contains(char32_t c) const { return index_.count(c) != 0; }
  std::vector<std::size_t> Encode(std::u32string_view text) const;
  const std::vector<char32_t>& chars() const { return chars_; }

 private:
  std::vector<char32_t> chars_;
  std::unordered_map<char32_t, std::size_t> index_;
};

struct LoadedEmbeddings {
  Tensor rows;  // V x D, row i is the vector of vocabulary index i
  std::size_t found = 0;
  double coverage = 0.0;  // found / (V - 2)
};

inline constexpr std::size_t kDefaultEmbeddingDim = 200;

// V x D rows drawn uniformly from [-0.25/sqrt(D), 0.25/sqrt(D)], with the
// PAD row zero.
Tensor InitEmbeddingRows(std::size_t vocab_size, std::size_t dim,
                         std::uint64_t seed);

// Reads word2vec-style text vectors ("char v1 ... vD", optional "count dim"
// header). Characters absent from the file are initialized randomly; PAD is
// zero. Throws ParseError on dimension mismatch or unparseable numbers.
LoadedEmbeddings LoadEmbeddings(const std::string& path,
                                const Vocabulary& vocab,
                                std::size_t dim = kDefaultEmbeddingDim,
                                std::uint64_t seed = 0);

inline constexpr double kDefaultValidationRatio = 0.10;

// Returns (train, validation). Validation holds ceil(ratio * |dataset|)
// samples drawn from the real samples only; both parts keep the original
// relative order. Throws InputError if either part would be empty.
std::pair<Dataset, Dataset> SplitTrainVal(const Dataset& dataset,
                                          double ratio, std::uint64_t seed);

// Seeded subset of ceil(fraction * |dataset|) samples, original order kept.
Dataset Subsample(const Dataset& dataset, double fraction, std::uint64_t seed);

}  // namespace cner

#endif  // CNER_CORPUS_H_
