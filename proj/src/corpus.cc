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

#include "cner/corpus.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>

#include "cner/errors.h"
#include "cner/rng.h"
#include "cner/utf8.h"

namespace cner {
namespace {

bool IsLineSeparator(char32_t c) {
  return c == U'\n' || c == U'\r' || c == U'\v' || c == U'\f' ||
         c == 0x85 || c == 0x2028 || c == 0x2029;
}

std::string_view TrimRight(std::string_view s) {
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

bool IsBlank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) {
    return c == ' ' || c == '\t' || c == '\r';
  });
}

std::vector<std::string_view> SplitOn(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t begin = 0;
  while (true) {
    const std::size_t pos = s.find(sep, begin);
    out.push_back(s.substr(begin, pos - begin));
    if (pos == std::string_view::npos) break;
    begin = pos + 1;
  }
  return out;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

// Accumulates the lines of one sentence block.
struct Block {
  LabeledSentence sentence;
  std::vector<std::size_t> lines;
  std::vector<CwsLabel> cws;
  std::optional<bool> with_cws;
  bool pseudo = false;

  bool empty() const { return lines.empty(); }
};

}  // namespace

std::vector<EntityMention> LabeledSentence::Mentions() const {
  return DecodeLabels(ner).mentions;
}

void ValidateSentence(const LabeledSentence& sentence) {
  if (sentence.chars.empty()) throw InputError("empty sentence");
  for (std::size_t i = 0; i < sentence.chars.size(); ++i) {
    if (IsLineSeparator(sentence.chars[i])) {
      throw InputError("line separator inside sentence at position " +
                       std::to_string(i));
    }
  }
  if (sentence.ner.size() != sentence.chars.size()) {
    throw InputError("NER label count " + std::to_string(sentence.ner.size()) +
                     " != character count " +
                     std::to_string(sentence.chars.size()));
  }
  if (auto bad = FindBioViolation(sentence.ner)) {
    throw InputError("invalid BIO sequence at position " +
                     std::to_string(*bad) + " (" +
                     sentence.ner[*bad].ToString() + ")");
  }
  if (sentence.cws) {
    if (sentence.cws->size() != sentence.chars.size()) {
      throw InputError("CWS label count " +
                       std::to_string(sentence.cws->size()) +
                       " != character count " +
                       std::to_string(sentence.chars.size()));
    }
    if (sentence.cws->front() != CwsLabel::kB) {
      throw InputError("CWS labels must start with B");
    }
  }
}

void Dataset::Add(LabeledSentence sentence) {
  for (const NerLabel& label : sentence.ner) {
    if (label.kind != NerLabel::Kind::kO) entity_types.insert(label.type);
  }
  samples.push_back(std::move(sentence));
}

Dataset ParseColumnText(std::string_view text, const std::string& source_name,
                        const ColumnOptions& options, ColumnStats* stats) {
  Dataset dataset;
  Block block;
  bool pending_pseudo = false;

  auto flush = [&]() {
    if (block.empty()) return;
    LabeledSentence& s = block.sentence;
    if (*block.with_cws) s.cws = std::move(block.cws);
    s.provenance = block.pseudo ? Provenance::kPseudo : Provenance::kReal;
    if (auto bad = FindBioViolation(s.ner)) {
      if (options.policy == LabelPolicy::kStrict) {
        throw ParseError(source_name, block.lines[*bad],
                         "invalid BIO sequence: '" + s.ner[*bad].ToString() +
                             "' at position " + std::to_string(*bad) +
                             " does not continue an entity");
      }
      const DecodedMentions decoded = DecodeLabels(s.ner);
      s.ner = EncodeMentions(s.ner.size(), decoded.mentions);
      if (stats) {
        ++stats->repaired_sentences;
        stats->repairs += decoded.repairs;
      }
    }
    if (s.cws && s.cws->front() != CwsLabel::kB) {
      if (options.policy == LabelPolicy::kStrict) {
        throw ParseError(source_name, block.lines[0],
                         "CWS labels must start with B");
      }
      s.cws->front() = CwsLabel::kB;
      if (stats) {
        ++stats->repaired_sentences;
        ++stats->repairs;
      }
    }
    dataset.Add(std::move(s));
    block = Block{};
  };

  std::size_t line_no = 0;
  for (std::string_view raw : SplitOn(text, '\n')) {
    ++line_no;
    std::string_view line = TrimRight(raw);
    if (IsBlank(line)) {
      flush();
      continue;
    }
    if (line.front() == '#' && line.find('\t') == std::string_view::npos) {
      if (line == "# pseudo") {
        flush();
        pending_pseudo = true;
      }
      continue;
    }
    const std::vector<std::string_view> fields = SplitOn(line, '\t');
    if (fields.size() < 2 || fields.size() > 3) {
      throw ParseError(source_name, line_no,
                       "expected char<TAB>ner_label[<TAB>cws_label], got " +
                           std::to_string(fields.size()) + " field(s)");
    }
    const bool with_cws = fields.size() == 3;
    if (options.has_cws && !with_cws) {
      throw ParseError(source_name, line_no, "missing CWS label column");
    }
    if (block.with_cws && *block.with_cws != with_cws) {
      throw ParseError(source_name, line_no,
                       "label/char count mismatch: CWS column present on only "
                       "some lines of the sentence");
    }
    std::u32string chars;
    try {
      chars = DecodeUtf8(fields[0]);
    } catch (const InputError& e) {
      throw ParseError(source_name, line_no, e.what());
    }
    if (chars.size() != 1 || IsLineSeparator(chars[0])) {
      throw ParseError(source_name, line_no,
                       "first column must be exactly one character");
    }
    try {
      block.sentence.ner.push_back(NerLabel::Parse(fields[1]));
      if (with_cws) block.cws.push_back(ParseCwsLabel(fields[2]));
    } catch (const InputError& e) {
      throw ParseError(source_name, line_no, e.what());
    }
    if (block.empty()) {
      block.with_cws = with_cws;
      block.pseudo = pending_pseudo;
      pending_pseudo = false;
    }
    block.sentence.chars.push_back(chars[0]);
    block.lines.push_back(line_no);
  }
  flush();
  return dataset;
}

Dataset LoadColumnFile(const std::string& path, const ColumnOptions& options,
                       ColumnStats* stats) {
  return ParseColumnText(ReadFile(path), path, options, stats);
}

std::string FormatColumnText(const Dataset& dataset) {
  std::string out;
  for (std::size_t s = 0; s < dataset.samples.size(); ++s) {
    const LabeledSentence& sentence = dataset.samples[s];
    if (s > 0) out += "\n";
    if (sentence.provenance == Provenance::kPseudo) out += "# pseudo\n";
    for (std::size_t i = 0; i < sentence.chars.size(); ++i) {
      out += EncodeUtf8(sentence.chars[i]);
      out += '\t';
      out += sentence.ner[i].ToString();
      if (sentence.cws) {
        out += '\t';
        out += CwsLabelString((*sentence.cws)[i]);
      }
      out += '\n';
    }
  }
  return out;
}

void WriteColumnFile(const std::string& path, const Dataset& dataset) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  out << FormatColumnText(dataset);
  if (!out) throw InputError("failed writing '" + path + "'");
}

Vocabulary::Vocabulary(std::vector<char32_t> chars) : chars_(std::move(chars)) {
  for (std::size_t i = 0; i < chars_.size(); ++i) {
    if (!index_.emplace(chars_[i], i + 2).second) {
      throw InputError("duplicate character in vocabulary");
    }
  }
}

Vocabulary Vocabulary::Build(const Dataset& dataset, std::size_t min_count) {
  std::map<char32_t, std::size_t> counts;
  for (const LabeledSentence& s : dataset.samples) {
    for (char32_t c : s.chars) ++counts[c];
  }
  std::vector<char32_t> chars;
  for (const auto& [c, n] : counts) {
    if (n >= std::max<std::size_t>(min_count, 1)) chars.push_back(c);
  }
  return Vocabulary(std::move(chars));
}

std::size_t Vocabulary::IndexOf(char32_t c) const {
  auto it = index_.find(c);
  return it == index_.end() ? kUnk : it->second;
}

std::vector<std::size_t> Vocabulary::Encode(std::u32string_view text) const {
  std::vector<std::size_t> out;
  out.reserve(text.size());
  for (char32_t c : text) out.push_back(IndexOf(c));
  return out;
}

Tensor InitEmbeddingRows(std::size_t vocab_size, std::size_t dim,
                         std::uint64_t seed) {
  if (dim == 0) throw InputError("embedding dimension must be positive");
  Tensor rows({vocab_size, dim});
  Rng rng(seed);
  const double bound = 0.25 / std::sqrt(static_cast<double>(dim));
  for (std::size_t v = 0; v < vocab_size; ++v) {
    for (std::size_t d = 0; d < dim; ++d) {
      const double x = rng.Uniform(-bound, bound);
      rows.at(v, d) = v == Vocabulary::kPad ? 0.0 : x;
    }
  }
  return rows;
}

LoadedEmbeddings LoadEmbeddings(const std::string& path,
                                const Vocabulary& vocab, std::size_t dim,
                                std::uint64_t seed) {
  const std::string text = ReadFile(path);
  LoadedEmbeddings out;
  out.rows = InitEmbeddingRows(vocab.size(), dim, seed);
  std::vector<bool> seen(vocab.size(), false);

  auto parse_size = [](std::string_view s) -> std::optional<std::size_t> {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
  };

  std::size_t line_no = 0;
  for (std::string_view raw : SplitOn(text, '\n')) {
    ++line_no;
    std::string_view line = TrimRight(raw);
    if (IsBlank(line)) continue;
    std::vector<std::string_view> fields = SplitOn(line, ' ');
    std::erase_if(fields, [](std::string_view f) { return f.empty(); });
    if (line_no == 1 && fields.size() == 2 && fields.size() != dim + 1) {
      auto count = parse_size(fields[0]);
      auto header_dim = parse_size(fields[1]);
      if (count && header_dim) {
        if (*header_dim != dim) {
          throw ParseError(path, line_no,
                           "embedding dimension " +
                               std::to_string(*header_dim) +
                               " does not match requested " +
                               std::to_string(dim));
        }
        continue;
      }
    }
    if (fields.size() != dim + 1) {
      throw ParseError(path, line_no,
                       "expected 1 + " + std::to_string(dim) +
                           " fields, got " + std::to_string(fields.size()));
    }
    std::u32string key;
    try {
      key = DecodeUtf8(fields[0]);
    } catch (const InputError& e) {
      throw ParseError(path, line_no, e.what());
    }
    std::vector<double> values(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      std::string_view f = fields[d + 1];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), values[d]);
      if (ec != std::errc() || ptr != f.data() + f.size() ||
          !std::isfinite(values[d])) {
        throw ParseError(path, line_no,
                         "unparseable value '" + std::string(f) + "'");
      }
    }
    if (key.size() != 1 || !vocab.Contains(key[0])) continue;
    const std::size_t index = vocab.IndexOf(key[0]);
    std::copy(values.begin(), values.end(), &out.rows.at(index, 0));
    if (!seen[index]) {
      seen[index] = true;
      ++out.found;
    }
  }
  const std::size_t regular = vocab.size() - 2;
  out.coverage = regular == 0 ? 0.0
                              : static_cast<double>(out.found) /
                                    static_cast<double>(regular);
  return out;
}

std::pair<Dataset, Dataset> SplitTrainVal(const Dataset& dataset, double ratio,
                                          std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw InputError("validation ratio must lie in (0, 1)");
  }
  const std::size_t n = dataset.size();
  const auto val_size = static_cast<std::size_t>(
      std::ceil(ratio * static_cast<double>(n) - 1e-9));
  std::vector<std::size_t> real;
  for (std::size_t i = 0; i < n; ++i) {
    if (dataset.samples[i].provenance == Provenance::kReal) real.push_back(i);
  }
  if (val_size == 0 || val_size >= n || val_size > real.size()) {
    throw InputError("dataset of " + std::to_string(n) + " samples (" +
                     std::to_string(real.size()) +
                     " real) is too small for a validation split at ratio " +
                     std::to_string(ratio));
  }
  Rng rng(seed);
  rng.Shuffle(std::span<std::size_t>(real));
  std::vector<bool> in_val(n, false);
  for (std::size_t k = 0; k < val_size; ++k) in_val[real[k]] = true;

  std::pair<Dataset, Dataset> out;
  out.first.entity_types = dataset.entity_types;
  out.second.entity_types = dataset.entity_types;
  for (std::size_t i = 0; i < n; ++i) {
    (in_val[i] ? out.second : out.first).samples.push_back(dataset.samples[i]);
  }
  return out;
}

Dataset Subsample(const Dataset& dataset, double fraction,
                  std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw InputError("subsample fraction must lie in (0, 1]");
  }
  const std::size_t n = dataset.size();
  const auto keep = std::min(
      n, static_cast<std::size_t>(
             std::ceil(fraction * static_cast<double>(n) - 1e-9)));
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.Shuffle(std::span<std::size_t>(order));
  order.resize(keep);
  std::sort(order.begin(), order.end());
  Dataset out;
  for (std::size_t i : order) out.Add(dataset.samples[i]);
  return out;
}

}  // namespace cner
