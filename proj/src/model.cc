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

#include "cner/model.h"

#include <algorithm>

#include "cner/errors.h"
#include "cner/rng.h"
#include "cner/utf8.h"

namespace cner {
namespace {

constexpr char kFormat[] = "cner-tagger";

EncoderConfig MakeEncoderConfig(const Vocabulary& vocab,
                                const TrainingConfig& config) {
  config.Validate();
  EncoderConfig out;
  out.vocab_size = vocab.size();
  out.embed_dim = config.embed_dim;
  out.filters = config.filters;
  out.windows = config.windows;
  out.hidden = config.hidden;
  return out;
}

std::set<std::string> SplitLines(const std::string& text) {
  std::set<std::string> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    if (eol > pos) out.insert(text.substr(pos, eol - pos));
    pos = eol + 1;
  }
  return out;
}

}  // namespace

Tagger::Tagger(Vocabulary vocab, LabelAlphabet alphabet,
               const TrainingConfig& config)
    : vocab_(std::move(vocab)),
      alphabet_(std::move(alphabet)),
      config_(config),
      encoder_(MakeEncoderConfig(vocab_, config),
               DeriveSeed(config.seed, 0)),
      ner_head_("crf.ner", 2 * config.hidden, alphabet_.size(),
                DeriveSeed(config.seed, 1)),
      cws_head_("crf.cws", config.filters, 2, DeriveSeed(config.seed, 2)) {}

std::vector<Parameter*> Tagger::Parameters() {
  std::vector<Parameter*> out = encoder_.Parameters();
  for (Parameter* p : ner_head_.Parameters()) out.push_back(p);
  for (Parameter* p : cws_head_.Parameters()) out.push_back(p);
  return out;
}

Checkpoint Tagger::ToCheckpoint() {
  Checkpoint ck;
  ck.metadata["format"] = kFormat;
  ck.metadata["vocab"] = EncodeUtf8(
      std::u32string(vocab_.chars().begin(), vocab_.chars().end()));
  std::string types;
  for (const std::string& t : alphabet_.types()) types += t + "\n";
  ck.metadata["entity_types"] = types;
  for (const std::string& key : ConfigKeys()) {
    ck.metadata["config." + key] = GetConfigValue(config_, key);
  }
  for (Parameter* p : Parameters()) {
    ck.tensors.emplace_back(p->name, p->value);
  }
  return ck;
}

Tagger Tagger::FromCheckpoint(const Checkpoint& checkpoint) {
  if (checkpoint.metadata.count("format") == 0 ||
      checkpoint.Meta("format") != kFormat) {
    throw InputError("checkpoint is not a tagger checkpoint");
  }
  TrainingConfig config;
  for (const std::string& key : ConfigKeys()) {
    SetConfigValue(config, key, checkpoint.Meta("config." + key));
  }
  const std::u32string chars = DecodeUtf8(checkpoint.Meta("vocab"));
  Vocabulary vocab(std::vector<char32_t>(chars.begin(), chars.end()));
  LabelAlphabet alphabet(SplitLines(checkpoint.Meta("entity_types")));
  Tagger tagger(std::move(vocab), std::move(alphabet), config);
  tagger.LoadParameters(checkpoint);
  return tagger;
}

void Tagger::LoadParameters(const Checkpoint& checkpoint) {
  for (Parameter* p : Parameters()) {
    const Tensor& t = checkpoint.Find(p->name);
    if (t.shape() != p->value.shape()) {
      throw InputError("checkpoint tensor " + p->name + " has shape " +
                       ShapeToString(t.shape()) + ", expected " +
                       ShapeToString(p->value.shape()));
    }
    p->value = t;
  }
}

std::vector<std::size_t> Tagger::NerIndices(
    const LabeledSentence& sentence) const {
  std::vector<std::size_t> out;
  out.reserve(sentence.ner.size());
  for (const NerLabel& label : sentence.ner) {
    out.push_back(alphabet_.IndexOf(label));
  }
  return out;
}

std::vector<std::size_t> Tagger::CwsIndices(const LabeledSentence& sentence) {
  std::vector<std::size_t> out;
  for (CwsLabel label : sentence.cws.value()) {
    out.push_back(label == CwsLabel::kB ? kCwsB : kCwsI);
  }
  return out;
}

LossTerms Tagger::ComputeLossTerms(
    Tape& tape, std::span<const LabeledSentence* const> batch, bool with_cws,
    const LossOptions& options) {
  if (batch.empty()) throw InputError("empty batch");
  std::vector<std::vector<std::size_t>> sequences;
  sequences.reserve(batch.size());
  for (const LabeledSentence* s : batch) {
    if (s->ner.size() != s->size()) {
      throw InputError("sentence has mismatched NER labels");
    }
    sequences.push_back(vocab_.Encode(s->chars));
  }
  const PaddedBatch padded = PaddedBatch::Build(sequences);
  const EncoderOutput enc = encoder_.Forward(tape, padded, options.train,
                                             options.dropout, options.seed);

  LossTerms terms;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const std::vector<std::size_t> rows = padded.RowsOf(b);
    Var nll = ner_head_.Nll(tape, GatherRows(enc.hidden, rows),
                            NerIndices(*batch[b]));
    terms.ner = terms.ner.valid() ? Add(terms.ner, nll) : nll;
    if (with_cws && batch[b]->cws) {
      Var cws = cws_head_.Nll(tape, GatherRows(enc.conv, rows),
                              CwsIndices(*batch[b]));
      terms.cws = terms.cws ? Add(*terms.cws, cws) : cws;
    }
  }
  return terms;
}

Var Tagger::JointLoss(Tape& tape,
                      std::span<const LabeledSentence* const> batch,
                      const LossOptions& options) {
  if (!(options.lambda >= 0.0 && options.lambda < 1.0)) {
    throw InputError("lambda must be in [0, 1)");
  }
  const bool with_cws = options.lambda > 0.0;
  const LossTerms terms = ComputeLossTerms(tape, batch, with_cws, options);
  if (!with_cws) return terms.ner;
  Var loss = Scale(terms.ner, 1.0 - options.lambda);
  if (terms.cws) loss = Add(loss, Scale(*terms.cws, options.lambda));
  return loss;
}

Var Tagger::JointLoss(Tape& tape, std::span<const LabeledSentence> batch,
                      const LossOptions& options) {
  std::vector<const LabeledSentence*> pointers;
  for (const LabeledSentence& s : batch) pointers.push_back(&s);
  return JointLoss(tape, pointers, options);
}

std::vector<Prediction> Tagger::Predict(
    std::span<const std::u32string> sentences, bool constrain_bio,
    std::size_t batch_size) {
  if (batch_size == 0) batch_size = 1;
  const TransitionMask mask(alphabet_);
  std::vector<Prediction> out(sentences.size());

  // Empty sentences get an empty prediction and are left out of batches.
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (!sentences[i].empty()) pending.push_back(i);
  }
  for (std::size_t first = 0; first < pending.size(); first += batch_size) {
    const std::size_t last = std::min(pending.size(), first + batch_size);
    std::vector<std::vector<std::size_t>> sequences;
    for (std::size_t k = first; k < last; ++k) {
      sequences.push_back(vocab_.Encode(sentences[pending[k]]));
    }
    const PaddedBatch padded = PaddedBatch::Build(sequences);
    Tape tape;
    const EncoderOutput enc = encoder_.Forward(tape, padded, false, 0.0, 0);
    for (std::size_t b = 0; b < sequences.size(); ++b) {
      Var h = GatherRows(enc.hidden, padded.RowsOf(b));
      const ViterbiResult best =
          ner_head_.Viterbi(h.value(), constrain_bio ? &mask : nullptr);
      Prediction& p = out[pending[first + b]];
      for (std::size_t y : best.labels) p.labels.push_back(alphabet_.label(y));
      DecodedMentions decoded = DecodeLabels(p.labels);
      p.mentions = std::move(decoded.mentions);
      p.repairs = decoded.repairs;
    }
  }
  return out;
}

}  // namespace cner
