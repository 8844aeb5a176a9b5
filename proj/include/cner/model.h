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

// The joint tagger: a shared character encoder with an NER CRF over the
// BiLSTM states and a segmentation CRF over the convolution features.

#ifndef CNER_MODEL_H_
#define CNER_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cner/checkpoint.h"
#include "cner/config.h"
#include "cner/corpus.h"
#include "cner/crf.h"
#include "cner/layers.h"
#include "cner/tagset.h"

namespace cner {

// Segmentation label indices.
inline constexpr std::size_t kCwsB = 0;
inline constexpr std::size_t kCwsI = 1;

struct LossOptions {
  double lambda = 0.4;
  double dropout = 0.0;
  bool train = false;
  std::uint64_t seed = 0;
};

struct LossTerms {
  Var ner;                 // sum of NER negative log-likelihoods
  std::optional<Var> cws;  // sum over sentences that carry CWS labels
};

struct Prediction {
  std::vector<NerLabel> labels;
  std::vector<EntityMention> mentions;
  std::size_t repairs = 0;  // ill-formed BIO fixes made while decoding
};

class Tagger {
 public:
  // Parameters are initialized from config.seed.
  Tagger(Vocabulary vocab, LabelAlphabet alphabet,
         const TrainingConfig& config);

  // Rebuilds a tagger from a checkpoint written by ToCheckpoint. Throws
  // InputError if tensors are missing or their shapes do not match the
  // stored vocabulary, label set and dimensions.
  static Tagger FromCheckpoint(const Checkpoint& checkpoint);
  Checkpoint ToCheckpoint();

  // Overwrites parameter values from a checkpoint of the same architecture.
  void LoadParameters(const Checkpoint& checkpoint);

  const Vocabulary& vocab() const { return vocab_; }
  const LabelAlphabet& alphabet() const { return alphabet_; }
  const TrainingConfig& config() const { return config_; }
  Encoder& encoder() { return encoder_; }
  CrfHead& ner_head() { return ner_head_; }
  CrfHead& cws_head() { return cws_head_; }

  // Every parameter, in serialization order.
  std::vector<Parameter*> Parameters();

  std::vector<std::size_t> NerIndices(const LabeledSentence& sentence) const;
  static std::vector<std::size_t> CwsIndices(const LabeledSentence& sentence);

  // One shared encoder pass over the batch. The CWS term is evaluated only
  // when with_cws is set.
  LossTerms ComputeLossTerms(Tape& tape,
                             std::span<const LabeledSentence* const> batch,
                             bool with_cws, const LossOptions& options);

  // (1 - lambda) * NER + lambda * CWS, summed over sentences. At lambda = 0
  // this is the NER sum itself and the CWS head is not evaluated.
  Var JointLoss(Tape& tape, std::span<const LabeledSentence* const> batch,
                const LossOptions& options);
  Var JointLoss(Tape& tape, std::span<const LabeledSentence> batch,
                const LossOptions& options);

  // Viterbi decoding with dropout off, optionally under the BIO mask.
  std::vector<Prediction> Predict(std::span<const std::u32string> sentences,
                                  bool constrain_bio = false,
                                  std::size_t batch_size = 32);

 private:
  Vocabulary vocab_;
  LabelAlphabet alphabet_;
  TrainingConfig config_;
  Encoder encoder_;
  CrfHead ner_head_;
  CrfHead cws_head_;
};

}  // namespace cner

#endif  // CNER_MODEL_H_
