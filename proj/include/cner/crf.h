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

// First-order linear-chain CRF.
//
// score(y) = sum_i emission(i, y_i) + start[y_1] + sum_{i>1} T[y_{i-1}][y_i]
// with emission = inputs * W. There is no end score.

#ifndef CNER_CRF_H_
#define CNER_CRF_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cner/tagset.h"
#include "cner/tape.h"

namespace cner {

// Differentiable pieces over an N x L emission matrix, an L x L transition
// matrix and a start vector of length L.
Var CrfSequenceScore(Var emissions, Var transitions, Var start,
                     std::span<const std::size_t> labels);
Var CrfLogPartition(Var emissions, Var transitions, Var start);

struct ViterbiResult {
  std::vector<std::size_t> labels;
  double score = 0.0;
};

// Max-scoring path. Ties go to the lower label index, resolved from the last
// position backwards. With a mask, forbidden transitions and starts are
// excluded.
ViterbiResult ViterbiDecode(const Tensor& emissions, const Tensor& transitions,
                            const Tensor& start,
                            const TransitionMask* mask = nullptr);

struct BruteForceResult {
  double log_partition = 0.0;
  std::vector<std::size_t> best_labels;
  double best_score = 0.0;
};

inline constexpr std::size_t kBruteForceLimit = 1000000;

// Exhaustive enumeration of all L^N paths, for testing. Throws InputError if
// L^N exceeds kBruteForceLimit.
BruteForceResult CrfBruteForce(const Tensor& emissions,
                               const Tensor& transitions, const Tensor& start);

class CrfHead {
 public:
  // prefix is "crf.ner" or "crf.cws". W starts Glorot-uniform; T and start
  // start at zero.
  CrfHead(const std::string& prefix, std::size_t input_dim,
          std::size_t labels, std::uint64_t seed);

  std::size_t labels() const { return start_.value.size(); }
  std::size_t input_dim() const { return weights_.value.rows(); }

  Var Emissions(Tape& tape, Var inputs);
  Var Score(Tape& tape, Var inputs, std::span<const std::size_t> labels);
  Var LogPartition(Tape& tape, Var inputs);
  // LogPartition - Score, sharing one emission computation.
  Var Nll(Tape& tape, Var inputs, std::span<const std::size_t> labels);

  // Plain (tape-free) evaluation for decoding.
  Tensor EmissionScores(const Tensor& inputs) const;
  ViterbiResult Viterbi(const Tensor& inputs,
                        const TransitionMask* mask = nullptr) const;

  Parameter& weights() { return weights_; }
  Parameter& transitions() { return transitions_; }
  Parameter& start() { return start_; }
  const Parameter& weights() const { return weights_; }
  const Parameter& transitions() const { return transitions_; }
  const Parameter& start() const { return start_; }
  std::vector<Parameter*> Parameters() {
    return {&weights_, &transitions_, &start_};
  }

 private:
  void CheckLabels(std::span<const std::size_t> labels) const;

  Parameter weights_;      // In x L
  Parameter transitions_;  // L x L, T[a][b] scores a -> b
  Parameter start_;        // L
};

}  // namespace cner

#endif  // CNER_CRF_H_
