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

#include "cner/crf.h"

#include <cmath>
#include <limits>

#include "cner/errors.h"
#include "cner/layers.h"

namespace cner {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void CheckShapes(const Shape& emissions, const Shape& transitions,
                 const Shape& start) {
  if (emissions.size() != 2 || emissions[0] == 0) {
    throw InputError("CRF emissions must be a non-empty N x L matrix, got " +
                     ShapeToString(emissions));
  }
  const std::size_t l = emissions[1];
  if (transitions != Shape{l, l} || start != Shape{l}) {
    throw InputError("CRF parameter shapes " + ShapeToString(transitions) +
                     " / " + ShapeToString(start) + " do not match L = " +
                     std::to_string(l));
  }
}

}  // namespace

Var CrfSequenceScore(Var emissions, Var transitions, Var start,
                     std::span<const std::size_t> labels) {
  CheckShapes(emissions.shape(), transitions.shape(), start.shape());
  const std::size_t n = emissions.shape()[0];
  const std::size_t l = emissions.shape()[1];
  if (labels.size() != n) {
    throw InputError("CRF: " + std::to_string(labels.size()) +
                     " labels for " + std::to_string(n) + " positions");
  }
  for (std::size_t y : labels) {
    if (y >= l) {
      throw InputError("CRF label index " + std::to_string(y) +
                       " out of range for " + std::to_string(l) + " labels");
    }
  }
  std::vector<std::size_t> emission_index(n);
  for (std::size_t i = 0; i < n; ++i) emission_index[i] = i * l + labels[i];
  const std::size_t first[] = {labels[0]};
  Var score = Add(Sum(GatherElements(emissions, emission_index)),
                  Sum(GatherElements(start, first)));
  if (n > 1) {
    std::vector<std::size_t> transition_index(n - 1);
    for (std::size_t i = 1; i < n; ++i) {
      transition_index[i - 1] = labels[i - 1] * l + labels[i];
    }
    score = Add(score, Sum(GatherElements(transitions, transition_index)));
  }
  return score;
}

Var CrfLogPartition(Var emissions, Var transitions, Var start) {
  CheckShapes(emissions.shape(), transitions.shape(), start.shape());
  const std::size_t n = emissions.shape()[0];
  const std::size_t l = emissions.shape()[1];
  // alpha is kept as a 1 x L row.
  Var alpha = Add(Slice(emissions, 0, 0, 1), start);
  for (std::size_t i = 1; i < n; ++i) {
    Var paths = Add(Reshape(alpha, {l, 1}), transitions);  // L x L
    alpha = Add(LogSumExp(paths, 0), Slice(emissions, 0, i, i + 1));
  }
  return LogSumExp(Reshape(alpha, {l}), 0);
}

ViterbiResult ViterbiDecode(const Tensor& emissions, const Tensor& transitions,
                            const Tensor& start, const TransitionMask* mask) {
  CheckShapes(emissions.shape(), transitions.shape(), start.shape());
  const std::size_t n = emissions.rows();
  const std::size_t l = emissions.cols();
  if (mask != nullptr && mask->size() != l) {
    throw InputError("transition mask size does not match label count");
  }

  std::vector<double> delta(l);
  for (std::size_t y = 0; y < l; ++y) {
    const bool ok = mask == nullptr || mask->allowed_start(y);
    delta[y] = ok ? emissions.at(0, y) + start[y] : kNegInf;
  }
  std::vector<std::size_t> back(n * l, 0);
  std::vector<double> next(l);
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t y = 0; y < l; ++y) {
      double best = kNegInf;
      std::size_t arg = 0;
      for (std::size_t p = 0; p < l; ++p) {
        if (mask != nullptr && !mask->allowed(p, y)) continue;
        const double s = delta[p] + transitions.at(p, y);
        if (s > best) {
          best = s;
          arg = p;
        }
      }
      next[y] = best + emissions.at(i, y);
      back[i * l + y] = arg;
    }
    delta.swap(next);
  }

  ViterbiResult result;
  result.labels.assign(n, 0);
  double best = kNegInf;
  for (std::size_t y = 0; y < l; ++y) {
    if (delta[y] > best) {
      best = delta[y];
      result.labels[n - 1] = y;
    }
  }
  result.score = best;
  for (std::size_t i = n - 1; i > 0; --i) {
    result.labels[i - 1] = back[i * l + result.labels[i]];
  }
  return result;
}

BruteForceResult CrfBruteForce(const Tensor& emissions,
                               const Tensor& transitions, const Tensor& start) {
  CheckShapes(emissions.shape(), transitions.shape(), start.shape());
  const std::size_t n = emissions.rows();
  const std::size_t l = emissions.cols();
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (total > kBruteForceLimit / l) {
      throw InputError("brute force over " + std::to_string(l) + "^" +
                       std::to_string(n) + " sequences exceeds the limit");
    }
    total *= l;
  }

  // Enumerate in an order where the first position varies fastest, so the
  // first maximum met is the one smallest from the last position backwards.
  std::vector<double> scores(total);
  BruteForceResult result;
  result.best_score = kNegInf;
  std::vector<std::size_t> y(n, 0);
  for (std::size_t k = 0; k < total; ++k) {
    std::size_t code = k;
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = code % l;
      code /= l;
    }
    double s = start[y[0]];
    for (std::size_t i = 0; i < n; ++i) s += emissions.at(i, y[i]);
    for (std::size_t i = 1; i < n; ++i) s += transitions.at(y[i - 1], y[i]);
    scores[k] = s;
    if (s > result.best_score) {
      result.best_score = s;
      result.best_labels = y;
    }
  }
  double total_exp = 0.0;
  for (double s : scores) total_exp += std::exp(s - result.best_score);
  result.log_partition = result.best_score + std::log(total_exp);
  return result;
}

CrfHead::CrfHead(const std::string& prefix, std::size_t input_dim,
                 std::size_t labels, std::uint64_t seed)
    : weights_(prefix + ".W",
               GlorotUniform(input_dim, labels, {input_dim, labels}, seed)),
      transitions_(prefix + ".T", Tensor({labels, labels})),
      start_(prefix + ".start", Tensor({labels})) {
  if (labels < 2) throw InputError("a CRF needs at least two labels");
  if (input_dim == 0) throw InputError("CRF input dimension must be positive");
}

void CrfHead::CheckLabels(std::span<const std::size_t> labels) const {
  for (std::size_t y : labels) {
    if (y >= this->labels()) {
      throw InputError("label index " + std::to_string(y) +
                       " out of range for " + std::to_string(this->labels()) +
                       " labels");
    }
  }
}

Var CrfHead::Emissions(Tape& tape, Var inputs) {
  return MatMul(inputs, tape.Watch(weights_));
}

Var CrfHead::Score(Tape& tape, Var inputs,
                   std::span<const std::size_t> labels) {
  CheckLabels(labels);
  return CrfSequenceScore(Emissions(tape, inputs), tape.Watch(transitions_),
                          tape.Watch(start_), labels);
}

Var CrfHead::LogPartition(Tape& tape, Var inputs) {
  return CrfLogPartition(Emissions(tape, inputs), tape.Watch(transitions_),
                         tape.Watch(start_));
}

Var CrfHead::Nll(Tape& tape, Var inputs, std::span<const std::size_t> labels) {
  CheckLabels(labels);
  Var emissions = Emissions(tape, inputs);
  Var transitions = tape.Watch(transitions_);
  Var start = tape.Watch(start_);
  return Sub(CrfLogPartition(emissions, transitions, start),
             CrfSequenceScore(emissions, transitions, start, labels));
}

Tensor CrfHead::EmissionScores(const Tensor& inputs) const {
  if (inputs.rank() != 2 || inputs.cols() != input_dim()) {
    throw InputError("CRF inputs of shape " + ShapeToString(inputs.shape()) +
                     " do not match input dimension " +
                     std::to_string(input_dim()));
  }
  const std::size_t n = inputs.rows();
  const std::size_t l = labels();
  Tensor out({n, l});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < input_dim(); ++k) {
      const double x = inputs.at(i, k);
      for (std::size_t y = 0; y < l; ++y) {
        out.at(i, y) += x * weights_.value.at(k, y);
      }
    }
  }
  return out;
}

ViterbiResult CrfHead::Viterbi(const Tensor& inputs,
                               const TransitionMask* mask) const {
  return ViterbiDecode(EmissionScores(inputs), transitions_.value,
                       start_.value, mask);
}

}  // namespace cner
