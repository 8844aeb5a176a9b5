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

#ifndef CNER_GRAD_CHECK_H_
#define CNER_GRAD_CHECK_H_

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cner/tape.h"

namespace cner {

struct ParameterGradCheck {
  std::string name;
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  double analytic_at_worst = 0.0;
  double numeric_at_worst = 0.0;
  std::size_t checked = 0;
};

struct GradCheckReport {
  std::vector<ParameterGradCheck> parameters;
  double tolerance = 0.0;

  double max_rel_error() const;
  bool passed() const { return max_rel_error() < tolerance; }
};

// Builds a scalar loss on the given tape from the current parameter values.
using LossBuilder = std::function<Var(Tape&)>;

// Compares reverse-mode gradients against central differences
// (f(x + eps) - f(x - eps)) / 2eps for every trainable, non-frozen entry of
// every parameter. Relative error is |a - n| / max(|a|, |n|, 1e-8).
// Throws NumericError if two forward passes of the closure disagree.
// Parameter grads are left zeroed.
GradCheckReport GradCheck(const LossBuilder& build_loss,
                          std::span<Parameter* const> parameters,
                          double eps = 1e-5, double tolerance = 1e-4);

}  // namespace cner

#endif  // CNER_GRAD_CHECK_H_
