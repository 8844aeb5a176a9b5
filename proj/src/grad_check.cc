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

#include "cner/grad_check.h"

#include <algorithm>
#include <cmath>

#include "cner/errors.h"

namespace cner {

double GradCheckReport::max_rel_error() const {
  double worst = 0.0;
  for (const auto& p : parameters) worst = std::max(worst, p.max_rel_error);
  return worst;
}

namespace {

double Evaluate(const LossBuilder& build_loss) {
  Tape tape;
  return build_loss(tape).value().item();
}

bool IsFrozen(const Parameter& p, std::size_t flat) {
  if (p.frozen_columns.empty()) return false;
  const std::size_t col = flat % p.value.cols();
  return std::find(p.frozen_columns.begin(), p.frozen_columns.end(), col) !=
         p.frozen_columns.end();
}

}  // namespace

GradCheckReport GradCheck(const LossBuilder& build_loss,
                          std::span<Parameter* const> parameters, double eps,
                          double tolerance) {
  const double first = Evaluate(build_loss);
  const double second = Evaluate(build_loss);
  if (first != second) {
    throw NumericError(
        "gradient check: loss closure is not deterministic (two forward "
        "passes gave different values)");
  }

  for (Parameter* p : parameters) p->ZeroGrad();
  {
    Tape tape;
    tape.Backward(build_loss(tape));
  }

  GradCheckReport report;
  report.tolerance = tolerance;
  for (Parameter* p : parameters) {
    ParameterGradCheck check;
    check.name = p->name;
    if (!p->trainable) {
      report.parameters.push_back(check);
      continue;
    }
    for (std::size_t i = 0; i < p->value.size(); ++i) {
      if (IsFrozen(*p, i)) continue;
      const double original = p->value[i];
      p->value[i] = original + eps;
      const double plus = Evaluate(build_loss);
      p->value[i] = original - eps;
      const double minus = Evaluate(build_loss);
      p->value[i] = original;
      const double numeric = (plus - minus) / (2.0 * eps);
      const double analytic = p->grad[i];
      const double denom =
          std::max({std::abs(analytic), std::abs(numeric), 1e-8});
      const double rel = std::abs(analytic - numeric) / denom;
      ++check.checked;
      if (check.checked == 1 || rel > check.max_rel_error) {
        check.max_rel_error = rel;
        check.worst_index = i;
        check.analytic_at_worst = analytic;
        check.numeric_at_worst = numeric;
      }
    }
    report.parameters.push_back(check);
  }
  for (Parameter* p : parameters) p->ZeroGrad();
  return report;
}

}  // namespace cner
