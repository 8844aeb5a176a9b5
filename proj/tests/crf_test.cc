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
#include <vector>

#include "cner/errors.h"
#include "cner/grad_check.h"
#include "cner/rng.h"
#include "cner/tagset.h"
#include "gtest/gtest.h"

namespace cner {
namespace {

struct Instance {
  Tensor emissions;
  Tensor transitions;
  Tensor start;
};

Instance RandomInstance(std::size_t n, std::size_t l, Rng& rng,
                        double scale = 1.0) {
  Instance x{Tensor({n, l}), Tensor({l, l}), Tensor({l})};
  for (double& v : x.emissions.values()) v = scale * rng.Normal();
  for (double& v : x.transitions.values()) v = scale * rng.Normal();
  for (double& v : x.start.values()) v = scale * rng.Normal();
  return x;
}

double PathScore(const Instance& x, const std::vector<std::size_t>& y) {
  double s = x.start[y[0]] + x.emissions.at(0, y[0]);
  for (std::size_t i = 1; i < y.size(); ++i) {
    s += x.transitions.at(y[i - 1], y[i]) + x.emissions.at(i, y[i]);
  }
  return s;
}

// Every label sequence, as an odometer over positions.
std::vector<std::vector<std::size_t>> AllPaths(std::size_t n, std::size_t l) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> y(n, 0);
  while (true) {
    out.push_back(y);
    std::size_t i = 0;
    while (i < n && ++y[i] == l) y[i++] = 0;
    if (i == n) break;
  }
  return out;
}

double ReferenceLogZ(const Instance& x) {
  const auto paths = AllPaths(x.emissions.rows(), x.emissions.cols());
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& y : paths) m = std::max(m, PathScore(x, y));
  double total = 0.0;
  for (const auto& y : paths) total += std::exp(PathScore(x, y) - m);
  return m + std::log(total);
}

double LogZ(const Instance& x) {
  Tape tape;
  return CrfLogPartition(tape.Constant(x.emissions),
                         tape.Constant(x.transitions), tape.Constant(x.start))
      .value()
      .item();
}

TEST(CrfTest, SequenceScoreMatchesDirectSum) {
  Rng rng(1);
  const Instance x = RandomInstance(5, 3, rng);
  const std::vector<std::size_t> y = {2, 0, 0, 1, 2};
  Tape tape;
  const double s = CrfSequenceScore(tape.Constant(x.emissions),
                                    tape.Constant(x.transitions),
                                    tape.Constant(x.start), y)
                       .value()
                       .item();
  EXPECT_NEAR(s, PathScore(x, y), 1e-12);
}

TEST(CrfTest, LogPartitionAndViterbiMatchEnumeration) {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.Index(5);
    const std::size_t l = 1 + rng.Index(4);
    const Instance x = RandomInstance(n, l, rng);
    EXPECT_NEAR(LogZ(x), ReferenceLogZ(x), 1e-9);

    double best = -std::numeric_limits<double>::infinity();
    for (const auto& y : AllPaths(n, l)) best = std::max(best, PathScore(x, y));
    const ViterbiResult v = ViterbiDecode(x.emissions, x.transitions, x.start);
    EXPECT_NEAR(v.score, best, 1e-12);
    EXPECT_NEAR(PathScore(x, v.labels), best, 1e-12);

    const BruteForceResult b = CrfBruteForce(x.emissions, x.transitions, x.start);
    EXPECT_NEAR(b.log_partition, ReferenceLogZ(x), 1e-9);
    EXPECT_EQ(b.best_labels, v.labels);
  }
}

TEST(CrfTest, ProbabilitiesSumToOne) {
  Rng rng(3);
  const Instance x = RandomInstance(4, 3, rng);
  const double log_z = LogZ(x);
  double total = 0.0;
  for (const auto& y : AllPaths(4, 3)) total += std::exp(PathScore(x, y) - log_z);
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(CrfTest, UniformScoresGiveNLogL) {
  for (std::size_t n : {1, 3, 7}) {
    for (std::size_t l : {2, 5}) {
      const Instance x{Tensor({n, l}), Tensor({l, l}), Tensor({l})};
      EXPECT_NEAR(LogZ(x), n * std::log(static_cast<double>(l)), 1e-12);
    }
  }
}

TEST(CrfTest, ShiftingEmissionsShiftsLogPartition) {
  Rng rng(4);
  const Instance x = RandomInstance(6, 3, rng);
  Instance shifted = x;
  for (double& v : shifted.emissions.values()) v += 2.5;
  EXPECT_NEAR(LogZ(shifted) - LogZ(x), 6 * 2.5, 1e-10);
}

TEST(CrfTest, SaturatedScoresStayFinite) {
  Rng rng(5);
  const Instance x = RandomInstance(6, 4, rng, 400.0);
  const double log_z = LogZ(x);
  EXPECT_TRUE(std::isfinite(log_z));
  const ViterbiResult v = ViterbiDecode(x.emissions, x.transitions, x.start);
  EXPECT_GE(log_z, v.score - 1e-9);
  EXPECT_LE(log_z, v.score + 6 * std::log(4.0) + 1e-9);
}

TEST(CrfTest, GradientsMatchFiniteDifferences) {
  Rng rng(6);
  const Instance x = RandomInstance(5, 3, rng);
  Parameter e("e", x.emissions), t("t", x.transitions), s("s", x.start);
  const std::vector<std::size_t> y = {0, 2, 2, 1, 0};
  std::vector<Parameter*> params = {&e, &t, &s};
  const GradCheckReport report = GradCheck(
      [&](Tape& tape) {
        Var ev = tape.Watch(e), tv = tape.Watch(t), sv = tape.Watch(s);
        return Sub(CrfLogPartition(ev, tv, sv), CrfSequenceScore(ev, tv, sv, y));
      },
      params, 1e-5, 1e-6);
  EXPECT_TRUE(report.passed()) << report.max_rel_error();
}

TEST(CrfTest, EmissionGradientIsMarginalMinusIndicator) {
  Rng rng(7);
  const Instance x = RandomInstance(3, 2, rng);
  Parameter e("e", x.emissions);
  const std::vector<std::size_t> y = {1, 0, 1};
  Tape tape;
  Var ev = tape.Watch(e);
  Var t = tape.Constant(x.transitions), s = tape.Constant(x.start);
  tape.Backward(Sub(CrfLogPartition(ev, t, s), CrfSequenceScore(ev, t, s, y)));
  const double log_z = ReferenceLogZ(x);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t k = 0; k < 2; ++k) {
      double marginal = 0.0;
      for (const auto& path : AllPaths(3, 2)) {
        if (path[i] == k) marginal += std::exp(PathScore(x, path) - log_z);
      }
      const double expected = marginal - (y[i] == k ? 1.0 : 0.0);
      EXPECT_NEAR(e.grad.at(i, k), expected, 1e-12);
    }
  }
}

TEST(CrfTest, ViterbiBreaksTiesTowardLowerLabels) {
  const Tensor emissions({3, 3});
  const Tensor transitions({3, 3});
  const Tensor start({3});
  const ViterbiResult v = ViterbiDecode(emissions, transitions, start);
  EXPECT_EQ(v.labels, (std::vector<std::size_t>{0, 0, 0}));
}

TEST(CrfTest, MaskedViterbiNeverEmitsIllegalBio) {
  const LabelAlphabet alphabet({"LOC", "PER"});
  const TransitionMask mask(alphabet);
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const Instance x = RandomInstance(1 + rng.Index(6), alphabet.size(), rng, 3.0);
    const ViterbiResult v =
        ViterbiDecode(x.emissions, x.transitions, x.start, &mask);
    std::vector<NerLabel> labels;
    for (std::size_t k : v.labels) labels.push_back(alphabet.label(k));
    EXPECT_FALSE(FindBioViolation(labels).has_value());
    // Optimal among legal paths.
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& y : AllPaths(x.emissions.rows(), alphabet.size())) {
      bool legal = mask.allowed_start(y[0]);
      for (std::size_t i = 1; i < y.size(); ++i) {
        legal = legal && mask.allowed(y[i - 1], y[i]);
      }
      if (legal) best = std::max(best, PathScore(x, y));
    }
    EXPECT_NEAR(v.score, best, 1e-9);
  }
}

TEST(CrfTest, BruteForceRefusesHugeSpaces) {
  const Tensor emissions({9, 5});
  EXPECT_THROW(CrfBruteForce(emissions, Tensor({5, 5}), Tensor({5})),
               InputError);
}

TEST(CrfHeadTest, NllIsLogPartitionMinusScore) {
  CrfHead head("crf.ner", 4, 3, 11);
  Rng rng(9);
  Tensor inputs({5, 4});
  for (double& v : inputs.values()) v = rng.Normal();
  const std::vector<std::size_t> y = {0, 1, 2, 2, 0};
  Tape tape;
  Var in = tape.Constant(inputs);
  const double nll = head.Nll(tape, in, y).value().item();
  const double z = head.LogPartition(tape, in).value().item();
  const double s = head.Score(tape, in, y).value().item();
  EXPECT_NEAR(nll, z - s, 1e-12);
  EXPECT_GT(nll, 0.0);
  // Plain emissions agree with the taped ones.
  const Tensor plain = head.EmissionScores(inputs);
  const Tensor taped = head.Emissions(tape, in).value();
  for (std::size_t i = 0; i < plain.size(); ++i) {
    EXPECT_NEAR(plain[i], taped[i], 1e-12);
  }
  EXPECT_THROW(head.Score(tape, in, std::vector<std::size_t>{0, 1}),
               InputError);
  EXPECT_THROW(head.Score(tape, in, std::vector<std::size_t>{0, 1, 2, 3, 0}),
               InputError);
}

TEST(CrfHeadTest, StartsWithZeroTransitions) {
  CrfHead head("crf.cws", 6, 2, 1);
  EXPECT_EQ(head.transitions().value, Tensor({2, 2}));
  EXPECT_EQ(head.start().value, Tensor({2}));
  EXPECT_EQ(head.weights().value.shape(), (Shape{6, 2}));
  const double bound = std::sqrt(6.0 / 8.0);
  for (double w : head.weights().value.values()) EXPECT_LE(std::abs(w), bound);
}

}  // namespace
}  // namespace cner
