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

#include "cner/layers.h"

#include <cmath>
#include <vector>

#include "cner/corpus.h"
#include "cner/errors.h"
#include "cner/grad_check.h"
#include "cner/rng.h"
#include "gtest/gtest.h"

namespace cner {
namespace {

double Sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Plain-loop LSTM over rows of x (n x In), returning n x S.
std::vector<std::vector<double>> ReferenceLstm(const LstmCell& cell,
                                               const Tensor& x, bool reverse) {
  const std::size_t n = x.rows(), in = x.cols(), s = cell.wh.value.rows();
  std::vector<std::vector<double>> out(n, std::vector<double>(s));
  std::vector<double> h(s, 0.0), c(s, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t t = reverse ? n - 1 - k : k;
    std::vector<double> z(4 * s);
    for (std::size_t j = 0; j < 4 * s; ++j) {
      double v = cell.b.value[j];
      for (std::size_t i = 0; i < in; ++i) v += x.at(t, i) * cell.wx.value.at(i, j);
      for (std::size_t i = 0; i < s; ++i) v += h[i] * cell.wh.value.at(i, j);
      z[j] = v;
    }
    for (std::size_t j = 0; j < s; ++j) {
      const double ig = Sig(z[j]), fg = Sig(z[s + j]), og = Sig(z[2 * s + j]);
      const double g = std::tanh(z[3 * s + j]);
      c[j] = fg * c[j] + ig * g;
      h[j] = og * std::tanh(c[j]);
    }
    out[t] = h;
  }
  return out;
}

Tensor RandomMatrix(std::size_t r, std::size_t c, std::uint64_t seed) {
  Tensor t({r, c});
  Rng rng(seed);
  for (double& v : t.values()) v = rng.Normal();
  return t;
}

TEST(PaddedBatchTest, PadsTimeMajor) {
  const std::vector<std::vector<std::size_t>> seqs = {{5, 6, 7}, {8}};
  const PaddedBatch batch = PaddedBatch::Build(seqs);
  EXPECT_EQ(batch.batch, 2u);
  EXPECT_EQ(batch.steps, 3u);
  EXPECT_EQ(batch.lengths, (std::vector<std::size_t>{3, 1}));
  EXPECT_EQ(batch.indices, (std::vector<std::size_t>{5, 8, 6, 0, 7, 0}));
  EXPECT_EQ(batch.RowsOf(0), (std::vector<std::size_t>{0, 2, 4}));
  EXPECT_EQ(batch.RowsOf(1), (std::vector<std::size_t>{1}));
  const std::vector<std::vector<std::size_t>> with_empty = {{1}, {}};
  EXPECT_THROW(PaddedBatch::Build(with_empty), InputError);
}

TEST(WindowOffsetsTest, CentersEvenAndOddWindows) {
  EXPECT_EQ(WindowOffsets(1), std::make_pair(0, 0));
  EXPECT_EQ(WindowOffsets(2), std::make_pair(-1, 0));
  EXPECT_EQ(WindowOffsets(3), std::make_pair(-1, 1));
  EXPECT_EQ(WindowOffsets(4), std::make_pair(-2, 1));
  EXPECT_EQ(WindowOffsets(5), std::make_pair(-2, 2));
  for (std::size_t k = 1; k < 9; ++k) {
    const auto [lo, hi] = WindowOffsets(k);
    EXPECT_EQ(static_cast<std::size_t>(hi - lo + 1), k);
  }
}

TEST(GlorotTest, StaysWithinBound) {
  const Tensor w = GlorotUniform(10, 30, {10, 30}, 3);
  const double bound = std::sqrt(6.0 / 40.0);
  double max_abs = 0.0;
  for (double v : w.values()) max_abs = std::max(max_abs, std::abs(v));
  EXPECT_LE(max_abs, bound);
  EXPECT_GT(max_abs, 0.8 * bound);
}

TEST(EmbeddingTest, PadColumnIsZeroAndFrozen) {
  EmbeddingLayer layer(6, 4, 1);
  EXPECT_EQ(layer.table().value.shape(), (Shape{4, 6}));
  EXPECT_EQ(layer.table().frozen_columns,
            std::vector<std::size_t>{Vocabulary::kPad});
  for (std::size_t d = 0; d < 4; ++d) {
    EXPECT_EQ(layer.table().value.at(d, Vocabulary::kPad), 0.0);
  }
  Tensor rows({6, 4}, 7.0);
  layer.SetRows(rows);
  EXPECT_EQ(layer.table().value.at(2, 3), 7.0);
  EXPECT_EQ(layer.table().value.at(2, Vocabulary::kPad), 0.0);

  Tape tape;
  const std::vector<std::size_t> idx = {3, 0, 3};
  Var x = layer.Forward(tape, idx);
  EXPECT_EQ(x.shape(), (Shape{3, 4}));
  EXPECT_EQ(x.value().at(1, 0), 0.0);
  EXPECT_THROW(layer.SetRows(Tensor({5, 4})), InputError);
}

TEST(ConvTest, MatchesPlainLoops) {
  const std::size_t d = 3, n = 5;
  ConvFilterBank conv(d, 4, {2, 3}, 7);
  const Tensor x = RandomMatrix(n, d, 8);
  Tape tape;
  const Tensor y = conv.Forward(tape, tape.Constant(x), 1).value();
  ASSERT_EQ(y.shape(), (Shape{n, 4}));
  const auto params = conv.Parameters();
  for (std::size_t bank = 0; bank < 2; ++bank) {
    const std::size_t k = bank == 0 ? 2 : 3;
    const Tensor& w = params[2 * bank]->value;
    const Tensor& b = params[2 * bank + 1]->value;
    const auto [lo, hi] = WindowOffsets(k);
    for (std::size_t t = 0; t < n; ++t) {
      for (std::size_t f = 0; f < 2; ++f) {
        double v = b[f];
        for (int o = lo; o <= hi; ++o) {
          const long p = static_cast<long>(t) + o;
          if (p < 0 || p >= static_cast<long>(n)) continue;
          for (std::size_t i = 0; i < d; ++i) {
            v += x.at(p, i) * w.at((o - lo) * d + i, f);
          }
        }
        EXPECT_NEAR(y.at(t, bank * 2 + f), std::max(0.0, v), 1e-12);
      }
    }
  }
  EXPECT_THROW(ConvFilterBank(d, 5, {2, 3}, 1), InputError);
}

TEST(BiLstmTest, MatchesReferenceCell) {
  BiLstm lstm(3, 2, 5);
  const Tensor x = RandomMatrix(4, 3, 6);
  Tape tape;
  const std::vector<std::size_t> lengths = {4};
  const Tensor h = lstm.Forward(tape, tape.Constant(x), 1, lengths).value();
  ASSERT_EQ(h.shape(), (Shape{4, 4}));
  const auto fwd = ReferenceLstm(lstm.forward_cell(), x, false);
  const auto bwd = ReferenceLstm(lstm.backward_cell(), x, true);
  for (std::size_t t = 0; t < 4; ++t) {
    for (std::size_t j = 0; j < 2; ++j) {
      EXPECT_NEAR(h.at(t, j), fwd[t][j], 1e-12);
      EXPECT_NEAR(h.at(t, 2 + j), bwd[t][j], 1e-12);
    }
  }
}

TEST(BiLstmTest, ForgetBiasStartsAtOne) {
  LstmCell cell("lstm.fwd", 3, 4, 1);
  for (std::size_t j = 0; j < 16; ++j) {
    EXPECT_EQ(cell.b.value[j], (j >= 4 && j < 8) ? 1.0 : 0.0);
  }
}

TEST(EncoderTest, PaddingDoesNotChangeRealPositions) {
  EncoderConfig config{9, 4, 6, {2, 3}, 3};
  Encoder encoder(config, 12);
  const std::vector<std::vector<std::size_t>> batch_seqs = {
      {2, 3, 4, 5, 6}, {7, 8}, {3, 3, 4}};
  const PaddedBatch batch = PaddedBatch::Build(batch_seqs);
  Tape tape;
  const EncoderOutput out = encoder.Forward(tape, batch, false, 0.5, 1);
  for (std::size_t b = 0; b < batch_seqs.size(); ++b) {
    const std::vector<std::vector<std::size_t>> alone_seqs = {batch_seqs[b]};
    const PaddedBatch alone = PaddedBatch::Build(alone_seqs);
    Tape t2;
    const EncoderOutput single = encoder.Forward(t2, alone, false, 0.5, 1);
    const auto rows = batch.RowsOf(b);
    for (std::size_t t = 0; t < rows.size(); ++t) {
      for (std::size_t j = 0; j < 6; ++j) {
        EXPECT_NEAR(out.conv.value().at(rows[t], j),
                    single.conv.value().at(t, j), 1e-12);
      }
      for (std::size_t j = 0; j < 6; ++j) {
        EXPECT_NEAR(out.hidden.value().at(rows[t], j),
                    single.hidden.value().at(t, j), 1e-12);
      }
    }
  }
  // Padded rows of the BiLSTM output are zero.
  for (std::size_t j = 0; j < 6; ++j) {
    EXPECT_EQ(out.hidden.value().at(4 * 3 + 1, j), 0.0);
  }
}

TEST(EncoderTest, GradientsMatchFiniteDifferences) {
  EncoderConfig config{6, 3, 4, {2, 3}, 2};
  Encoder encoder(config, 3);
  // A well-conditioned point: embeddings of unit scale.
  encoder.embedding().SetRows(RandomMatrix(6, 3, 4));
  const std::vector<std::vector<std::size_t>> seqs = {{2, 3, 4}, {5, 2}};
  const PaddedBatch batch = PaddedBatch::Build(seqs);
  const Tensor weights = RandomMatrix(6, 4, 5);
  const GradCheckReport report = GradCheck(
      [&](Tape& tape) {
        const EncoderOutput out = encoder.Forward(tape, batch, false, 0.0, 0);
        return Sum(Mul(out.hidden, tape.Constant(weights)));
      },
      encoder.Parameters(), 1e-5, 1e-4);
  EXPECT_TRUE(report.passed()) << report.max_rel_error();
}

}  // namespace
}  // namespace cner
