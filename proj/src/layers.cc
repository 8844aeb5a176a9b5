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

#include <algorithm>
#include <cmath>
#include <string>

#include "cner/corpus.h"
#include "cner/errors.h"
#include "cner/rng.h"

namespace cner {

PaddedBatch PaddedBatch::Build(
    std::span<const std::vector<std::size_t>> sequences) {
  PaddedBatch batch;
  batch.batch = sequences.size();
  for (const auto& seq : sequences) {
    if (seq.empty()) throw InputError("empty sequence in batch");
    batch.lengths.push_back(seq.size());
    batch.steps = std::max(batch.steps, seq.size());
  }
  batch.indices.assign(batch.steps * batch.batch, Vocabulary::kPad);
  for (std::size_t b = 0; b < batch.batch; ++b) {
    for (std::size_t t = 0; t < sequences[b].size(); ++t) {
      batch.indices[t * batch.batch + b] = sequences[b][t];
    }
  }
  return batch;
}

std::vector<std::size_t> PaddedBatch::RowsOf(std::size_t b) const {
  std::vector<std::size_t> rows(lengths[b]);
  for (std::size_t t = 0; t < rows.size(); ++t) rows[t] = t * batch + b;
  return rows;
}

Tensor GlorotUniform(std::size_t fan_in, std::size_t fan_out, Shape shape,
                     std::uint64_t seed) {
  Tensor out(std::move(shape));
  Rng rng(seed);
  const double bound =
      std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (double& v : out.values()) v = rng.Uniform(-bound, bound);
  return out;
}

EmbeddingLayer::EmbeddingLayer(std::size_t vocab_size, std::size_t dim,
                               std::uint64_t seed)
    : table_("embed.E", Tensor({dim, vocab_size})) {
  if (vocab_size <= Vocabulary::kUnk) {
    throw InputError("vocabulary must include PAD and UNK");
  }
  table_.frozen_columns = {Vocabulary::kPad};
  SetRows(InitEmbeddingRows(vocab_size, dim, seed));
}

void EmbeddingLayer::SetRows(const Tensor& rows) {
  if (rows.rank() != 2 || rows.rows() != vocab_size() || rows.cols() != dim()) {
    throw InputError("embedding rows of shape " + ShapeToString(rows.shape()) +
                     " do not match V x D = " + std::to_string(vocab_size()) +
                     " x " + std::to_string(dim()));
  }
  for (std::size_t v = 0; v < vocab_size(); ++v) {
    for (std::size_t d = 0; d < dim(); ++d) {
      table_.value.at(d, v) = v == Vocabulary::kPad ? 0.0 : rows.at(v, d);
    }
  }
}

Var EmbeddingLayer::Forward(Tape& tape, std::span<const std::size_t> indices) {
  return GatherColumns(tape.Watch(table_), indices);
}

std::pair<int, int> WindowOffsets(std::size_t k) {
  if (k == 0) throw InputError("window size must be positive");
  const int lo = -static_cast<int>(k / 2);
  return {lo, lo + static_cast<int>(k) - 1};
}

ConvFilterBank::ConvFilterBank(std::size_t input_dim, std::size_t filters,
                               std::vector<std::size_t> windows,
                               std::uint64_t seed)
    : filters_(filters), windows_(std::move(windows)) {
  if (windows_.empty() || filters_ == 0 || filters_ % windows_.size() != 0) {
    throw InputError("filter count " + std::to_string(filters_) +
                     " is not divisible by the number of window sizes " +
                     std::to_string(windows_.size()));
  }
  const std::size_t per = filters_ / windows_.size();
  for (std::size_t i = 0; i < windows_.size(); ++i) {
    const std::size_t k = windows_[i];
    WindowOffsets(k);
    const std::string name = "cnn.K" + std::to_string(k);
    banks_.push_back(Bank{
        k,
        Parameter(name + ".w",
                  GlorotUniform(k * input_dim, per, {k * input_dim, per},
                                DeriveSeed(seed, i))),
        Parameter(name + ".b", Tensor({per}))});
  }
}

Var ConvFilterBank::Forward(Tape& tape, Var x, std::size_t block) {
  std::vector<Var> outputs;
  for (Bank& bank : banks_) {
    const auto [lo, hi] = WindowOffsets(bank.k);
    Var window = Window(x, block, lo, hi);
    Var z = Add(MatMul(window, tape.Watch(bank.weights)),
                tape.Watch(bank.bias));
    outputs.push_back(Relu(z));
  }
  return outputs.size() == 1 ? outputs[0] : Concat(outputs, 1);
}

std::vector<Parameter*> ConvFilterBank::Parameters() {
  std::vector<Parameter*> out;
  for (Bank& bank : banks_) {
    out.push_back(&bank.weights);
    out.push_back(&bank.bias);
  }
  return out;
}

LstmCell::LstmCell(const std::string& prefix, std::size_t input_dim,
                   std::size_t hidden, std::uint64_t seed)
    : wx(prefix + ".wx", GlorotUniform(input_dim, 4 * hidden,
                                       {input_dim, 4 * hidden},
                                       DeriveSeed(seed, 0))),
      wh(prefix + ".wh", GlorotUniform(hidden, 4 * hidden,
                                       {hidden, 4 * hidden},
                                       DeriveSeed(seed, 1))),
      b(prefix + ".b", Tensor({4 * hidden})) {
  for (std::size_t j = hidden; j < 2 * hidden; ++j) b.value[j] = 1.0;
}

BiLstm::BiLstm(std::size_t input_dim, std::size_t hidden, std::uint64_t seed)
    : hidden_(hidden),
      fwd_("lstm.fwd", input_dim, hidden, DeriveSeed(seed, 0)),
      bwd_("lstm.bwd", input_dim, hidden, DeriveSeed(seed, 1)) {
  if (hidden == 0) throw InputError("LSTM hidden size must be positive");
}

Var BiLstm::Scan(Tape& tape, LstmCell& cell, Var inputs, std::size_t block,
                 std::span<const std::size_t> lengths, bool reverse) {
  const std::size_t s = hidden_;
  const std::size_t steps = inputs.value().rows() / block;
  Var projected = Add(MatMul(inputs, tape.Watch(cell.wx)), tape.Watch(cell.b));
  Var wh = tape.Watch(cell.wh);

  std::vector<Var> outputs(steps);
  Var h, c;
  bool has_state = false;
  for (std::size_t k = 0; k < steps; ++k) {
    const std::size_t t = reverse ? steps - 1 - k : k;
    Var z = Slice(projected, 0, t * block, (t + 1) * block);
    if (has_state) z = Add(z, MatMul(h, wh));
    Var in_gate = Sigmoid(Slice(z, 1, 0, s));
    Var out_gate = Sigmoid(Slice(z, 1, 2 * s, 3 * s));
    Var candidate = Tanh(Slice(z, 1, 3 * s, 4 * s));
    Var c_new = Mul(in_gate, candidate);
    if (has_state) {
      Var forget_gate = Sigmoid(Slice(z, 1, s, 2 * s));
      c_new = Add(Mul(forget_gate, c), c_new);
    }
    Var h_new = Mul(out_gate, Tanh(c_new));

    // Rows past a sentence's end carry zero state, so the right-to-left
    // scan of a shorter sentence starts fresh at its last character.
    Tensor mask({block, 1});
    bool padded = false;
    for (std::size_t b = 0; b < block; ++b) {
      mask[b] = t < lengths[b] ? 1.0 : 0.0;
      padded = padded || t >= lengths[b];
    }
    if (padded) {
      Var m = tape.Constant(std::move(mask));
      c_new = Mul(c_new, m);
      h_new = Mul(h_new, m);
    }
    h = h_new;
    c = c_new;
    has_state = true;
    outputs[t] = h;
  }
  return outputs.size() == 1 ? outputs[0] : Concat(outputs, 0);
}

Var BiLstm::Forward(Tape& tape, Var inputs, std::size_t block,
                    std::span<const std::size_t> lengths) {
  if (lengths.size() != block) {
    throw InputError("BiLstm: lengths do not match batch size");
  }
  const Var halves[] = {Scan(tape, fwd_, inputs, block, lengths, false),
                        Scan(tape, bwd_, inputs, block, lengths, true)};
  return Concat(halves, 1);
}

std::vector<Parameter*> BiLstm::Parameters() {
  return {&fwd_.wx, &fwd_.wh, &fwd_.b, &bwd_.wx, &bwd_.wh, &bwd_.b};
}

Encoder::Encoder(const EncoderConfig& config, std::uint64_t seed)
    : config_(config),
      embedding_(config.vocab_size, config.embed_dim, DeriveSeed(seed, 0)),
      conv_(config.embed_dim, config.filters, config.windows,
            DeriveSeed(seed, 1)),
      lstm_(config.filters, config.hidden, DeriveSeed(seed, 2)) {}

EncoderOutput Encoder::Forward(Tape& tape, const PaddedBatch& batch,
                               bool train, double dropout_rate,
                               std::uint64_t seed) {
  Var x = embedding_.Forward(tape, batch.indices);
  x = Dropout(x, dropout_rate, train, DeriveSeed(seed, 0));
  Var c = conv_.Forward(tape, x, batch.batch);
  c = Dropout(c, dropout_rate, train, DeriveSeed(seed, 1));
  Var h = lstm_.Forward(tape, c, batch.batch, batch.lengths);
  h = Dropout(h, dropout_rate, train, DeriveSeed(seed, 2));
  return {c, h};
}

std::vector<Parameter*> Encoder::Parameters() {
  std::vector<Parameter*> out = {&embedding_.table()};
  for (Parameter* p : conv_.Parameters()) out.push_back(p);
  for (Parameter* p : lstm_.Parameters()) out.push_back(p);
  return out;
}

}  // namespace cner
