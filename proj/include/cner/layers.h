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

// Character encoder: embedding lookup, multi-window convolution and a
// bidirectional LSTM.
//
// Sequences travel as time-major matrices: a batch of B sentences padded to
// N steps is an (N * B) x dim matrix whose row t * B + b holds step t of
// sentence b. A single sentence is the B = 1 case.

#ifndef CNER_LAYERS_H_
#define CNER_LAYERS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "cner/tape.h"

namespace cner {

// Sentences of vocabulary indices padded with PAD to a common length.
struct PaddedBatch {
  static PaddedBatch Build(std::span<const std::vector<std::size_t>> sequences);

  // Rows of sentence b, in time order, in the time-major layout.
  std::vector<std::size_t> RowsOf(std::size_t b) const;

  std::size_t batch = 0;
  std::size_t steps = 0;
  std::vector<std::size_t> lengths;
  std::vector<std::size_t> indices;  // steps * batch, time-major
};

// Uniform in +-sqrt(6 / (fan_in + fan_out)).
Tensor GlorotUniform(std::size_t fan_in, std::size_t fan_out, Shape shape,
                     std::uint64_t seed);

class EmbeddingLayer {
 public:
  // E is D x V, randomly initialized; the PAD column is zero and frozen.
  EmbeddingLayer(std::size_t vocab_size, std::size_t dim, std::uint64_t seed);

  // Copies a V x D row matrix (one row per vocabulary entry) into E. The PAD
  // column is forced back to zero.
  void SetRows(const Tensor& rows);

  // x_i = E[:, indices[i]], giving a (n x D) matrix.
  Var Forward(Tape& tape, std::span<const std::size_t> indices);

  std::size_t dim() const { return table_.value.rows(); }
  std::size_t vocab_size() const { return table_.value.cols(); }
  Parameter& table() { return table_; }

 private:
  Parameter table_;
};

// Window offsets [lo, hi] around position i for window size k, following
// floor(i - (k-1)/2) .. floor(i + (k-1)/2): k=2 -> [-1,0], k=3 -> [-1,1],
// k=4 -> [-2,1], k=5 -> [-2,2].
std::pair<int, int> WindowOffsets(std::size_t k);

class ConvFilterBank {
 public:
  // Splits `filters` evenly across `windows`; throws InputError if it does
  // not divide.
  ConvFilterBank(std::size_t input_dim, std::size_t filters,
                 std::vector<std::size_t> windows, std::uint64_t seed);

  // ReLU(window(x) * w_k + b_k) for every window size, concatenated per
  // position into `filters` channels. Positions outside the sequence are
  // zero.
  Var Forward(Tape& tape, Var x, std::size_t block);

  std::size_t filters() const { return filters_; }
  const std::vector<std::size_t>& windows() const { return windows_; }
  std::vector<Parameter*> Parameters();

 private:
  struct Bank {
    std::size_t k;
    Parameter weights;  // (k * D) x (filters / |windows|)
    Parameter bias;     // filters / |windows|
  };
  std::size_t filters_;
  std::vector<std::size_t> windows_;
  std::vector<Bank> banks_;
};

// Standard LSTM cell. Gate blocks in wx/wh/b columns are ordered input,
// forget, output, candidate.
struct LstmCell {
  LstmCell(const std::string& prefix, std::size_t input_dim,
           std::size_t hidden, std::uint64_t seed);

  Parameter wx;  // In x 4S
  Parameter wh;  // S x 4S
  Parameter b;   // 4S; forget block starts at 1.0
};

class BiLstm {
 public:
  BiLstm(std::size_t input_dim, std::size_t hidden, std::uint64_t seed);

  // Forward cell scans left to right and backward cell right to left, both
  // from zero state; each sentence's backward scan starts at its own last
  // character. Output rows are [h_fwd; h_bwd] (width 2S); padded rows are
  // zero.
  Var Forward(Tape& tape, Var inputs, std::size_t block,
              std::span<const std::size_t> lengths);

  std::size_t hidden() const { return hidden_; }
  LstmCell& forward_cell() { return fwd_; }
  LstmCell& backward_cell() { return bwd_; }
  std::vector<Parameter*> Parameters();

 private:
  Var Scan(Tape& tape, LstmCell& cell, Var inputs, std::size_t block,
           std::span<const std::size_t> lengths, bool reverse);

  std::size_t hidden_;
  LstmCell fwd_;
  LstmCell bwd_;
};

struct EncoderConfig {
  std::size_t vocab_size = 2;
  std::size_t embed_dim = 200;
  std::size_t filters = 400;
  std::vector<std::size_t> windows = {2, 3, 4, 5};
  std::size_t hidden = 200;
};

struct EncoderOutput {
  Var conv;    // c after dropout, (N * B) x M
  Var hidden;  // h after dropout, (N * B) x 2S
};

// embed -> dropout -> conv -> dropout -> bilstm -> dropout.
class Encoder {
 public:
  Encoder(const EncoderConfig& config, std::uint64_t seed);

  EncoderOutput Forward(Tape& tape, const PaddedBatch& batch, bool train,
                        double dropout_rate, std::uint64_t seed);

  const EncoderConfig& config() const { return config_; }
  EmbeddingLayer& embedding() { return embedding_; }
  ConvFilterBank& conv() { return conv_; }
  BiLstm& lstm() { return lstm_; }
  std::vector<Parameter*> Parameters();

 private:
  EncoderConfig config_;
  EmbeddingLayer embedding_;
  ConvFilterBank conv_;
  BiLstm lstm_;
};

}  // namespace cner

#endif  // CNER_LAYERS_H_
