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

// Reverse-mode differentiation over a recorded sequence of dense ops.
//
// A Tape records every op in execution order. Values are computed eagerly
// when an op is recorded; Backward() walks the record in exact reverse order
// and accumulates (+=) gradients into each input, finally adding the leaf
// gradients into the bound Parameters. A tape is a single-threaded unit of
// work; separate tapes may run on separate threads.

#ifndef CNER_TAPE_H_
#define CNER_TAPE_H_

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "cner/tensor.h"

namespace cner {

// A learnable array. grad has the shape of value and is only ever
// accumulated into by Tape::Backward; callers zero it explicitly.
struct Parameter {
  Parameter() = default;
  Parameter(std::string name, Tensor value, bool trainable = true);

  void ZeroGrad() { grad.Fill(0.0); }

  std::string name;
  Tensor value;
  Tensor grad;
  bool trainable = true;
  // Columns that must stay fixed (the embedding PAD column). The optimizer
  // and the gradient checker skip them.
  std::vector<std::size_t> frozen_columns;
};

class Tape;

// Handle to a value recorded on a Tape. Cheap to copy; valid as long as the
// tape is alive.
class Var {
 public:
  Var() = default;

  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
  // Gradient after Tape::Backward; zeros if nothing flowed here.
  Tensor grad() const;

  Tape* tape() const { return tape_; }
  std::size_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

class Tape {
 public:
  // Receives the gradient of the op output and pushes contributions to the
  // op inputs through Tape::GradFor.
  using BackwardFn = std::function<void(Tape&, const Tensor&)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var Constant(Tensor value);
  // Leaf bound to a parameter; repeated calls return the same leaf.
  // Non-trainable parameters are recorded as constants.
  Var Watch(Parameter& parameter);

  // Fills Parameter::grad for every watched trainable parameter with
  // d(loss)/d(value). Throws NumericError if loss is not a scalar or if
  // called a second time on the same tape.
  void Backward(Var loss);

  std::size_t size() const { return nodes_.size(); }

  // Op-author interface.
  Var Record(const char* op, Tensor value, std::span<const Var> inputs,
             BackwardFn backward);
  const Tensor& ValueOf(std::size_t id) const { return nodes_[id].value; }
  bool RequiresGrad(Var v) const { return nodes_[v.id()].requires_grad; }
  // Gradient buffer of an input, or nullptr if it does not need one.
  Tensor* GradFor(Var v);
  const Tensor* GradIfAny(std::size_t id) const;

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool has_grad = false;
    bool requires_grad = false;
    BackwardFn backward;
    Parameter* parameter = nullptr;
  };

  std::deque<Node> nodes_;
  std::unordered_map<const Parameter*, std::size_t> watched_;
  bool backward_done_ = false;
};

// --- Differentiable ops. Shapes are checked; violations throw InputError.
// Any non-finite output throws NumericError.

// Matrix product of rank-2 (or rank-1 row) operands.
Var MatMul(Var a, Var b);
// Elementwise with broadcasting of size-1 rows/columns (matrix view).
Var Add(Var a, Var b);
Var Sub(Var a, Var b);
Var Mul(Var a, Var b);
Var Scale(Var x, double factor);
Var Concat(std::span<const Var> parts, std::size_t axis);
Var Slice(Var x, std::size_t axis, std::size_t begin, std::size_t end);
Var Reshape(Var x, Shape shape);
// Rows of a rank-2 tensor in the given order (repeats allowed).
Var GatherRows(Var x, std::span<const std::size_t> rows);
// Column lookup: out[r] = table[:, columns[r]], giving shape {n, rows(table)}.
Var GatherColumns(Var table, std::span<const std::size_t> columns);
// Picks flat-indexed elements into a rank-1 tensor.
Var GatherElements(Var x, std::span<const std::size_t> flat_indices);
// Sliding-window concatenation over a time-major sequence stored as rows
// t * block + b. Output row (t, b) concatenates rows (t + o, b) for
// o in [lo, hi], zero where t + o falls outside [0, rows / block).
Var Window(Var x, std::size_t block, int lo, int hi);
Var Relu(Var x);
Var Tanh(Var x);
Var Sigmoid(Var x);
Var SoftmaxLastAxis(Var x);
// Numerically stable log(sum(exp(x))) along axis; the axis is removed.
Var LogSumExp(Var x, std::size_t axis);
Var Sum(Var x);
// Inverted dropout: identity when !train; otherwise each entry is zeroed
// with probability rate and survivors are scaled by 1/(1 - rate). Throws
// InputError unless 0 <= rate < 1.
Var Dropout(Var x, double rate, bool train, std::uint64_t seed);

}  // namespace cner

#endif  // CNER_TAPE_H_
