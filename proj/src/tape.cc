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

#include "cner/tape.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cner/errors.h"
#include "cner/rng.h"

namespace cner {

Parameter::Parameter(std::string name, Tensor value, bool trainable)
    : name(std::move(name)),
      value(std::move(value)),
      grad(this->value.shape()),
      trainable(trainable) {}

const Tensor& Var::value() const {
  if (tape_ == nullptr) throw InputError("use of an unbound Var");
  return tape_->ValueOf(id_);
}

Tensor Var::grad() const {
  const Tensor* g = tape_->GradIfAny(id_);
  return g != nullptr ? *g : Tensor(value().shape());
}

Var Tape::Constant(Tensor value) {
  return Record("constant", std::move(value), {}, nullptr);
}

Var Tape::Watch(Parameter& parameter) {
  if (!parameter.trainable) return Constant(parameter.value);
  if (auto it = watched_.find(&parameter); it != watched_.end()) {
    return Var(this, it->second);
  }
  Var leaf = Record("parameter", parameter.value, {}, nullptr);
  Node& node = nodes_[leaf.id()];
  node.requires_grad = true;
  node.parameter = &parameter;
  watched_.emplace(&parameter, leaf.id());
  return leaf;
}

Var Tape::Record(const char* op, Tensor value, std::span<const Var> inputs,
                 BackwardFn backward) {
  if (!value.AllFinite()) {
    throw NumericError(std::string("non-finite value produced by ") + op);
  }
  Node node;
  node.value = std::move(value);
  for (const Var& in : inputs) {
    if (in.tape() != this) throw InputError(std::string(op) + ": foreign Var");
    node.requires_grad = node.requires_grad || nodes_[in.id()].requires_grad;
  }
  if (node.requires_grad) node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Tensor* Tape::GradFor(Var v) {
  Node& node = nodes_[v.id()];
  if (!node.requires_grad) return nullptr;
  if (!node.has_grad) {
    node.grad = Tensor(node.value.shape());
    node.has_grad = true;
  }
  return &node.grad;
}

const Tensor* Tape::GradIfAny(std::size_t id) const {
  const Node& node = nodes_[id];
  return node.has_grad ? &node.grad : nullptr;
}

void Tape::Backward(Var loss) {
  if (backward_done_) {
    throw NumericError("Backward called twice on the same tape");
  }
  if (loss.tape() != this) throw InputError("Backward: foreign Var");
  if (loss.value().size() != 1) {
    throw NumericError("Backward needs a scalar loss, got shape " +
                       ShapeToString(loss.shape()));
  }
  backward_done_ = true;
  if (!nodes_[loss.id()].requires_grad) return;
  GradFor(loss)->Fill(1.0);
  for (std::size_t id = loss.id() + 1; id-- > 0;) {
    Node& node = nodes_[id];
    if (!node.has_grad) continue;
    if (node.backward) node.backward(*this, node.grad);
    if (node.parameter != nullptr) {
      auto dst = node.parameter->grad.values();
      auto src = node.grad.values();
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    }
  }
}

namespace {

void RequireRank2(const Tensor& t, const char* op) {
  if (t.rank() > 2) {
    throw InputError(std::string(op) + ": rank > 2 is not supported, got " +
                     ShapeToString(t.shape()));
  }
}

struct BroadcastPlan {
  Shape shape;
  std::size_t rows, cols;
  std::size_t a_rows, a_cols, b_rows, b_cols;
};

BroadcastPlan PlanBroadcast(const Tensor& a, const Tensor& b, const char* op) {
  RequireRank2(a, op);
  RequireRank2(b, op);
  BroadcastPlan p{{}, 0, 0, a.rows(), a.cols(), b.rows(), b.cols()};
  auto merge = [&](std::size_t x, std::size_t y) {
    if (x == y || y == 1) return x;
    if (x == 1) return y;
    throw InputError(std::string(op) + ": cannot broadcast " +
                     ShapeToString(a.shape()) + " with " +
                     ShapeToString(b.shape()));
  };
  p.rows = merge(p.a_rows, p.b_rows);
  p.cols = merge(p.a_cols, p.b_cols);
  if (a.shape() == b.shape()) {
    p.shape = a.shape();
  } else if (b.size() == 1 && a.rows() == p.rows && a.cols() == p.cols) {
    p.shape = a.shape();
  } else if (a.size() == 1 && b.rows() == p.rows && b.cols() == p.cols) {
    p.shape = b.shape();
  } else {
    p.shape = {p.rows, p.cols};
  }
  return p;
}

inline std::size_t BroadcastIndex(std::size_t r, std::size_t c,
                                  std::size_t rows, std::size_t cols) {
  return (rows == 1 ? 0 : r) * cols + (cols == 1 ? 0 : c);
}

enum class Binary { kAdd, kSub, kMul };

Var ElementwiseBinary(Var a, Var b, Binary kind, const char* op) {
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  const BroadcastPlan p = PlanBroadcast(av, bv, op);
  Tensor out(p.shape);
  for (std::size_t r = 0; r < p.rows; ++r) {
    for (std::size_t c = 0; c < p.cols; ++c) {
      const double x = av[BroadcastIndex(r, c, p.a_rows, p.a_cols)];
      const double y = bv[BroadcastIndex(r, c, p.b_rows, p.b_cols)];
      double& o = out[r * p.cols + c];
      switch (kind) {
        case Binary::kAdd: o = x + y; break;
        case Binary::kSub: o = x - y; break;
        case Binary::kMul: o = x * y; break;
      }
    }
  }
  const Var inputs[] = {a, b};
  return a.tape()->Record(
      op, std::move(out), inputs, [a, b, p, kind](Tape& tape, const Tensor& g) {
        Tensor* ga = tape.GradFor(a);
        Tensor* gb = tape.GradFor(b);
        const Tensor& av = tape.ValueOf(a.id());
        const Tensor& bv = tape.ValueOf(b.id());
        for (std::size_t r = 0; r < p.rows; ++r) {
          for (std::size_t c = 0; c < p.cols; ++c) {
            const double go = g[r * p.cols + c];
            const std::size_t ia = BroadcastIndex(r, c, p.a_rows, p.a_cols);
            const std::size_t ib = BroadcastIndex(r, c, p.b_rows, p.b_cols);
            switch (kind) {
              case Binary::kAdd:
                if (ga) (*ga)[ia] += go;
                if (gb) (*gb)[ib] += go;
                break;
              case Binary::kSub:
                if (ga) (*ga)[ia] += go;
                if (gb) (*gb)[ib] -= go;
                break;
              case Binary::kMul:
                if (ga) (*ga)[ia] += go * bv[ib];
                if (gb) (*gb)[ib] += go * av[ia];
                break;
            }
          }
        }
      });
}

}  // namespace

Var MatMul(Var a, Var b) {
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  RequireRank2(av, "MatMul");
  RequireRank2(bv, "MatMul");
  const std::size_t n = av.rows(), k = av.cols(), m = bv.cols();
  if (bv.rows() != k) {
    throw InputError("MatMul: shape mismatch " + ShapeToString(av.shape()) +
                     " x " + ShapeToString(bv.shape()));
  }
  Tensor out({n, m});
  for (std::size_t i = 0; i < n; ++i) {
    double* orow = &out[i * m];
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = av[i * k + p];
      if (aip == 0.0) continue;
      const double* brow = &bv[p * m];
      for (std::size_t j = 0; j < m; ++j) orow[j] += aip * brow[j];
    }
  }
  const Var inputs[] = {a, b};
  return a.tape()->Record(
      "MatMul", std::move(out), inputs,
      [a, b, n, k, m](Tape& tape, const Tensor& g) {
        const Tensor& av = tape.ValueOf(a.id());
        const Tensor& bv = tape.ValueOf(b.id());
        if (Tensor* ga = tape.GradFor(a)) {
          // dA = G * B^T
          for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t p = 0; p < k; ++p) {
              double acc = 0.0;
              const double* grow = &g[i * m];
              const double* brow = &bv[p * m];
              for (std::size_t j = 0; j < m; ++j) acc += grow[j] * brow[j];
              (*ga)[i * k + p] += acc;
            }
          }
        }
        if (Tensor* gb = tape.GradFor(b)) {
          // dB = A^T * G
          for (std::size_t i = 0; i < n; ++i) {
            const double* grow = &g[i * m];
            for (std::size_t p = 0; p < k; ++p) {
              const double aip = av[i * k + p];
              if (aip == 0.0) continue;
              double* gbrow = &(*gb)[p * m];
              for (std::size_t j = 0; j < m; ++j) gbrow[j] += aip * grow[j];
            }
          }
        }
      });
}

Var Add(Var a, Var b) { return ElementwiseBinary(a, b, Binary::kAdd, "Add"); }
Var Sub(Var a, Var b) { return ElementwiseBinary(a, b, Binary::kSub, "Sub"); }
Var Mul(Var a, Var b) { return ElementwiseBinary(a, b, Binary::kMul, "Mul"); }

Var Scale(Var x, double factor) {
  const Tensor& xv = x.value();
  Tensor out(xv.shape());
  for (std::size_t i = 0; i < xv.size(); ++i) out[i] = xv[i] * factor;
  const Var inputs[] = {x};
  return x.tape()->Record("Scale", std::move(out), inputs,
                          [x, factor](Tape& tape, const Tensor& g) {
                            Tensor* gx = tape.GradFor(x);
                            for (std::size_t i = 0; i < g.size(); ++i) {
                              (*gx)[i] += g[i] * factor;
                            }
                          });
}

Var Concat(std::span<const Var> parts, std::size_t axis) {
  if (parts.empty()) throw InputError("Concat: no inputs");
  if (axis > 1) throw InputError("Concat: axis must be 0 or 1");
  Tape* tape = parts[0].tape();
  const bool vectors = parts[0].value().rank() == 1 && axis == 0;
  std::size_t rows = 0, cols = 0;
  for (const Var& p : parts) {
    const Tensor& v = p.value();
    RequireRank2(v, "Concat");
    if (vectors) {
      if (v.rank() != 1) throw InputError("Concat: mixed ranks");
      cols += v.size();
      rows = 1;
    } else if (axis == 0) {
      if (cols != 0 && v.cols() != cols) {
        throw InputError("Concat: column mismatch on axis 0");
      }
      cols = v.cols();
      rows += v.rows();
    } else {
      if (rows != 0 && v.rows() != rows) {
        throw InputError("Concat: row mismatch on axis 1");
      }
      rows = v.rows();
      cols += v.cols();
    }
  }
  Shape shape = vectors ? Shape{cols} : Shape{rows, cols};
  Tensor out(shape);
  std::vector<std::size_t> offsets;
  std::size_t offset = 0;
  for (const Var& p : parts) {
    const Tensor& v = p.value();
    offsets.push_back(offset);
    if (vectors || axis == 0) {
      std::copy(v.values().begin(), v.values().end(),
                out.values().begin() + offset * (vectors ? 1 : cols));
      offset += vectors ? v.size() : v.rows();
    } else {
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < v.cols(); ++c) {
          out[r * cols + offset + c] = v[r * v.cols() + c];
        }
      }
      offset += v.cols();
    }
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return tape->Record(
      "Concat", std::move(out), inputs,
      [inputs, offsets, axis, vectors, cols](Tape& tape, const Tensor& g) {
        for (std::size_t k = 0; k < inputs.size(); ++k) {
          Tensor* gi = tape.GradFor(inputs[k]);
          if (gi == nullptr) continue;
          if (vectors || axis == 0) {
            const std::size_t base = offsets[k] * (vectors ? 1 : cols);
            for (std::size_t i = 0; i < gi->size(); ++i) {
              (*gi)[i] += g[base + i];
            }
          } else {
            const std::size_t pc = gi->cols();
            for (std::size_t r = 0; r < gi->rows(); ++r) {
              for (std::size_t c = 0; c < pc; ++c) {
                (*gi)[r * pc + c] += g[r * cols + offsets[k] + c];
              }
            }
          }
        }
      });
}

Var Slice(Var x, std::size_t axis, std::size_t begin, std::size_t end) {
  const Tensor& xv = x.value();
  RequireRank2(xv, "Slice");
  if (xv.rank() == 0) throw InputError("Slice: scalar input");
  const bool vector = xv.rank() == 1;
  if (axis >= xv.rank()) throw InputError("Slice: axis out of range");
  const std::size_t extent = xv.shape()[axis];
  if (begin >= end || end > extent) {
    throw InputError("Slice: range [" + std::to_string(begin) + "," +
                     std::to_string(end) + ") invalid for extent " +
                     std::to_string(extent));
  }
  const std::size_t rows = xv.rows(), cols = xv.cols();
  const bool by_row = !vector && axis == 0;
  const std::size_t out_rows = by_row ? end - begin : rows;
  const std::size_t out_cols = by_row ? cols : end - begin;
  const std::size_t col0 = by_row ? 0 : begin;
  const std::size_t row0 = by_row ? begin : 0;
  Tensor out(vector ? Shape{out_cols} : Shape{out_rows, out_cols});
  for (std::size_t r = 0; r < out_rows; ++r) {
    for (std::size_t c = 0; c < out_cols; ++c) {
      out[r * out_cols + c] = xv[(row0 + r) * cols + col0 + c];
    }
  }
  const Var inputs[] = {x};
  return x.tape()->Record(
      "Slice", std::move(out), inputs,
      [=](Tape& tape, const Tensor& g) {
        Tensor* gx = tape.GradFor(x);
        for (std::size_t r = 0; r < out_rows; ++r) {
          for (std::size_t c = 0; c < out_cols; ++c) {
            (*gx)[(row0 + r) * cols + col0 + c] += g[r * out_cols + c];
          }
        }
      });
}

Var Reshape(Var x, Shape shape) {
  const Tensor& xv = x.value();
  if (ShapeSize(shape) != xv.size()) {
    throw InputError("Reshape: " + ShapeToString(xv.shape()) + " to " +
                     ShapeToString(shape));
  }
  Tensor out(std::move(shape),
             std::vector<double>(xv.values().begin(), xv.values().end()));
  const Var inputs[] = {x};
  return x.tape()->Record("Reshape", std::move(out), inputs,
                          [x](Tape& tape, const Tensor& g) {
                            Tensor* gx = tape.GradFor(x);
                            for (std::size_t i = 0; i < g.size(); ++i) {
                              (*gx)[i] += g[i];
                            }
                          });
}

Var GatherRows(Var x, std::span<const std::size_t> rows) {
  const Tensor& xv = x.value();
  if (xv.rank() != 2) throw InputError("GatherRows: rank-2 input required");
  const std::size_t cols = xv.cols();
  Tensor out({rows.size(), cols});
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= xv.rows()) throw InputError("GatherRows: row out of range");
    std::copy_n(&xv[rows[r] * cols], cols, &out[r * cols]);
  }
  std::vector<std::size_t> idx(rows.begin(), rows.end());
  const Var inputs[] = {x};
  return x.tape()->Record("GatherRows", std::move(out), inputs,
                          [x, idx, cols](Tape& tape, const Tensor& g) {
                            Tensor* gx = tape.GradFor(x);
                            for (std::size_t r = 0; r < idx.size(); ++r) {
                              for (std::size_t c = 0; c < cols; ++c) {
                                (*gx)[idx[r] * cols + c] += g[r * cols + c];
                              }
                            }
                          });
}

Var GatherColumns(Var table, std::span<const std::size_t> columns) {
  const Tensor& tv = table.value();
  if (tv.rank() != 2) throw InputError("GatherColumns: rank-2 input required");
  const std::size_t dim = tv.rows(), width = tv.cols();
  Tensor out({columns.size(), dim});
  for (std::size_t r = 0; r < columns.size(); ++r) {
    if (columns[r] >= width) {
      throw InputError("GatherColumns: index " + std::to_string(columns[r]) +
                       " out of range " + std::to_string(width));
    }
    for (std::size_t d = 0; d < dim; ++d) {
      out[r * dim + d] = tv[d * width + columns[r]];
    }
  }
  std::vector<std::size_t> idx(columns.begin(), columns.end());
  const Var inputs[] = {table};
  return table.tape()->Record(
      "GatherColumns", std::move(out), inputs,
      [table, idx, dim, width](Tape& tape, const Tensor& g) {
        Tensor* gt = tape.GradFor(table);
        for (std::size_t r = 0; r < idx.size(); ++r) {
          for (std::size_t d = 0; d < dim; ++d) {
            (*gt)[d * width + idx[r]] += g[r * dim + d];
          }
        }
      });
}

Var GatherElements(Var x, std::span<const std::size_t> flat_indices) {
  const Tensor& xv = x.value();
  Tensor out({flat_indices.size()});
  for (std::size_t i = 0; i < flat_indices.size(); ++i) {
    if (flat_indices[i] >= xv.size()) {
      throw InputError("GatherElements: index out of range");
    }
    out[i] = xv[flat_indices[i]];
  }
  std::vector<std::size_t> idx(flat_indices.begin(), flat_indices.end());
  const Var inputs[] = {x};
  return x.tape()->Record("GatherElements", std::move(out), inputs,
                          [x, idx](Tape& tape, const Tensor& g) {
                            Tensor* gx = tape.GradFor(x);
                            for (std::size_t i = 0; i < idx.size(); ++i) {
                              (*gx)[idx[i]] += g[i];
                            }
                          });
}

Var Window(Var x, std::size_t block, int lo, int hi) {
  const Tensor& xv = x.value();
  if (xv.rank() != 2) throw InputError("Window: rank-2 input required");
  if (block == 0 || xv.rows() % block != 0) {
    throw InputError("Window: row count not a multiple of block");
  }
  if (lo > hi) throw InputError("Window: lo > hi");
  const std::size_t dim = xv.cols();
  const auto steps = static_cast<long>(xv.rows() / block);
  const auto width = static_cast<std::size_t>(hi - lo + 1);
  Tensor out({xv.rows(), width * dim});
  for (long t = 0; t < steps; ++t) {
    for (std::size_t b = 0; b < block; ++b) {
      double* orow = &out[(t * block + b) * width * dim];
      for (int o = lo; o <= hi; ++o) {
        const long src = t + o;
        if (src < 0 || src >= steps) continue;
        std::copy_n(&xv[(src * block + b) * dim], dim,
                    orow + static_cast<std::size_t>(o - lo) * dim);
      }
    }
  }
  const Var inputs[] = {x};
  return x.tape()->Record(
      "Window", std::move(out), inputs,
      [=](Tape& tape, const Tensor& g) {
        Tensor* gx = tape.GradFor(x);
        for (long t = 0; t < steps; ++t) {
          for (std::size_t b = 0; b < block; ++b) {
            const double* grow = &g[(t * block + b) * width * dim];
            for (int o = lo; o <= hi; ++o) {
              const long src = t + o;
              if (src < 0 || src >= steps) continue;
              double* dst = &(*gx)[(src * block + b) * dim];
              const double* from =
                  grow + static_cast<std::size_t>(o - lo) * dim;
              for (std::size_t d = 0; d < dim; ++d) dst[d] += from[d];
            }
          }
        }
      });
}

namespace {

// Unary op whose derivative is a function of (input, output).
template <typename F, typename D>
Var Pointwise(Var x, const char* op, F f, D df) {
  const Tensor& xv = x.value();
  Tensor out(xv.shape());
  for (std::size_t i = 0; i < xv.size(); ++i) out[i] = f(xv[i]);
  const Var inputs[] = {x};
  Tape* tape = x.tape();
  const std::size_t out_id = tape->size();
  return tape->Record(op, std::move(out), inputs,
                      [x, out_id, df](Tape& tape, const Tensor& g) {
                        Tensor* gx = tape.GradFor(x);
                        const Tensor& xv = tape.ValueOf(x.id());
                        const Tensor& yv = tape.ValueOf(out_id);
                        for (std::size_t i = 0; i < g.size(); ++i) {
                          (*gx)[i] += g[i] * df(xv[i], yv[i]);
                        }
                      });
}

}  // namespace

Var Relu(Var x) {
  return Pointwise(
      x, "Relu", [](double v) { return v > 0.0 ? v : 0.0; },
      [](double v, double) { return v > 0.0 ? 1.0 : 0.0; });
}

Var Tanh(Var x) {
  return Pointwise(
      x, "Tanh", [](double v) { return std::tanh(v); },
      [](double, double y) { return 1.0 - y * y; });
}

Var Sigmoid(Var x) {
  return Pointwise(
      x, "Sigmoid",
      [](double v) {
        if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
        const double e = std::exp(v);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Var SoftmaxLastAxis(Var x) {
  const Tensor& xv = x.value();
  RequireRank2(xv, "SoftmaxLastAxis");
  const std::size_t rows = xv.rows(), cols = xv.cols();
  Tensor out(xv.shape());
  for (std::size_t r = 0; r < rows; ++r) {
    const double* in = &xv[r * cols];
    double* o = &out[r * cols];
    const double mx = *std::max_element(in, in + cols);
    double total = 0.0;
    for (std::size_t c = 0; c < cols; ++c) total += (o[c] = std::exp(in[c] - mx));
    for (std::size_t c = 0; c < cols; ++c) o[c] /= total;
  }
  const Var inputs[] = {x};
  Tape* tape = x.tape();
  const std::size_t out_id = tape->size();
  return tape->Record(
      "SoftmaxLastAxis", std::move(out), inputs,
      [x, out_id, rows, cols](Tape& tape, const Tensor& g) {
        Tensor* gx = tape.GradFor(x);
        const Tensor& y = tape.ValueOf(out_id);
        for (std::size_t r = 0; r < rows; ++r) {
          double dot = 0.0;
          for (std::size_t c = 0; c < cols; ++c) {
            dot += g[r * cols + c] * y[r * cols + c];
          }
          for (std::size_t c = 0; c < cols; ++c) {
            (*gx)[r * cols + c] += y[r * cols + c] * (g[r * cols + c] - dot);
          }
        }
      });
}

Var LogSumExp(Var x, std::size_t axis) {
  const Tensor& xv = x.value();
  RequireRank2(xv, "LogSumExp");
  if (xv.rank() == 0 || axis >= xv.rank()) {
    throw InputError("LogSumExp: axis out of range for shape " +
                     ShapeToString(xv.shape()));
  }
  // View as (outer, reduce, inner) with element (o, k, i) at
  // o * reduce * inner + k * inner + i.
  std::size_t outer, reduce, inner;
  Shape shape;
  if (xv.rank() == 1) {
    outer = 1, reduce = xv.size(), inner = 1;
  } else if (axis == 0) {
    outer = 1, reduce = xv.rows(), inner = xv.cols();
    shape = {inner};
  } else {
    outer = xv.rows(), reduce = xv.cols(), inner = 1;
    shape = {outer};
  }
  Tensor out(shape);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t i = 0; i < inner; ++i) {
      const std::size_t base = o * reduce * inner + i;
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < reduce; ++k) {
        mx = std::max(mx, xv[base + k * inner]);
      }
      double total = 0.0;
      for (std::size_t k = 0; k < reduce; ++k) {
        total += std::exp(xv[base + k * inner] - mx);
      }
      out[o * inner + i] = mx + std::log(total);
    }
  }
  const Var inputs[] = {x};
  Tape* tape = x.tape();
  const std::size_t out_id = tape->size();
  return tape->Record(
      "LogSumExp", std::move(out), inputs,
      [=](Tape& tape, const Tensor& g) {
        Tensor* gx = tape.GradFor(x);
        const Tensor& xv = tape.ValueOf(x.id());
        const Tensor& y = tape.ValueOf(out_id);
        for (std::size_t o = 0; o < outer; ++o) {
          for (std::size_t i = 0; i < inner; ++i) {
            const std::size_t base = o * reduce * inner + i;
            const double lse = y[o * inner + i];
            const double go = g[o * inner + i];
            for (std::size_t k = 0; k < reduce; ++k) {
              (*gx)[base + k * inner] +=
                  go * std::exp(xv[base + k * inner] - lse);
            }
          }
        }
      });
}

Var Sum(Var x) {
  const Tensor& xv = x.value();
  double total = 0.0;
  for (double v : xv.values()) total += v;
  const Var inputs[] = {x};
  return x.tape()->Record("Sum", Tensor::Scalar(total), inputs,
                          [x](Tape& tape, const Tensor& g) {
                            Tensor* gx = tape.GradFor(x);
                            const double go = g[0];
                            for (double& v : gx->values()) v += go;
                          });
}

Var Dropout(Var x, double rate, bool train, std::uint64_t seed) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw InputError("Dropout: rate must lie in [0, 1), got " +
                     std::to_string(rate));
  }
  if (!train || rate == 0.0) return x;
  const Tensor& xv = x.value();
  Rng rng(seed);
  const double keep_scale = 1.0 / (1.0 - rate);
  std::vector<double> mask(xv.size());
  Tensor out(xv.shape());
  for (std::size_t i = 0; i < xv.size(); ++i) {
    mask[i] = rng.Uniform() < rate ? 0.0 : keep_scale;
    out[i] = xv[i] * mask[i];
  }
  const Var inputs[] = {x};
  return x.tape()->Record("Dropout", std::move(out), inputs,
                          [x, mask](Tape& tape, const Tensor& g) {
                            Tensor* gx = tape.GradFor(x);
                            for (std::size_t i = 0; i < g.size(); ++i) {
                              (*gx)[i] += g[i] * mask[i];
                            }
                          });
}

}  // namespace cner
