// Copyright 2026 The UNIN Authors. All Rights Reserved.
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

#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "unin/numerics/tensor.hpp"

namespace unin::numerics {

class Tape;
class ParamSet;

using GradMap = std::map<std::string, Tensor>;

/// Handle to a value recorded on a Tape. Cheap to copy; valid while the tape
/// lives.
class Var {
 public:
  Var() = default;

  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
  double item() const { return value().item(); }
  bool requires_grad() const;

  Tape* tape() const { return tape_; }
  std::size_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Records primitives for reverse-mode differentiation. A tape is confined to
/// one thread; build one per forward pass.
class Tape {
 public:
  /// Receives the gradient of the node's output and accumulates into parents
  /// through `Tape::accumulate`.
  using BackwardFn = std::function<void(Tape&, const Tensor& out_grad)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor value);
  Var parameter(const std::string& name, Tensor value);

  /// Registers every entry of `params` as a named leaf.
  std::map<std::string, Var> bind(const ParamSet& params);

  /// d(output)/d(p) for every named parameter on this tape. Parameters the
  /// output does not depend on receive zero tensors.
  GradMap backward(Var output);

  /// Used by primitives. Throws NumericError naming `op` when `value` is not
  /// finite.
  Var record(const char* op, Tensor value, const std::vector<Var>& parents, BackwardFn fn);

  const Tensor& value(std::size_t id) const { return nodes_[id].value; }
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
  void accumulate(std::size_t id, const Tensor& grad);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    const char* op = "";
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    BackwardFn backward;
  };

  std::vector<Node> nodes_;
  std::map<std::string, std::size_t> params_;
};

// Forward primitives. Axis convention for rank-2 inputs: axis 0 runs down the
// rows (one result per column), axis 1 runs along a row (one result per row).
// A rank-1 input only accepts axis 0. Reductions keep the reduced dimension
// as size 1.

Var matmul(Var a, Var b);
Var transpose(Var a);
Var concat(const std::vector<Var>& parts, std::size_t axis);
Var reshape(Var a, Shape shape);
Var slice(Var a, std::size_t axis, std::size_t begin, std::size_t end);

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var div(Var a, Var b);
/// Adds a length-cols bias to every row of `a`.
Var add_row(Var a, Var bias);
Var scale(Var a, double factor);
Var add_scalar(Var a, double offset);

Var relu(Var x);
Var leaky_relu(Var x, double slope);
Var exp(Var x);
Var log(Var x);
Var tanh(Var x);
Var square(Var x);

/// Softmax along `axis`. Masked positions (mask[i] == false along the axis)
/// receive exactly 0; throws ContractError when a slice is fully masked.
Var softmax(Var x, std::size_t axis, const std::vector<bool>* mask = nullptr);
Var logsumexp(Var x, std::size_t axis);
Var max_reduce(Var x, std::size_t axis);
Var sum(Var x);

/// Row-wise 1-D cross-correlation with zero padding that keeps the row
/// length. Kernel of length k pads k-1 zeros: (k-1)/2 on the right and the
/// rest on the left, so even kernels lean one extra tap to the left.
Var conv1d_same(Var x, Var kernel, std::optional<Var> bias = std::nullopt);

/// Left padding used by conv1d_same for a kernel of length k.
constexpr std::size_t conv_left_pad(std::size_t k) { return k - 1 - (k - 1) / 2; }

// Value-level conveniences that evaluate a primitive on a scratch tape.
namespace eval {
Tensor softmax(const Tensor& x, std::size_t axis, const std::vector<bool>* mask = nullptr);
Tensor max_reduce(const Tensor& x, std::size_t axis);
Tensor conv1d_same(const Tensor& x, const Tensor& kernel, double bias = 0.0);
Tensor matmul(const Tensor& a, const Tensor& b);
}  // namespace eval

}  // namespace unin::numerics
