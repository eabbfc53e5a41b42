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

#include "unin/uni/uni.hpp"

#include "unin/errors.hpp"

namespace unin::uni {

namespace nm = unin::numerics;

std::string_view axis_name(ConvAxis axis) { return axis == ConvAxis::kRow ? "row" : "column"; }

ConvAxis parse_axis(std::string_view name) {
  if (name == "row") return ConvAxis::kRow;
  if (name == "column") return ConvAxis::kColumn;
  throw ConfigError("unknown convolution axis '" + std::string(name) + "' (expected row or column)");
}

std::optional<std::string> kernel_width_warning(std::size_t kernel_size, std::size_t agents) {
  if (kernel_size <= 2 * agents) return std::nullopt;
  return "kernel size " + std::to_string(kernel_size) + " exceeds twice the agent count " +
         std::to_string(agents) + "; outer taps only ever see padding";
}

Var uni_conv(Var att, const std::vector<Var>& kernels, ConvAxis axis, std::optional<Var> mask) {
  if (kernels.empty()) throw ContractError("uni_conv needs at least one kernel");
  if (att.value().rank() != 2 || att.rows() != att.cols()) {
    throw ShapeError("uni_conv: attention must be square, got " + nm::to_string(att.shape()));
  }
  if (mask && mask->shape() != att.shape()) {
    throw ShapeError("uni_conv: mask " + nm::to_string(mask->shape()) + " does not match " +
                     nm::to_string(att.shape()));
  }
  Var h = axis == ConvAxis::kRow ? att : nm::transpose(att);
  std::optional<Var> m = mask;
  if (m && axis == ConvAxis::kColumn) m = nm::transpose(*m);
  for (const Var& kernel : kernels) {
    h = nm::relu(nm::conv1d_same(h, kernel));
    if (m) h = nm::mul(h, *m);
  }
  return axis == ConvAxis::kRow ? h : nm::transpose(h);
}

Var fuse_interaction(Var ci_expanded, Var h) {
  if (ci_expanded.shape() != h.shape()) {
    throw ShapeError("fuse_interaction: shapes " + nm::to_string(ci_expanded.shape()) + " and " +
                     nm::to_string(h.shape()) + " differ");
  }
  return nm::mul(ci_expanded, h);
}

Tensor uni_conv(const Tensor& att, const std::vector<Tensor>& kernels, ConvAxis axis) {
  nm::Tape tape;
  std::vector<Var> ks;
  for (const Tensor& k : kernels) ks.push_back(tape.constant(k));
  return uni_conv(tape.constant(att), ks, axis).value();
}

Tensor fuse_interaction(const Tensor& ci_expanded, const Tensor& h) {
  nm::Tape tape;
  return fuse_interaction(tape.constant(ci_expanded), tape.constant(h)).value();
}

}  // namespace unin::uni
