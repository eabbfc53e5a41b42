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

#include <optional>
#include <string>
#include <vector>

#include "unin/numerics/tape.hpp"
#include "unin/numerics/tensor.hpp"

/// Unlimited-neighborhood convolution over the agent attention matrix.
namespace unin::uni {

using numerics::Tensor;
using numerics::Var;

enum class ConvAxis {
  kRow,     // slide over senders j for a fixed receiver i
  kColumn,  // slide over receivers i for a fixed sender j
};

std::string_view axis_name(ConvAxis axis);
/// Accepts "row" or "column"; throws ConfigError otherwise.
ConvAxis parse_axis(std::string_view name);

/// Non-fatal message when a kernel is wider than 2N, else empty.
std::optional<std::string> kernel_width_warning(std::size_t kernel_size, std::size_t agents);

/// h = relu(conv(h)) once per kernel, starting from `att`. When `mask` is
/// given (N x N, zero outside real agent pairs) it is reapplied after every
/// repeat so phantom rows and columns stay exactly zero.
Var uni_conv(Var att, const std::vector<Var>& kernels, ConvAxis axis = ConvAxis::kRow,
             std::optional<Var> mask = std::nullopt);

/// F = ci_expanded * h entrywise.
Var fuse_interaction(Var ci_expanded, Var h);

Tensor uni_conv(const Tensor& att, const std::vector<Tensor>& kernels, ConvAxis axis = ConvAxis::kRow);
Tensor fuse_interaction(const Tensor& ci_expanded, const Tensor& h);

}  // namespace unin::uni
