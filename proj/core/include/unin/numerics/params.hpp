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

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "unin/numerics/tape.hpp"
#include "unin/numerics/tensor.hpp"

namespace unin::numerics {

/// How a parameter received its initial values.
struct InitRecord {
  std::string distribution = "explicit";
  double bound = 0.0;
  std::uint64_t seed = 0;
};

/// Named model parameters. Names are unique and iteration order is the
/// lexicographic order of names, which keeps serialization deterministic.
class ParamSet {
 public:
  void add(const std::string& name, Tensor value, InitRecord init = {});

  /// Draws uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) from a stream derived
  /// from `base_seed` and the parameter name.
  const Tensor& add_uniform(const std::string& name, Shape shape, std::size_t fan_in,
                            std::uint64_t base_seed);

  bool contains(const std::string& name) const { return values_.count(name) > 0; }
  const Tensor& at(const std::string& name) const;
  Tensor& at(const std::string& name);
  const InitRecord& init(const std::string& name) const;

  std::size_t size() const { return values_.size(); }
  std::size_t scalar_count() const;
  std::vector<std::string> names() const;
  const std::map<std::string, Tensor>& tensors() const { return values_; }

  bool operator==(const ParamSet& other) const { return values_ == other.values_; }

 private:
  std::map<std::string, Tensor> values_;
  std::map<std::string, InitRecord> inits_;
};

/// p <- p - lr * g. Throws ContractError when a gradient is missing or
/// mis-shaped.
ParamSet sgd_step(const ParamSet& params, const GradMap& grads, double lr);

/// SGD with classical momentum: v <- m v + g; p <- p - lr v. With momentum 0
/// this is exactly sgd_step.
class SgdOptimizer {
 public:
  explicit SgdOptimizer(double momentum = 0.0) : momentum_(momentum) {}
  void step(ParamSet& params, const GradMap& grads, double lr);

 private:
  double momentum_;
  GradMap velocity_;
};

/// base_lr * factor^floor(epoch / every). Defaults give the 0.2-per-10-epochs
/// decay.
double lr_schedule(int epoch, double base_lr, double factor = 0.2, int every = 10);

/// Central differences (f(p + eps) - f(p - eps)) / (2 eps) for every scalar
/// entry of every parameter. eps must lie in [1e-7, 1e-3].
GradMap finite_difference_grad(const std::function<double(const ParamSet&)>& f,
                               const ParamSet& params, double eps);

/// Scales all gradients so their joint L2 norm is at most `max_norm`.
/// Returns the norm before clipping.
double clip_grad_norm(GradMap& grads, double max_norm);

}  // namespace unin::numerics
