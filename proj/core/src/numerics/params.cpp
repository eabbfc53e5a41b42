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

#include "unin/numerics/params.hpp"

#include <algorithm>
#include <cmath>

#include "unin/errors.hpp"
#include "unin/numerics/random.hpp"

namespace unin::numerics {

void ParamSet::add(const std::string& name, Tensor value, InitRecord init) {
  if (values_.count(name) > 0) throw ContractError("duplicate parameter name '" + name + "'");
  values_.emplace(name, std::move(value));
  inits_.emplace(name, std::move(init));
}

const Tensor& ParamSet::add_uniform(const std::string& name, Shape shape, std::size_t fan_in,
                                    std::uint64_t base_seed) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(fan_in, 1)));
  const std::uint64_t seed = derive_seed(base_seed, hash_name(name));
  Rng rng(seed);
  Tensor t(std::move(shape));
  for (double& v : t.data()) v = rng.uniform(-bound, bound);
  add(name, std::move(t), InitRecord{"uniform", bound, seed});
  return values_.at(name);
}

const Tensor& ParamSet::at(const std::string& name) const {
  auto it = values_.find(name);
  if (it == values_.end()) throw ContractError("unknown parameter '" + name + "'");
  return it->second;
}

Tensor& ParamSet::at(const std::string& name) {
  auto it = values_.find(name);
  if (it == values_.end()) throw ContractError("unknown parameter '" + name + "'");
  return it->second;
}

const InitRecord& ParamSet::init(const std::string& name) const {
  auto it = inits_.find(name);
  if (it == inits_.end()) throw ContractError("unknown parameter '" + name + "'");
  return it->second;
}

std::size_t ParamSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& [name, t] : values_) n += t.numel();
  return n;
}

std::vector<std::string> ParamSet::names() const {
  std::vector<std::string> out;
  out.reserve(values_.size());
  for (const auto& [name, t] : values_) out.push_back(name);
  return out;
}

namespace {

const Tensor& grad_for(const GradMap& grads, const std::string& name, const Tensor& param) {
  auto it = grads.find(name);
  if (it == grads.end()) throw ContractError("missing gradient for parameter '" + name + "'");
  if (it->second.numel() != param.numel()) {
    throw ContractError("gradient for '" + name + "' has shape " + to_string(it->second.shape()) +
                        ", parameter has " + to_string(param.shape()));
  }
  return it->second;
}

}  // namespace

ParamSet sgd_step(const ParamSet& params, const GradMap& grads, double lr) {
  if (!(lr > 0.0)) throw ContractError("learning rate must be positive");
  ParamSet out = params;
  for (const std::string& name : params.names()) {
    Tensor& p = out.at(name);
    const Tensor& g = grad_for(grads, name, p);
    for (std::size_t i = 0; i < p.numel(); ++i) p[i] -= lr * g[i];
  }
  return out;
}

void SgdOptimizer::step(ParamSet& params, const GradMap& grads, double lr) {
  if (!(lr > 0.0)) throw ContractError("learning rate must be positive");
  for (const std::string& name : params.names()) {
    Tensor& p = params.at(name);
    const Tensor& g = grad_for(grads, name, p);
    if (momentum_ == 0.0) {
      for (std::size_t i = 0; i < p.numel(); ++i) p[i] -= lr * g[i];
      continue;
    }
    auto [it, inserted] = velocity_.try_emplace(name, Tensor::zeros_like(p));
    Tensor& v = it->second;
    for (std::size_t i = 0; i < p.numel(); ++i) {
      v[i] = momentum_ * v[i] + g[i];
      p[i] -= lr * v[i];
    }
  }
}

double lr_schedule(int epoch, double base_lr, double factor, int every) {
  if (epoch < 0) throw ContractError("epoch must be non-negative");
  if (every <= 0) throw ContractError("decay interval must be positive");
  return base_lr * std::pow(factor, epoch / every);
}

GradMap finite_difference_grad(const std::function<double(const ParamSet&)>& f,
                               const ParamSet& params, double eps) {
  if (!(eps >= 1e-7 && eps <= 1e-3)) throw ContractError("finite-difference eps outside [1e-7, 1e-3]");
  GradMap grads;
  ParamSet probe = params;
  for (const std::string& name : params.names()) {
    Tensor& p = probe.at(name);
    Tensor g = Tensor::zeros_like(p);
    for (std::size_t i = 0; i < p.numel(); ++i) {
      const double original = p[i];
      p[i] = original + eps;
      const double up = f(probe);
      p[i] = original - eps;
      const double down = f(probe);
      p[i] = original;
      if (!std::isfinite(up) || !std::isfinite(down)) {
        throw NumericError("objective is not finite when perturbing '" + name + "'[" +
                           std::to_string(i) + "]");
      }
      g[i] = (up - down) / (2.0 * eps);
    }
    grads.emplace(name, std::move(g));
  }
  return grads;
}

double clip_grad_norm(GradMap& grads, double max_norm) {
  double sq = 0.0;
  for (const auto& [name, g] : grads)
    for (double v : g.data()) sq += v * v;
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const double s = max_norm / norm;
    for (auto& [name, g] : grads)
      for (double& v : g.data()) v *= s;
  }
  return norm;
}

}  // namespace unin::numerics
