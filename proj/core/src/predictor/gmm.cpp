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

#include "unin/predictor/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "unin/errors.hpp"
#include "unin/numerics/random.hpp"

namespace unin::predictor {

GMMParams::GMMParams(std::size_t a, std::size_t s, std::size_t k) : agents(a), steps(s), components(k) {
  const std::size_t n = a * s * k;
  pi.assign(n, 0.0);
  mu_x.assign(n, 0.0);
  mu_y.assign(n, 0.0);
  sigma_x.assign(n, 1.0);
  sigma_y.assign(n, 1.0);
  rho.assign(n, 0.0);
}

void GMMParams::validate() const {
  const std::size_t n = agents * steps * components;
  if (components == 0 || pi.size() != n || mu_x.size() != n || mu_y.size() != n || sigma_x.size() != n ||
      sigma_y.size() != n || rho.size() != n) {
    throw ContractError("GMMParams: inconsistent sizes");
  }
  for (std::size_t base = 0; base < n; base += components) {
    double total = 0.0;
    for (std::size_t k = 0; k < components; ++k) {
      const std::size_t i = base + k;
      if (!(pi[i] >= 0.0)) throw ContractError("GMMParams: negative mixture weight");
      if (!(sigma_x[i] > 0.0 && sigma_y[i] > 0.0)) throw ContractError("GMMParams: non-positive scale");
      if (!(std::abs(rho[i]) < 1.0)) throw ContractError("GMMParams: |rho| must be below 1");
      if (!std::isfinite(mu_x[i]) || !std::isfinite(mu_y[i])) throw ContractError("GMMParams: non-finite mean");
      total += pi[i];
    }
    if (std::abs(total - 1.0) > 1e-9) throw ContractError("GMMParams: weights do not sum to 1");
  }
}

GMMParams gmm_head(const numerics::Tensor& raw, std::size_t agents, std::size_t steps, std::size_t components) {
  if (raw.rank() != 2 || raw.rows() != agents * steps || raw.cols() != 6 * components) {
    throw ShapeError("gmm_head: expected " + std::to_string(agents * steps) + " x " +
                     std::to_string(6 * components) + " raw outputs, got " + numerics::to_string(raw.shape()));
  }
  const std::size_t kk = components;
  GMMParams g(agents, steps, kk);
  for (std::size_t s = 0; s < steps; ++s) {
    for (std::size_t a = 0; a < agents; ++a) {
      const std::size_t row = s * agents + a;
      double peak = raw(row, 0);
      for (std::size_t k = 1; k < kk; ++k) peak = std::max(peak, raw(row, k));
      double z = 0.0;
      for (std::size_t k = 0; k < kk; ++k) z += std::exp(raw(row, k) - peak);
      for (std::size_t k = 0; k < kk; ++k) {
        const std::size_t i = g.index(a, s, k);
        g.pi[i] = std::exp(raw(row, k) - peak) / z;
        g.mu_x[i] = raw(row, kk + k);
        g.mu_y[i] = raw(row, 2 * kk + k);
        g.sigma_x[i] = std::exp(raw(row, 3 * kk + k));
        g.sigma_y[i] = std::exp(raw(row, 4 * kk + k));
        g.rho[i] = std::tanh(raw(row, 5 * kk + k));
      }
    }
  }
  return g;
}

double log_density(Vec2 x, double mu_x, double mu_y, double sigma_x, double sigma_y, double rho) {
  const double dx = (x.x - mu_x) / sigma_x;
  const double dy = (x.y - mu_y) / sigma_y;
  const double one_m = 1.0 - rho * rho;
  const double q = dx * dx + dy * dy - 2.0 * rho * dx * dy;
  return -std::log(2.0 * std::numbers::pi) - std::log(sigma_x) - std::log(sigma_y) - 0.5 * std::log(one_m) -
         0.5 * q / one_m;
}

NllResult nll_loss(const GMMParams& g, const Trajectories& truth, const StepMask& mask) {
  if (truth.size() != g.agents || mask.size() != g.agents) {
    throw ShapeError("nll_loss: truth/mask agent count differs from the mixture");
  }
  NllResult out;
  std::vector<double> terms(g.components);
  for (std::size_t a = 0; a < g.agents; ++a) {
    if (truth[a].size() != g.steps || mask[a].size() != g.steps) {
      throw ShapeError("nll_loss: truth/mask step count differs from the mixture");
    }
    for (std::size_t s = 0; s < g.steps; ++s) {
      if (!mask[a][s]) continue;
      double peak = -INFINITY;
      for (std::size_t k = 0; k < g.components; ++k) {
        const std::size_t i = g.index(a, s, k);
        terms[k] = std::log(g.pi[i]) + log_density(truth[a][s], g.mu_x[i], g.mu_y[i], g.sigma_x[i], g.sigma_y[i],
                                                   g.rho[i]);
        peak = std::max(peak, terms[k]);
      }
      double z = 0.0;
      for (double t : terms) z += std::exp(t - peak);
      out.sum -= peak + std::log(z);
      ++out.count;
    }
  }
  if (out.count == 0) throw EmptyDatasetError("nll_loss: every (agent, step) pair is masked out");
  return out;
}

SampleSet sample_trajectories(const GMMParams& g, std::size_t num_samples, std::uint64_t seed) {
  numerics::Rng rng(seed);
  SampleSet out(num_samples, Trajectories(g.agents, std::vector<Vec2>(g.steps)));
  for (std::size_t n = 0; n < num_samples; ++n) {
    for (std::size_t a = 0; a < g.agents; ++a) {
      for (std::size_t s = 0; s < g.steps; ++s) {
        const double u = rng.uniform();
        std::size_t pick = g.components - 1;
        double acc = 0.0;
        for (std::size_t k = 0; k < g.components; ++k) {
          acc += g.pi[g.index(a, s, k)];
          if (u < acc) {
            pick = k;
            break;
          }
        }
        const std::size_t i = g.index(a, s, pick);
        const double z1 = rng.normal();
        const double z2 = rng.normal();
        out[n][a][s] = {g.mu_x[i] + g.sigma_x[i] * z1,
                        g.mu_y[i] + g.sigma_y[i] * (g.rho[i] * z1 + std::sqrt(1.0 - g.rho[i] * g.rho[i]) * z2)};
      }
    }
  }
  return out;
}

Trajectories predict_deterministic(const GMMParams& g) {
  Trajectories out(g.agents, std::vector<Vec2>(g.steps));
  for (std::size_t a = 0; a < g.agents; ++a) {
    for (std::size_t s = 0; s < g.steps; ++s) {
      std::size_t best = 0;
      for (std::size_t k = 1; k < g.components; ++k)
        if (g.pi[g.index(a, s, k)] > g.pi[g.index(a, s, best)]) best = k;
      const std::size_t i = g.index(a, s, best);
      out[a][s] = {g.mu_x[i], g.mu_y[i]};
    }
  }
  return out;
}

}  // namespace unin::predictor
