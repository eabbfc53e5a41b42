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

#include <benchmark/benchmark.h>

#include "unin/hga/hga.hpp"
#include "unin/numerics/random.hpp"
#include "unin/numerics/tape.hpp"
#include "unin/predictor/model.hpp"
#include "unin/trajdata/synthetic.hpp"

namespace {

namespace nm = unin::numerics;
namespace pr = unin::predictor;

unin::trajdata::Scenario scenario_with_background(int per_category) {
  unin::trajdata::GeneratorConfig g;
  g.num_scenarios = 1;
  g.agents_per_category = {per_category, per_category, per_category};
  return unin::trajdata::generate_synthetic(g).front();
}

nm::Tensor random_tensor(nm::Shape shape, nm::Rng& rng, double lo, double hi) {
  nm::Tensor t(std::move(shape));
  for (double& v : t.data()) v = rng.uniform(lo, hi);
  return t;
}

void BM_Forward(benchmark::State& state) {
  const pr::ModelConfig c;
  const auto sc = scenario_with_background(static_cast<int>(state.range(0)));
  const pr::SceneInputs scene = pr::prepare_scene(sc, c);
  const nm::ParamSet params = pr::init_params(c);
  for (auto _ : state) benchmark::DoNotOptimize(pr::predict_gmm(params, c, scene));
  state.counters["agents"] = static_cast<double>(scene.agents);
}
BENCHMARK(BM_Forward)->Arg(1)->Arg(3)->Arg(5)->Unit(benchmark::kMicrosecond);

void BM_ForwardBackward(benchmark::State& state) {
  const pr::ModelConfig c;
  const auto sc = scenario_with_background(static_cast<int>(state.range(0)));
  const pr::SceneInputs scene = pr::prepare_scene(sc, c);
  const nm::ParamSet params = pr::init_params(c);
  for (auto _ : state) benchmark::DoNotOptimize(pr::loss_and_grad(params, c, scene));
  state.counters["agents"] = static_cast<double>(scene.agents);
}
BENCHMARK(BM_ForwardBackward)->Arg(1)->Arg(3)->Arg(5)->Unit(benchmark::kMicrosecond);

void BM_Conv1dSame(benchmark::State& state) {
  nm::Rng rng(1);
  const auto n = static_cast<std::size_t>(state.range(0)), k = static_cast<std::size_t>(state.range(1));
  const nm::Tensor x = random_tensor({n, n}, rng, 0.0, 1.0);
  const nm::Tensor kernel = random_tensor({k}, rng, -1.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(nm::eval::conv1d_same(x, kernel));
}
BENCHMARK(BM_Conv1dSame)->ArgsProduct({{16, 64}, {1, 3, 10}});

void BM_LaplacianNormalize(benchmark::State& state) {
  nm::Rng rng(2);
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<unin::trajdata::Vec2> positions;
  for (std::size_t i = 0; i < n; ++i) positions.push_back({rng.uniform(-50, 50), rng.uniform(-50, 50)});
  const nm::Tensor e = unin::hga::distance_kernel(positions);
  for (auto _ : state) benchmark::DoNotOptimize(unin::hga::laplacian_normalize(e));
}
BENCHMARK(BM_LaplacianNormalize)->RangeMultiplier(4)->Range(4, 256);

}  // namespace

BENCHMARK_MAIN();
