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

#include <cmath>
#include <numbers>
#include <string>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "unin/errors.hpp"
#include "unin/predictor/config.hpp"
#include "unin/predictor/gmm.hpp"
#include "unin/predictor/model.hpp"
#include "unin/predictor/train.hpp"
#include "unin/trajdata/synthetic.hpp"

namespace nm = unin::numerics;
namespace pr = unin::predictor;
using nm::Tensor;
using nm::Var;
using unin::testing::random_tensor;

namespace {

pr::GMMParams single_component(double mx, double my, double sx, double sy, double rho) {
  pr::GMMParams g(1, 1, 1);
  g.pi[0] = 1.0;
  g.mu_x[0] = mx;
  g.mu_y[0] = my;
  g.sigma_x[0] = sx;
  g.sigma_y[0] = sy;
  g.rho[0] = rho;
  return g;
}

unin::trajdata::Scenario with_phantoms(unin::trajdata::Scenario sc, int count) {
  for (int p = 0; p < count; ++p) {
    unin::trajdata::AgentTrack tr;
    tr.agent_id = 1000 + p;
    tr.category = p % static_cast<int>(sc.categories.size());
    tr.positions.assign(static_cast<std::size_t>(sc.t_pred), {0.0, 0.0});
    tr.present.assign(static_cast<std::size_t>(sc.t_pred), false);
    sc.tracks.push_back(tr);
  }
  return sc;
}

std::vector<unin::trajdata::Scenario> synthetic(int n, std::uint64_t seed) {
  unin::trajdata::GeneratorConfig g;
  g.num_scenarios = n;
  g.seed = seed;
  return unin::trajdata::generate_synthetic(g);
}

}  // namespace

TEST(Gcn, ZeroTransformIsResidualIdentity) {
  nm::Rng rng(1);
  nm::Tape tape;
  const Tensor h0 = random_tensor({3, 4}, rng, 0.0, 1.0);
  Var out = pr::gcn_forward(tape.constant(h0), tape.constant(random_tensor({3, 3}, rng)),
                            {tape.constant(Tensor({4, 4}))});
  EXPECT_EQ(out.value(), h0);
  Var zero_f = pr::gcn_forward(tape.constant(h0), tape.constant(Tensor({3, 3})),
                               {tape.constant(random_tensor({4, 4}, rng))});
  EXPECT_EQ(zero_f.value(), h0);
}

TEST(Gcn, HandExample) {
  nm::Tape tape;
  Var out = pr::gcn_forward(tape.constant(Tensor::matrix({{1}, {2}})), tape.constant(Tensor::matrix({{0, 1}, {1, 0}})),
                            {tape.constant(Tensor::matrix({{1}}))});
  EXPECT_EQ(out.value(), Tensor::matrix({{3}, {3}}));
}

TEST(Tcn, IdentityConfiguration) {
  nm::Rng rng(2);
  nm::Tape tape;
  std::vector<Var> steps;
  std::vector<Tensor> values;
  for (int t = 0; t < 3; ++t) {
    values.push_back(random_tensor({2, 4}, rng));
    steps.push_back(tape.constant(values.back()));
  }
  Tensor eye({3, 3});
  for (std::size_t i = 0; i < 3; ++i) eye(i, i) = 1.0;
  Var ht = pr::tcn_forward(steps, tape.constant(Tensor::matrix({{0, 1, 0}})), tape.constant(Tensor({1})),
                           tape.constant(eye));
  ASSERT_EQ(ht.value().shape(), (nm::Shape{6, 4}));
  for (std::size_t s = 0; s < 3; ++s)
    for (std::size_t a = 0; a < 2; ++a)
      for (std::size_t c = 0; c < 4; ++c) EXPECT_EQ(ht.value()(s * 2 + a, c), values[s](a, c));
}

TEST(Tcn, ZeroInputZeroBias) {
  nm::Rng rng(3);
  nm::Tape tape;
  std::vector<Var> steps(4, tape.constant(Tensor({3, 2})));
  Var ht = pr::tcn_forward(steps, tape.constant(random_tensor({1, 3}, rng)), tape.constant(Tensor({1})),
                           tape.constant(random_tensor({4, 6}, rng)));
  for (double v : ht.value().data()) EXPECT_EQ(v, 0.0);
}

TEST(Tcn, ResizeByHand) {
  nm::Tape tape;
  // One agent, one channel, per-step scalars a = 2, b = 7.
  std::vector<Var> steps = {tape.constant(Tensor::matrix({{2}})), tape.constant(Tensor::matrix({{7}}))};
  Var ht = pr::tcn_forward(steps, tape.constant(Tensor::matrix({{1}})), tape.constant(Tensor({1})),
                           tape.constant(Tensor::matrix({{1, 0, 0}, {0, 1, 1}})));
  EXPECT_EQ(ht.value(), Tensor::matrix({{2}, {7}, {7}}));
}

TEST(Tcn, AgentsDoNotMix) {
  nm::Rng rng(4);
  nm::Tape tape;
  std::vector<Tensor> a(4), b(4);
  std::vector<Var> sa, sb;
  for (int t = 0; t < 4; ++t) {
    a[t] = random_tensor({2, 3}, rng);
    b[t] = a[t];
    b[t](1, 0) += 10.0;  // touch agent 1 only
    sa.push_back(tape.constant(a[t]));
    sb.push_back(tape.constant(b[t]));
  }
  const Var k = tape.constant(random_tensor({1, 3}, rng));
  const Var bias = tape.constant(random_tensor({1}, rng));
  const Var resize = tape.constant(random_tensor({4, 5}, rng));
  const Tensor ha = pr::tcn_forward(sa, k, bias, resize).value();
  const Tensor hb = pr::tcn_forward(sb, k, bias, resize).value();
  for (std::size_t s = 0; s < 5; ++s)
    for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(ha(s * 2, c), hb(s * 2, c));
}

TEST(GmmHead, ZerosSquash) {
  const pr::GMMParams g = pr::gmm_head(Tensor({1, 12}), 1, 1, 2);
  EXPECT_DOUBLE_EQ(g.pi[0], 0.5);
  EXPECT_DOUBLE_EQ(g.pi[1], 0.5);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_EQ(g.mu_x[k], 0.0);
    EXPECT_EQ(g.sigma_y[k], 1.0);
    EXPECT_EQ(g.rho[k], 0.0);
  }
}

TEST(GmmHead, AnalyticSquashes) {
  Tensor raw({1, 6});
  raw(0, 3) = std::log(2.0);
  raw(0, 5) = 1.0;
  const pr::GMMParams g = pr::gmm_head(raw, 1, 1, 1);
  EXPECT_NEAR(g.sigma_x[0], 2.0, 1e-15);
  EXPECT_NEAR(g.rho[0], 0.76159, 1e-5);
  EXPECT_NO_THROW(g.validate());
}

TEST(Nll, ClosedForms) {
  const pr::Trajectories truth = {{{1.5, -2.0}}};
  const pr::StepMask mask = {{true}};
  EXPECT_NEAR(pr::nll_loss(single_component(1.5, -2.0, 1, 1, 0), truth, mask).mean(),
              std::log(2.0 * std::numbers::pi), 1e-9);
  EXPECT_NEAR(pr::nll_loss(single_component(1.5, -2.0, 0.5, 0.5, 0), truth, mask).mean(),
              std::log(2.0 * std::numbers::pi * 0.25), 1e-9);
}

TEST(Nll, FixedScaleMinimumAtTruth) {
  const pr::Trajectories truth = {{{0.0, 0.0}}};
  const pr::StepMask mask = {{true}};
  const double a = 0.7, b = 1.9;
  const double best = std::log(2.0 * std::numbers::pi * a * b);
  EXPECT_NEAR(pr::nll_loss(single_component(0, 0, a, b, 0), truth, mask).sum, best, 1e-12);
  for (double off : {0.01, 0.3, 2.0}) EXPECT_GT(pr::nll_loss(single_component(off, -off, a, b, 0), truth, mask).sum, best);
}

TEST(Nll, MaskedAgentContributesNothing) {
  pr::GMMParams g(2, 1, 1);
  for (std::size_t a = 0; a < 2; ++a) {
    g.pi[a] = 1.0;
    g.sigma_x[a] = g.sigma_y[a] = 1.0;
  }
  const pr::Trajectories truth = {{{0.0, 0.0}}, {{1e6, 1e6}}};
  const pr::NllResult r = pr::nll_loss(g, truth, {{true}, {false}});
  EXPECT_EQ(r.count, 1u);
  EXPECT_NEAR(r.sum, std::log(2.0 * std::numbers::pi), 1e-12);
  EXPECT_THROW(pr::nll_loss(g, truth, {{false}, {false}}), unin::EmptyDatasetError);
}

TEST(Sampling, DegenerateSpread) {
  pr::GMMParams g(2, 3, 2);
  for (std::size_t i = 0; i < g.pi.size(); ++i) {
    g.pi[i] = 0.5;
    g.mu_x[i] = static_cast<double>(i);
    g.mu_y[i] = -static_cast<double>(i);
    g.sigma_x[i] = g.sigma_y[i] = 1e-9;
  }
  const pr::SampleSet s = pr::sample_trajectories(g, 20, 4);
  for (const pr::Trajectories& traj : s)
    for (std::size_t a = 0; a < 2; ++a)
      for (std::size_t t = 0; t < 3; ++t) {
        double best = 1e9;
        for (std::size_t k = 0; k < 2; ++k) {
          const std::size_t i = g.index(a, t, k);
          best = std::min(best, std::hypot(traj[a][t].x - g.mu_x[i], traj[a][t].y - g.mu_y[i]));
        }
        EXPECT_LT(best, 1e-6);
      }
}

TEST(Sampling, MonteCarloMomentsAndDeterminism) {
  const pr::GMMParams g = single_component(1.0, -2.0, 0.5, 2.0, 0.8);
  const std::size_t n = 100000;
  const pr::SampleSet s = pr::sample_trajectories(g, n, 99);
  double mx = 0.0, my = 0.0;
  for (const auto& t : s) {
    mx += t[0][0].x;
    my += t[0][0].y;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (const auto& t : s) {
    sxx += (t[0][0].x - mx) * (t[0][0].x - mx);
    syy += (t[0][0].y - my) * (t[0][0].y - my);
    sxy += (t[0][0].x - mx) * (t[0][0].y - my);
  }
  EXPECT_LT(std::abs(mx - 1.0), 4.0 * 0.5 / std::sqrt(n));
  EXPECT_LT(std::abs(my + 2.0), 4.0 * 2.0 / std::sqrt(n));
  EXPECT_LT(std::abs(sxy / std::sqrt(sxx * syy) - 0.8), 0.02);
  const pr::SampleSet again = pr::sample_trajectories(g, 10, 99);
  for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(again[i], s[i]);
}

TEST(Sampling, ComponentFrequenciesFollowPi) {
  pr::GMMParams g(1, 1, 2);
  g.pi = {0.3, 0.7};
  g.mu_x = {-100.0, 100.0};
  g.mu_y = {0.0, 0.0};
  g.sigma_x = g.sigma_y = {1.0, 1.0};
  g.rho = {0.0, 0.0};
  const std::size_t n = 100000;
  std::size_t right = 0;
  for (const auto& t : pr::sample_trajectories(g, n, 5)) right += t[0][0].x > 0.0 ? 1 : 0;
  const double p = static_cast<double>(right) / n;
  EXPECT_LT(std::abs(p - 0.7), 4.0 * std::sqrt(0.21 / n));
}

TEST(Deterministic, Examples) {
  EXPECT_EQ(pr::predict_deterministic(single_component(3, 4, 1, 1, 0))[0][0], (unin::trajdata::Vec2{3, 4}));
  pr::GMMParams g(1, 1, 2);
  g.pi = {0.9, 0.1};
  g.mu_x = {1.0, 2.0};
  g.mu_y = {0.0, 0.0};
  g.sigma_x = g.sigma_y = {1.0, 1.0};
  g.rho = {0.0, 0.0};
  EXPECT_EQ(pr::predict_deterministic(g)[0][0].x, 1.0);
  g.pi = {0.5, 0.5};
  EXPECT_EQ(pr::predict_deterministic(g)[0][0].x, 1.0);
}

TEST(Deterministic, MonotoneLogitReweighting) {
  nm::Rng rng(6);
  Tensor raw = random_tensor({6, 18}, rng);
  const pr::Trajectories base = pr::predict_deterministic(pr::gmm_head(raw, 2, 3, 3));
  for (std::size_t r = 0; r < 6; ++r)
    for (std::size_t k = 0; k < 3; ++k) raw(r, k) = 3.0 * raw(r, k) + 1.5;
  EXPECT_EQ(pr::predict_deterministic(pr::gmm_head(raw, 2, 3, 3)), base);
}

TEST(Config, DefaultsAndValidation) {
  pr::ModelConfig c;
  EXPECT_EQ(c.d_e, 8);
  EXPECT_EQ(c.k, 3);
  EXPECT_EQ(c.mixtures, 3);
  EXPECT_EQ(c.gcn_layers, 1);
  EXPECT_TRUE(pr::validate(c).empty());
  c.gcn_layers = 3;
  EXPECT_FALSE(pr::validate(c).empty());
  c = {};
  c.tcn_kernel = 5;
  EXPECT_THROW(pr::validate(c), unin::ConfigError);
  c = {};
  c.mixtures = 0;
  EXPECT_THROW(pr::validate(c), unin::ConfigError);
  pr::TrainConfig t;
  EXPECT_DOUBLE_EQ(t.lr, 0.005);
  EXPECT_EQ(t.epochs, 50);
}

TEST(Config, JsonRoundTripRejectsUnknownKeys) {
  pr::ModelConfig c = unin::testing::tiny_config();
  c.uni_axis = unin::uni::ConvAxis::kColumn;
  EXPECT_EQ(pr::model_config_from_json(pr::to_json(c)), c);
  nlohmann::json doc = pr::to_json(c);
  doc["bogus"] = 1;
  try {
    pr::model_config_from_json(doc);
    FAIL() << "expected ConfigError";
  } catch (const unin::ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("bogus"), std::string::npos);
  }
}

class EndToEndGradient : public ::testing::TestWithParam<int> {};

TEST_P(EndToEndGradient, NllMatchesFiniteDifferences) {
  pr::ModelConfig c = unin::testing::tiny_config();
  switch (GetParam()) {
    case 1: c.mu_per_pair = true; break;
    case 2: c.pi_category_bias = true; c.gcn_layers = 2; break;
    case 3: c.uni_axis = unin::uni::ConvAxis::kColumn; c.k = 2; c.cv_residual = false; break;
    default: break;
  }
  const pr::SceneInputs scene = pr::prepare_scene(unin::testing::three_agent_scenario(), c);
  const std::vector<double> freq = {0.6, 0.4};
  nm::ParamSet params = pr::init_params(c, &freq);
  // Move the mean head off zero so every path carries gradient.
  nm::Rng rng(7);
  for (double& v : params.at("head.W").data()) v += rng.uniform(-0.1, 0.1);
  const pr::LossAndGrad lg = pr::loss_and_grad(params, c, scene);
  const nm::GradMap fd = nm::finite_difference_grad(
      [&](const nm::ParamSet& p) { return pr::scene_nll(p, c, scene).sum; }, params, 1e-4);
  EXPECT_LT(unin::testing::max_rel_error(lg.grads, fd), 1e-4);
}

INSTANTIATE_TEST_SUITE_P(Variants, EndToEndGradient, ::testing::Range(0, 4));

TEST(PaddingInvariance, PhantomAgentsChangeNothingReal) {
  const pr::ModelConfig c = unin::testing::tiny_config();
  const auto base_sc = unin::testing::three_agent_scenario();
  nm::ParamSet params = pr::init_params(c);
  nm::Rng rng(8);
  for (double& v : params.at("head.W").data()) v += rng.uniform(-0.2, 0.2);

  auto run = [&](const unin::trajdata::Scenario& sc, std::vector<unin::hga::StepDiagnostics>& diag, Tensor& ht) {
    const pr::SceneInputs scene = pr::prepare_scene(sc, c);
    nm::Tape tape;
    const auto bound = tape.bind(params);
    const pr::ForwardResult out = pr::forward(bound, scene, c, &diag);
    ht = out.ht.value();
    return pr::to_gmm(out, scene, static_cast<std::size_t>(c.mixtures));
  };
  std::vector<unin::hga::StepDiagnostics> d0;
  Tensor ht0;
  const pr::GMMParams g0 = run(base_sc, d0, ht0);
  const std::size_t n = base_sc.agent_count();
  for (int phantoms = 1; phantoms <= 3; ++phantoms) {
    std::vector<unin::hga::StepDiagnostics> d1;
    Tensor ht1;
    const pr::GMMParams g1 = run(with_phantoms(base_sc, phantoms), d1, ht1);
    const std::size_t m = n + static_cast<std::size_t>(phantoms);
    for (std::size_t t = 0; t < d0.size(); ++t)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) EXPECT_NEAR(d1[t].f(i, j), d0[t].f(i, j), 1e-9);
    for (std::size_t s = 0; s < g0.steps; ++s)
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t ch = 0; ch < ht0.cols(); ++ch) EXPECT_NEAR(ht1(s * m + i, ch), ht0(s * n + i, ch), 1e-9);
        for (std::size_t k = 0; k < g0.components; ++k) {
          const std::size_t a = g0.index(i, s, k), b = g1.index(i, s, k);
          EXPECT_NEAR(g1.pi[b], g0.pi[a], 1e-9);
          EXPECT_NEAR(g1.mu_x[b], g0.mu_x[a], 1e-9);
          EXPECT_NEAR(g1.mu_y[b], g0.mu_y[a], 1e-9);
          EXPECT_NEAR(g1.sigma_x[b], g0.sigma_x[a], 1e-9);
          EXPECT_NEAR(g1.sigma_y[b], g0.sigma_y[a], 1e-9);
          EXPECT_NEAR(g1.rho[b], g0.rho[a], 1e-9);
        }
      }
  }
}

TEST(Model, MixtureValidityAfterTraining) {
  const auto data = synthetic(2, 3);
  pr::ModelConfig c;
  pr::TrainConfig t;
  t.epochs = 5;
  const pr::TrainResult r = pr::train(data, {}, c, t);
  for (const auto& sc : data) EXPECT_NO_THROW(pr::predict_gmm(r.params, c, pr::prepare_scene(sc, c)).validate());
}

TEST(Model, HorizonMismatchIsConfigError) {
  pr::ModelConfig c = unin::testing::tiny_config();
  c.t_pred = 7;
  EXPECT_THROW(pr::prepare_scene(unin::testing::three_agent_scenario(), c), unin::ConfigError);
}

TEST(Training, OneScenarioDecreasesNll) {
  const auto data = synthetic(1, 21);
  pr::TrainConfig t;
  t.epochs = 200;
  const pr::TrainResult r = pr::train(data, {}, pr::ModelConfig{}, t);
  ASSERT_EQ(r.history.size(), 200u);
  EXPECT_LT(r.history.back().train_nll, r.history.front().train_nll);
  EXPECT_TRUE(std::isnan(r.history.front().val_ade));
}

TEST(Training, LearningRateScheduleInHistory) {
  pr::TrainConfig t;
  t.epochs = 11;
  const pr::TrainResult r = pr::train(synthetic(1, 2), {}, pr::ModelConfig{}, t);
  EXPECT_NEAR(r.history[10].lr, 0.2 * r.history[0].lr, 1e-18);
}

TEST(Training, SameSeedSameHistory) {
  const auto data = synthetic(3, 4);
  pr::TrainConfig t;
  t.epochs = 4;
  const pr::TrainResult a = pr::train(data, {data[0]}, pr::ModelConfig{}, t);
  const pr::TrainResult b = pr::train(data, {data[0]}, pr::ModelConfig{}, t);
  EXPECT_EQ(pr::format_history_csv(a.history), pr::format_history_csv(b.history));
  EXPECT_EQ(pr::serialize_model(a.params, {}, t), pr::serialize_model(b.params, {}, t));
  EXPECT_FALSE(std::isnan(a.history.back().val_ade));
}

TEST(Training, DivergenceNamesEpoch) {
  pr::TrainConfig t;
  t.epochs = 50;
  t.lr = 1e4;
  t.lr_decay_every = 1000;
  try {
    pr::train(synthetic(2, 5), {}, pr::ModelConfig{}, t);
    FAIL() << "expected divergence";
  } catch (const unin::NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("epoch"), std::string::npos) << e.what();
  }
}

TEST(Training, EmptyDatasetIsRejected) {
  EXPECT_THROW(pr::train({}, {}, pr::ModelConfig{}, pr::TrainConfig{}), unin::EmptyDatasetError);
}

TEST(Checkpoint, ModelRoundTripAndShapeMismatch) {
  const pr::ModelConfig c = unin::testing::tiny_config();
  const nm::ParamSet p = pr::init_params(c);
  const std::string text = pr::serialize_model(p, c, pr::TrainConfig{});
  const pr::LoadedModel m = pr::parse_model(text);
  EXPECT_EQ(m.params, p);
  EXPECT_EQ(m.model, c);
  pr::ModelConfig other = c;
  other.gcn_channels = 5;
  const std::string bad = pr::serialize_model(p, other, pr::TrainConfig{});
  EXPECT_THROW(pr::parse_model(bad), unin::CheckpointError);
}
