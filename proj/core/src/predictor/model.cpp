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

#include "unin/predictor/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "unin/errors.hpp"
#include "unin/trajdata/stc_graph.hpp"
#include "unin/uni/uni.hpp"

namespace unin::predictor {

namespace nm = unin::numerics;

namespace {

std::string mu_pair_name(std::size_t c1, std::size_t c2) {
  return "hga.mu." + std::to_string(c1) + "." + std::to_string(c2);
}

std::string uni_kernel_name(int r) { return "uni.kernel." + std::to_string(r); }
std::string gcn_weight_name(int l) { return "gcn.W." + std::to_string(l); }

const Var& param(const std::map<std::string, Var>& p, const std::string& name) {
  auto it = p.find(name);
  if (it == p.end()) throw ContractError("forward: missing parameter '" + name + "'");
  return it->second;
}

}  // namespace

SceneInputs prepare_scene(const trajdata::Scenario& sc, const ModelConfig& config) {
  trajdata::validate(sc);
  if (sc.t_obs != config.t_obs || sc.t_pred != config.t_pred) {
    throw ConfigError("scenario horizons t_obs=" + std::to_string(sc.t_obs) + " t_pred=" +
                      std::to_string(sc.t_pred) + " differ from the model's t_obs=" + std::to_string(config.t_obs) +
                      " t_pred=" + std::to_string(config.t_pred));
  }
  if (sc.category_count() != config.category_count()) {
    throw ConfigError("scenario declares " + std::to_string(sc.category_count()) + " categories, the model " +
                      std::to_string(config.category_count()));
  }
  const std::size_t n = sc.agent_count();
  const std::size_t n_cat = config.category_count();
  const auto steps = static_cast<std::size_t>(config.future_steps());
  const auto kk = static_cast<std::size_t>(config.mixtures);
  const double cs = config.coord_scale;
  const trajdata::STCGraph graph = trajdata::build_stc_graph(sc);

  SceneInputs in;
  in.agents = n;
  in.steps = steps;
  in.predictable.assign(n, false);
  std::vector<Vec2> anchor(n), velocity(n);
  std::vector<int> last(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const trajdata::AgentTrack& tr = sc.tracks[i];
    in.membership.push_back(tr.category);
    last[i] = trajdata::last_observed_frame(tr, sc.t_obs);
    if (last[i] < 0) continue;
    in.predictable[i] = true;
    anchor[i] = tr.positions[last[i]];
    if (last[i] >= 1 && tr.present[last[i] - 1]) velocity[i] = anchor[i] - tr.positions[last[i] - 1];
  }

  const std::size_t n_feat = config.node_features();
  for (int t = 0; t < sc.t_obs; ++t) {
    SceneInputs::Step step;
    std::vector<Vec2> positions(n);
    for (std::size_t i = 0; i < n; ++i) {
      positions[i] = sc.tracks[i].positions[t];
      step.present.push_back(sc.tracks[i].present[t]);
    }
    step.e = hga::distance_kernel(positions, &step.present);
    step.r = hga::laplacian_normalize(step.e);
    step.pair_mask = Tensor({n, n});
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) step.pair_mask(i, j) = step.present[i] && step.present[j] ? 1.0 : 0.0;
    step.categories =
        hga::category_inputs(graph, sc, t, static_cast<std::size_t>(config.max_members), config.coord_scale);
    step.node_features = Tensor({n, n_feat});
    for (std::size_t i = 0; i < n; ++i) {
      if (!step.present[i] || !in.predictable[i]) continue;
      const trajdata::AgentTrack& tr = sc.tracks[i];
      const Vec2 rel = (tr.positions[t] - anchor[i]) * (1.0 / cs);
      Vec2 vel{0.0, 0.0};
      if (t >= 1 && tr.present[t - 1]) vel = (tr.positions[t] - tr.positions[t - 1]) * (1.0 / cs);
      step.node_features(i, 0) = rel.x;
      step.node_features(i, 1) = rel.y;
      step.node_features(i, 2) = vel.x;
      step.node_features(i, 3) = vel.y;
      step.node_features(i, 4 + static_cast<std::size_t>(tr.category)) = 1.0;
    }
    in.observed.push_back(std::move(step));
  }

  const std::size_t rows = steps * n;
  in.category_onehot = Tensor({rows, n_cat});
  in.origin_x = Tensor({rows, kk});
  in.origin_y = Tensor({rows, kk});
  in.truth_x = Tensor({rows, kk});
  in.truth_y = Tensor({rows, kk});
  in.loss_mask = Tensor({rows, 1});
  in.truth.assign(n, std::vector<Vec2>(steps));
  in.mask.assign(n, std::vector<bool>(steps, false));
  for (std::size_t s = 0; s < steps; ++s) {
    const int frame = sc.t_obs + static_cast<int>(s);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t row = s * n + i;
      const trajdata::AgentTrack& tr = sc.tracks[i];
      in.category_onehot(row, static_cast<std::size_t>(tr.category)) = 1.0;
      Vec2 origin{0.0, 0.0};
      if (in.predictable[i]) {
        origin = anchor[i];
        if (config.cv_residual) origin = origin + velocity[i] * static_cast<double>(frame - last[i]);
      }
      const bool valid = in.predictable[i] && tr.present[frame];
      const Vec2 target = valid ? tr.positions[frame] : origin;
      in.truth[i][s] = target;
      in.mask[i][s] = valid;
      in.loss_mask(row, 0) = valid ? 1.0 : 0.0;
      for (std::size_t k = 0; k < kk; ++k) {
        in.origin_x(row, k) = origin.x;
        in.origin_y(row, k) = origin.y;
        in.truth_x(row, k) = target.x;
        in.truth_y(row, k) = target.y;
      }
    }
  }
  return in;
}

ParamSet init_params(const ModelConfig& c, const std::vector<double>* category_frequencies) {
  validate(c);
  const std::uint64_t seed = c.seed;
  const auto d_e = static_cast<std::size_t>(c.d_e);
  const auto d_a = static_cast<std::size_t>(c.d_a);
  const auto ch = static_cast<std::size_t>(c.gcn_channels);
  const auto kk = static_cast<std::size_t>(c.mixtures);
  const std::size_t n_cat = c.category_count();
  const std::size_t member_width = 2 * static_cast<std::size_t>(c.max_members);
  const std::size_t n_feat = c.node_features();

  ParamSet p;
  p.add_uniform("hga.W_e", {member_width, d_e}, member_width, seed);
  if (c.mu_per_pair) {
    for (std::size_t c1 = 0; c1 < n_cat; ++c1)
      for (std::size_t c2 = 0; c2 < n_cat; ++c2) p.add_uniform(mu_pair_name(c1, c2), {2 * d_e, d_a}, 2 * d_e, seed);
  } else {
    p.add_uniform("hga.mu", {2 * d_e, d_a}, 2 * d_e, seed);
  }
  // Attention is non-negative and UNI ends in a ReLU, so a kernel with a
  // negative response would silence the block and its gradient for good.
  // Folding the draw keeps every repeat alive at the start.
  for (int r = 0; r < c.uni_repeats; ++r) {
    p.add_uniform(uni_kernel_name(r), {1, static_cast<std::size_t>(c.k)}, static_cast<std::size_t>(c.k), seed);
    for (double& v : p.at(uni_kernel_name(r)).data()) v = std::abs(v);
  }
  p.add_uniform("gcn.W_in", {n_feat, ch}, n_feat, seed);
  p.add_uniform("gcn.b_in", {ch}, n_feat, seed);
  for (int l = 0; l < c.gcn_layers; ++l) p.add_uniform(gcn_weight_name(l), {ch, ch}, ch, seed);
  const auto tk = static_cast<std::size_t>(c.tcn_kernel);
  p.add_uniform("tcn.kernel", {1, tk}, tk, seed);
  p.add_uniform("tcn.bias", {1}, tk, seed);
  p.add_uniform("tcn.resize", {static_cast<std::size_t>(c.t_obs), static_cast<std::size_t>(c.future_steps())},
                static_cast<std::size_t>(c.t_obs), seed);
  p.add_uniform("head.W", {ch + n_cat, 6 * kk}, ch + n_cat, seed);
  p.add_uniform("head.b", {6 * kk}, ch + n_cat, seed);
  // Mean offsets start at zero so an untrained model predicts its origin.
  Tensor& head_w = p.at("head.W");
  Tensor& head_b = p.at("head.b");
  for (std::size_t col = kk; col < 3 * kk; ++col) {
    head_b[col] = 0.0;
    for (std::size_t row = 0; row < ch + n_cat; ++row) head_w(row, col) = 0.0;
  }
  if (c.pi_category_bias) {
    // Category c favours component c mod K by the log of its frequency.
    Tensor bias({n_cat, kk});
    if (category_frequencies) {
      if (category_frequencies->size() != n_cat) throw ConfigError("category frequency count differs from C");
      for (std::size_t cat = 0; cat < n_cat; ++cat)
        bias(cat, cat % kk) = std::log(std::max((*category_frequencies)[cat], 1e-3));
    }
    p.add("head.pi_bias", std::move(bias), {"category-frequency", 0.0, seed});
  }
  return p;
}

void check_param_shapes(const ParamSet& params, const ModelConfig& config) {
  const ParamSet expected = init_params(config);
  if (params.names() != expected.names()) {
    throw CheckpointError("checkpoint parameters do not match the model configuration");
  }
  for (const std::string& name : expected.names()) {
    if (params.at(name).shape() != expected.at(name).shape()) {
      throw CheckpointError("parameter '" + name + "' has shape " + nm::to_string(params.at(name).shape()) +
                            ", the configuration implies " + nm::to_string(expected.at(name).shape()));
    }
  }
}

Var gcn_forward(Var h0, Var f, const std::vector<Var>& layer_weights) {
  Var h = h0;
  for (const Var& w : layer_weights) h = nm::relu(nm::add(h, nm::matmul(f, nm::matmul(h, w))));
  return h;
}

Var tcn_forward(const std::vector<Var>& per_step, Var kernel, Var bias, Var resize) {
  if (per_step.empty()) throw ContractError("tcn_forward: no observed steps");
  if (resize.rows() != per_step.size()) {
    throw ShapeError("tcn_forward: resize " + nm::to_string(resize.shape()) + " does not accept " +
                     std::to_string(per_step.size()) + " observed steps");
  }
  const std::size_t n = per_step[0].rows();
  const std::size_t ch = per_step[0].cols();
  std::vector<Var> columns;
  for (const Var& h : per_step) {
    if (h.rows() != n || h.cols() != ch) throw ShapeError("tcn_forward: per-step features differ in shape");
    columns.push_back(nm::reshape(h, {n * ch, 1}));
  }
  // Rows are (agent, channel) series over time, so each agent only sees its
  // own history.
  Var series = nm::conv1d_same(nm::concat(columns, 1), kernel, bias);
  Var resized = nm::matmul(series, resize);
  std::vector<Var> blocks;
  for (std::size_t s = 0; s < resize.cols(); ++s)
    blocks.push_back(nm::reshape(nm::slice(resized, 1, s, s + 1), {n, ch}));
  return nm::concat(blocks, 0);
}

ForwardResult forward(const std::map<std::string, Var>& p, const SceneInputs& scene, const ModelConfig& c,
                      std::vector<hga::StepDiagnostics>* diagnostics) {
  if (scene.observed.empty()) throw ContractError("forward: scene has no observed steps");
  nm::Tape& tape = *param(p, "hga.W_e").tape();
  const std::size_t n_cat = c.category_count();

  std::vector<Var> mu_pairs;
  if (c.mu_per_pair) {
    for (std::size_t c1 = 0; c1 < n_cat; ++c1)
      for (std::size_t c2 = 0; c2 < n_cat; ++c2) mu_pairs.push_back(param(p, mu_pair_name(c1, c2)));
  }
  std::vector<Var> kernels;
  for (int r = 0; r < c.uni_repeats; ++r) kernels.push_back(param(p, uni_kernel_name(r)));
  std::vector<Var> gcn_weights;
  for (int l = 0; l < c.gcn_layers; ++l) gcn_weights.push_back(param(p, gcn_weight_name(l)));

  std::vector<Var> hidden;
  for (std::size_t t = 0; t < scene.observed.size(); ++t) {
    const SceneInputs::Step& st = scene.observed[t];
    Var h_cat = hga::embed_categories(tape.constant(st.categories.features), param(p, "hga.W_e"));
    Var scores = c.mu_per_pair ? hga::category_attention(h_cat, mu_pairs)
                               : hga::category_attention(h_cat, param(p, "hga.mu"));
    Var importance = hga::category_importance(scores);
    Var ci = hga::normalize_category_interaction(importance, st.categories.present);
    Var a_mat = nm::reshape(importance, {n_cat, n_cat});

    Var mask = tape.constant(st.pair_mask);
    Var r = tape.constant(st.r);
    Var att = nm::mul(hga::agent_attention(r, hga::expand_to_agents(a_mat, scene.membership)), mask);
    Var h_uni = uni::uni_conv(att, kernels, c.uni_axis, mask);
    Var f = uni::fuse_interaction(hga::expand_to_agents(ci, scene.membership), h_uni);

    Var h0 = nm::add_row(nm::matmul(tape.constant(st.node_features), param(p, "gcn.W_in")), param(p, "gcn.b_in"));
    hidden.push_back(gcn_forward(h0, f, gcn_weights));

    if (diagnostics) {
      diagnostics->push_back({static_cast<int>(t), st.e, st.r, scores.value(), ci.value(), att.value(),
                              h_uni.value(), f.value()});
    }
  }

  Var ht = tcn_forward(hidden, param(p, "tcn.kernel"), param(p, "tcn.bias"), param(p, "tcn.resize"));
  Var onehot = tape.constant(scene.category_onehot);
  Var raw = nm::add_row(nm::matmul(nm::concat({ht, onehot}, 1), param(p, "head.W")), param(p, "head.b"));

  const auto kk = static_cast<std::size_t>(c.mixtures);
  const double cs = c.coord_scale;
  ForwardResult out;
  out.ht = ht;
  out.logits = nm::slice(raw, 1, 0, kk);
  if (c.pi_category_bias) out.logits = nm::add(out.logits, nm::matmul(onehot, param(p, "head.pi_bias")));
  out.mu_x = nm::add(nm::scale(nm::slice(raw, 1, kk, 2 * kk), cs), tape.constant(scene.origin_x));
  out.mu_y = nm::add(nm::scale(nm::slice(raw, 1, 2 * kk, 3 * kk), cs), tape.constant(scene.origin_y));
  auto log_scale = [&](Var s) {
    if (c.sigma_floor == 0.0) return nm::add_scalar(s, std::log(cs));
    return nm::log(nm::add_scalar(nm::scale(nm::exp(s), cs), c.sigma_floor));
  };
  out.log_sx = log_scale(nm::slice(raw, 1, 3 * kk, 4 * kk));
  out.log_sy = log_scale(nm::slice(raw, 1, 4 * kk, 5 * kk));
  Var r = nm::slice(raw, 1, 5 * kk, 6 * kk);
  out.rho = nm::tanh(r);
  Var cosh2 = nm::add(nm::exp(r), nm::exp(nm::scale(r, -1.0)));
  out.one_minus_rho_sq = nm::div(tape.constant(Tensor(r.shape(), 4.0)), nm::square(cosh2));
  return out;
}

Var nll_sum(const ForwardResult& out, const SceneInputs& scene) {
  double count = 0.0;
  for (double v : scene.loss_mask.data()) count += v;
  if (count == 0.0) throw EmptyDatasetError("nll: every (agent, step) pair is masked out");

  nm::Tape& tape = *out.logits.tape();
  const std::size_t kk = out.logits.cols();
  Var dx = nm::div(nm::sub(tape.constant(scene.truth_x), out.mu_x), nm::exp(out.log_sx));
  Var dy = nm::div(nm::sub(tape.constant(scene.truth_y), out.mu_y), nm::exp(out.log_sy));
  Var one_m = out.one_minus_rho_sq;
  Var q = nm::sub(nm::add(nm::square(dx), nm::square(dy)), nm::scale(nm::mul(out.rho, nm::mul(dx, dy)), 2.0));
  Var log_norm = nm::add_scalar(
      nm::scale(nm::add(nm::add(out.log_sx, out.log_sy),
                        nm::add(nm::scale(nm::log(one_m), 0.5), nm::scale(nm::div(q, one_m), 0.5))),
                -1.0),
      -std::log(2.0 * std::numbers::pi));
  Var ones = tape.constant(Tensor({1, kk}, 1.0));
  Var log_pi = nm::sub(out.logits, nm::matmul(nm::logsumexp(out.logits, 1), ones));
  Var per_row = nm::logsumexp(nm::add(log_pi, log_norm), 1);
  return nm::scale(nm::sum(nm::mul(per_row, tape.constant(scene.loss_mask))), -1.0);
}

GMMParams to_gmm(const ForwardResult& out, const SceneInputs& scene, std::size_t components) {
  const std::size_t n = scene.agents;
  GMMParams g(n, scene.steps, components);
  const Tensor pi = nm::eval::softmax(out.logits.value(), 1);
  for (std::size_t s = 0; s < scene.steps; ++s) {
    for (std::size_t a = 0; a < n; ++a) {
      const std::size_t row = s * n + a;
      for (std::size_t k = 0; k < components; ++k) {
        const std::size_t i = g.index(a, s, k);
        g.pi[i] = pi(row, k);
        g.mu_x[i] = out.mu_x.value()(row, k);
        g.mu_y[i] = out.mu_y.value()(row, k);
        g.sigma_x[i] = std::exp(out.log_sx.value()(row, k));
        g.sigma_y[i] = std::exp(out.log_sy.value()(row, k));
        g.rho[i] = out.rho.value()(row, k);
      }
    }
  }
  return g;
}

GMMParams predict_gmm(const ParamSet& params, const ModelConfig& config, const SceneInputs& scene,
                      std::vector<hga::StepDiagnostics>* diagnostics) {
  nm::Tape tape;
  const auto bound = tape.bind(params);
  return to_gmm(forward(bound, scene, config, diagnostics), scene, static_cast<std::size_t>(config.mixtures));
}

LossAndGrad loss_and_grad(const ParamSet& params, const ModelConfig& config, const SceneInputs& scene) {
  nm::Tape tape;
  const auto bound = tape.bind(params);
  Var loss = nll_sum(forward(bound, scene, config), scene);
  LossAndGrad out;
  out.nll.sum = loss.item();
  for (double v : scene.loss_mask.data()) out.nll.count += v > 0.0 ? 1 : 0;
  out.grads = tape.backward(loss);
  return out;
}

NllResult scene_nll(const ParamSet& params, const ModelConfig& config, const SceneInputs& scene) {
  nm::Tape tape;
  const auto bound = tape.bind(params);
  NllResult out;
  out.sum = nll_sum(forward(bound, scene, config), scene).item();
  for (double v : scene.loss_mask.data()) out.count += v > 0.0 ? 1 : 0;
  return out;
}

}  // namespace unin::predictor
