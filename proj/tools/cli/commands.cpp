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

#include "commands.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <nlohmann/json.hpp>

#include "run_config.hpp"
#include "svg.hpp"
#include "unin/errors.hpp"
#include "unin/hga/hga.hpp"
#include "unin/metrics/evaluation.hpp"
#include "unin/predictor/model.hpp"
#include "unin/predictor/train.hpp"
#include "unin/trajdata/split.hpp"
#include "unin/trajdata/synthetic.hpp"

namespace unin::cli {
namespace fs = std::filesystem;

void write_file_atomic(const fs::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError(fmt::format("cannot create directory {}: {}", path.parent_path().string(), ec.message()));
  }
  const fs::path tmp = fs::path(path.string() + ".tmp");
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write " + tmp.string());
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw IoError("short write to " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) throw IoError(fmt::format("cannot move {} into place: {}", tmp.string(), ec.message()));
}

std::string read_file(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read " + path.string());
  std::ostringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

namespace {

std::vector<trajdata::Scenario> load_data(const fs::path& dir, const trajdata::WindowOptions& window) {
  if (!fs::is_directory(dir)) throw IoError("data directory not found: " + dir.string());
  return trajdata::load_csv_dir(dir, window);
}

predictor::LoadedModel load_model(const fs::path& path) { return predictor::parse_model(read_file(path)); }

trajdata::WindowOptions window_of(const predictor::ModelConfig& m) { return {m.t_obs, m.t_pred, m.frame_dt, 0}; }

trajdata::Scenario load_scenario(const fs::path& path, const predictor::ModelConfig& model) {
  if (path.extension() == ".json") {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(e.what(), 0);
    }
    return trajdata::scenario_from_json(doc);
  }
  return trajdata::load_csv(path, window_of(model)).front();
}

}  // namespace

void cmd_generate(const GenerateOptions& o, std::ostream& log) {
  trajdata::GeneratorConfig g;
  g.num_scenarios = o.scenarios;
  g.seed = o.seed;
  g.t_obs = o.t_obs;
  g.t_pred = o.t_pred;
  g.frame_dt = o.frame_dt;
  if (!o.motifs.empty()) {
    g.motifs.clear();
    for (const std::string& m : o.motifs) g.motifs.push_back(trajdata::parse_motif(m));
  }
  const auto scenarios = trajdata::generate_synthetic_annotated(g);

  nlohmann::json files = nlohmann::json::array();
  std::size_t agents = 0;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const std::string name = fmt::format("scenario_{:04d}.csv", i);
    write_file_atomic(o.out / name, trajdata::format_csv(scenarios[i].scenario));
    nlohmann::json motifs = nlohmann::json::array();
    for (const auto& m : scenarios[i].motifs) {
      motifs.push_back({{"kind", std::string(trajdata::motif_name(m.kind))}, {"agent_ids", m.agent_ids}});
    }
    files.push_back({{"file", name}, {"agents", scenarios[i].scenario.agent_count()}, {"motifs", motifs}});
    agents += scenarios[i].scenario.agent_count();
  }
  nlohmann::json motif_names = nlohmann::json::array();
  for (const auto m : g.motifs) motif_names.push_back(std::string(trajdata::motif_name(m)));
  const nlohmann::json manifest = {
      {"generator",
       {{"categories", g.categories},
        {"agents_per_category", g.agents_per_category},
        {"motifs", motif_names},
        {"t_obs", g.t_obs},
        {"t_pred", g.t_pred},
        {"frame_dt", g.frame_dt},
        {"substeps", g.substeps}}},
      {"seed", g.seed},
      {"scenario_count", scenarios.size()},
      {"agent_count", agents},
      {"scenarios", files}};
  write_file_atomic(o.out / "manifest.json", manifest.dump(2) + "\n");
  fmt::print(log, "wrote {} scenarios ({} agents) to {}\n", scenarios.size(), agents, o.out.string());
}

void cmd_train(const TrainOptions& o, std::ostream& log) {
  std::vector<std::string> warnings;
  RunConfig rc = o.config ? load_run_config(*o.config, &warnings) : parse_run_config("", &warnings);
  if (o.data) rc.data = o.data->string();
  if (o.out) rc.out = o.out->string();
  if (o.epochs) rc.train.epochs = *o.epochs;
  if (o.seed) rc.model.seed = *o.seed;
  if (rc.data.empty()) throw ConfigError("train needs a data directory (--data or config key 'data')");
  if (rc.out.empty()) throw ConfigError("train needs an output directory (--out or config key 'out')");
  predictor::validate(rc.train);
  for (const auto& w : warnings) fmt::print(log, "warning: {}\n", w);

  const auto data = load_data(rc.data, rc.window());
  const auto split = trajdata::split_dataset(data, rc.split, rc.model.seed);
  fmt::print(log, "{} scenarios: {} train, {} val, {} test\n", data.size(), split.train.size(), split.val.size(),
             split.test.size());
  const auto result = predictor::train(split.train, split.val, rc.model, rc.train, [&](const predictor::EpochRecord& r) {
    fmt::print(log, "epoch {:4d} lr {:.3g} nll {:.4f} val_ade {:.4f} val_fde {:.4f}\n", r.epoch, r.lr, r.train_nll,
               r.val_ade, r.val_fde);
  });
  for (const auto& w : result.warnings) fmt::print(log, "warning: {}\n", w);
  const fs::path out(rc.out);
  write_file_atomic(out / "checkpoint.json", predictor::serialize_model(result.params, rc.model, rc.train));
  write_file_atomic(out / "history.csv", predictor::format_history_csv(result.history));
  write_file_atomic(out / "resolved_config.txt", format_run_config(rc));
  fmt::print(log, "wrote checkpoint.json, history.csv, resolved_config.txt to {}\n", out.string());
}

void cmd_eval(const EvalOptions& o, std::ostream& log) {
  const predictor::LoadedModel m = load_model(o.model);
  const auto data = load_data(o.data, window_of(m.model));
  metrics::EvalOptions eo;
  eo.best_of = o.best_of;
  eo.seed = o.seed;
  if (o.weights) {
    eo.weights = weights_for(m.model.categories, parse_number_list(*o.weights, "--weights"));
  } else if (m.model.categories == trajdata::default_categories()) {
    eo.weights = metrics::default_category_weights();
  }
  nlohmann::json report = metrics::to_json(metrics::evaluate_model(m.params, m.model, data, eo));
  if (o.baseline) {
    report = {{"model", report}, {"baseline", metrics::to_json(metrics::evaluate_baseline(data, m.model.categories, eo))}};
  }
  const std::string text = report.dump(2) + "\n";
  log << text;
  if (o.out) write_file_atomic(*o.out / "report.json", text);
}

void cmd_predict(const PredictOptions& o, std::ostream& log) {
  const predictor::LoadedModel m = load_model(o.model);
  const trajdata::Scenario sc = load_scenario(o.scenario, m.model);
  if (sc.tracks.empty()) throw EmptyDatasetError("scenario has no agents");
  const predictor::SceneInputs scene = predictor::prepare_scene(sc, m.model);
  std::vector<hga::StepDiagnostics> diag;
  const predictor::GMMParams gmm = predictor::predict_gmm(m.params, m.model, scene, &diag);
  const predictor::SampleSet samples =
      o.samples > 0 ? predictor::sample_trajectories(gmm, o.samples, o.seed) : predictor::SampleSet{};

  std::string csv = "agent_id,step,sample,x,y\n";
  std::size_t rows = 0;
  for (std::size_t a = 0; a < scene.agents; ++a) {
    if (!scene.predictable[a]) continue;
    for (std::size_t s = 0; s < scene.steps; ++s)
      for (std::size_t k = 0; k < samples.size(); ++k, ++rows) {
        csv += fmt::format("{},{},{},{},{}\n", sc.tracks[a].agent_id, s, k, samples[k][a][s].x, samples[k][a][s].y);
      }
  }
  write_file_atomic(o.svg, render_svg(sc, scene.predictable, samples));
  const fs::path csv_path = o.csv ? *o.csv : fs::path(o.svg).replace_extension(".csv");
  write_file_atomic(csv_path, csv);
  if (o.hga_dump) write_file_atomic(*o.hga_dump, hga::to_json(diag).dump(2) + "\n");
  fmt::print(log, "wrote {} and {} ({} rows)\n", o.svg.string(), csv_path.string(), rows);
}

void cmd_ablate(const AblateOptions& o, std::ostream& log) {
  std::vector<std::string> warnings;
  RunConfig rc = o.config ? load_run_config(*o.config, &warnings) : parse_run_config("", &warnings);
  if (o.epochs) rc.train.epochs = *o.epochs;
  predictor::validate(rc.train);
  std::vector<int> kernels;
  for (double k : parse_number_list(o.kernels, "--kernels")) {
    if (k != static_cast<int>(k)) throw ConfigError(fmt::format("--kernels: {} is not an integer", k));
    kernels.push_back(static_cast<int>(k));
  }
  const auto data = load_data(o.data, rc.window());
  const auto split = trajdata::split_dataset(data, rc.split, rc.model.seed);
  // Kernels are compared on held-out scenarios when the split leaves any.
  const auto& scored = split.val.empty() ? split.train : split.val;
  const metrics::AblationResult r = metrics::ablation_run(split.train, scored, rc.model, rc.train, kernels, o.parallel);
  const std::string csv = metrics::format_ablation_csv(r);
  const auto best = std::find_if(r.rows.begin(), r.rows.end(), [&](const auto& row) { return row.kernel == r.best_kernel; });
  const std::string summary =
      fmt::format("best kernel k={} ade={:.6f} fde={:.6f} over {} kernels\n", best->kernel, best->ade, best->fde, r.rows.size());
  write_file_atomic(o.out / "ablation.csv", csv);
  write_file_atomic(o.out / "summary.txt", summary);
  log << csv << summary;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Heterogeneous multi-agent trajectory prediction"};
  app.require_subcommand(1);

  GenerateOptions gen;
  auto* g = app.add_subcommand("generate", "Write synthetic trajectory CSVs and a manifest");
  g->add_option("--out", gen.out, "Output directory")->required();
  g->add_option("--seed", gen.seed, "Generator seed");
  g->add_option("--scenarios", gen.scenarios, "Number of scenarios");
  g->add_option("--t-obs", gen.t_obs, "Observed frames");
  g->add_option("--t-pred", gen.t_pred, "Total frames per scenario");
  g->add_option("--frame-dt", gen.frame_dt, "Seconds between frames");
  g->add_option("--motifs", gen.motifs, "Motifs per scenario (turning,parallel,avoidance,group)")->delimiter(',');

  TrainOptions tr;
  auto* t = app.add_subcommand("train", "Train a model and write checkpoint, history and resolved config");
  t->add_option("--data", tr.data, "Directory of trajectory CSVs");
  t->add_option("--config", tr.config, "key = value run configuration");
  t->add_option("--out", tr.out, "Output directory");
  t->add_option("--epochs", tr.epochs, "Override the epoch count");
  t->add_option("--seed", tr.seed, "Override the model seed");

  EvalOptions ev;
  auto* e = app.add_subcommand("eval", "Score a checkpoint on a dataset");
  e->add_option("--model", ev.model, "Checkpoint file")->required();
  e->add_option("--data", ev.data, "Directory of trajectory CSVs")->required();
  e->add_option("--best-of", ev.best_of, "Best-of-K sampling protocol; 0 is deterministic");
  e->add_option("--weights", ev.weights, "Category weights in model category order, comma separated");
  e->add_flag("--baseline", ev.baseline, "Also report the constant-velocity baseline");
  e->add_option("--seed", ev.seed, "Sampling seed");
  e->add_option("--out", ev.out, "Directory for report.json");

  PredictOptions pr;
  auto* p = app.add_subcommand("predict", "Sample futures for one scenario and draw them");
  p->add_option("--model", pr.model, "Checkpoint file")->required();
  p->add_option("--scenario", pr.scenario, "Scenario CSV or JSON")->required();
  p->add_option("--samples", pr.samples, "Samples per agent");
  p->add_option("--svg", pr.svg, "SVG output path")->required();
  p->add_option("--csv", pr.csv, "Predictions CSV path");
  p->add_option("--hga-dump", pr.hga_dump, "Write per-step attention diagnostics as JSON");
  p->add_option("--seed", pr.seed, "Sampling seed");

  AblateOptions ab;
  auto* a = app.add_subcommand("ablate", "Compare UNI kernel sizes");
  a->add_option("--kernels", ab.kernels, "Comma-separated kernel sizes");
  a->add_option("--data", ab.data, "Directory of trajectory CSVs")->required();
  a->add_option("--config", ab.config, "key = value run configuration");
  a->add_option("--epochs", ab.epochs, "Override the epoch count");
  a->add_option("--out", ab.out, "Output directory")->required();
  a->add_flag("--parallel", ab.parallel, "Train kernels on separate threads");

  std::vector<std::string> storage = {"unin"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (std::string& s : storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*g) cmd_generate(gen, out);
    else if (*t) cmd_train(tr, out);
    else if (*e) cmd_eval(ev, out);
    else if (*p) cmd_predict(pr, out);
    else if (*a) cmd_ablate(ab, out);
    return kOk;
  } catch (const ConfigError& ex) {
    fmt::print(err, "config error: {}\n", ex.what());
    return kConfig;
  } catch (const NumericError& ex) {
    fmt::print(err, "numeric failure: {}\n", ex.what());
    return kNumeric;
  } catch (const IoError& ex) {
    fmt::print(err, "i/o error: {}\n", ex.what());
    return kIo;
  } catch (const unin::ParseError& ex) {
    fmt::print(err, "parse error: {}\n", ex.what());
    return kIo;
  } catch (const CheckpointError& ex) {
    fmt::print(err, "checkpoint error: {}\n", ex.what());
    return kIo;
  } catch (const std::exception& ex) {
    fmt::print(err, "error: {}\n", ex.what());
    return kFailure;
  }
}

}  // namespace unin::cli
