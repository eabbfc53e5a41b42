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

#include "run_config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "unin/errors.hpp"

namespace unin::cli {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_commas(std::string_view text) {
  std::vector<std::string> out;
  if (trim(text).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    out.emplace_back(trim(text.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || value.empty()) {
    throw ConfigError(fmt::format("config key '{}': cannot parse '{}'", key, value));
  }
  return out;
}

// Converts text to the JSON type of the key's default value.
nlohmann::json typed_value(std::string_view key, std::string_view value, const nlohmann::json& like) {
  if (like.is_boolean()) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ConfigError(fmt::format("config key '{}': expected true or false, got '{}'", key, value));
  }
  if (like.is_number_unsigned()) return parse_number<std::uint64_t>(key, value);
  if (like.is_number_integer()) return parse_number<std::int64_t>(key, value);
  if (like.is_number_float()) return parse_number<double>(key, value);
  if (like.is_array()) return split_commas(value);
  return std::string(value);
}

std::string render(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + render(v[i]);
    return out;
  }
  return v.dump();
}

std::string join_numbers(const auto& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += fmt::format("{}{}", i ? "," : "", values[i]);
  return out;
}

}  // namespace

trajdata::WindowOptions RunConfig::window() const {
  return {model.t_obs, model.t_pred, model.frame_dt, stride};
}

std::optional<metrics::CategoryWeights> RunConfig::category_weights() const {
  if (!weights.empty()) return weights_for(model.categories, weights);
  if (model.categories == trajdata::default_categories()) return metrics::default_category_weights();
  return std::nullopt;
}

std::vector<double> parse_number_list(std::string_view text, std::string_view what) {
  std::vector<double> out;
  for (const std::string& item : split_commas(text)) out.push_back(parse_number<double>(what, item));
  return out;
}

metrics::CategoryWeights weights_for(const std::vector<std::string>& categories, const std::vector<double>& weights) {
  if (weights.size() != categories.size()) {
    throw ConfigError(fmt::format("expected {} category weights, got {}", categories.size(), weights.size()));
  }
  metrics::CategoryWeights out;
  for (std::size_t c = 0; c < categories.size(); ++c) {
    if (!(weights[c] >= 0.0)) throw ConfigError("category weights must be non-negative");
    out[categories[c]] = weights[c];
  }
  return out;
}

RunConfig parse_run_config(std::string_view text, std::vector<std::string>* warnings) {
  nlohmann::json model = predictor::to_json(predictor::ModelConfig{});
  nlohmann::json train = predictor::to_json(predictor::TrainConfig{});
  RunConfig out;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(fmt::format("config line {}: expected key = value", line_no));
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) throw ConfigError(fmt::format("config key '{}' given twice", key));
    if (model.contains(key)) {
      model[key] = typed_value(key, value, model[key]);
    } else if (train.contains(key)) {
      train[key] = typed_value(key, value, train[key]);
    } else if (key == "data") {
      out.data = value;
    } else if (key == "out") {
      out.out = value;
    } else if (key == "stride") {
      out.stride = parse_number<int>(key, value);
      if (out.stride < 0) throw ConfigError("config key 'stride' must be non-negative");
    } else if (key == "split") {
      const std::vector<double> r = parse_number_list(value, key);
      if (r.size() != 3) throw ConfigError("config key 'split' needs three ratios");
      out.split = {r[0], r[1], r[2]};
    } else if (key == "weights") {
      out.weights = parse_number_list(value, key);
    } else {
      throw ConfigError(fmt::format("unknown config key '{}'", key));
    }
  }
  out.model = predictor::model_config_from_json(model);
  out.train = predictor::train_config_from_json(train);
  std::vector<std::string> w = predictor::validate(out.model);
  predictor::validate(out.train);
  if (!out.weights.empty()) weights_for(out.model.categories, out.weights);
  if (warnings) *warnings = std::move(w);
  return out;
}

RunConfig load_run_config(const std::filesystem::path& path, std::vector<std::string>* warnings) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str(), warnings);
}

std::string format_run_config(const RunConfig& config) {
  std::map<std::string, std::string> lines;
  const nlohmann::json model = predictor::to_json(config.model);
  const nlohmann::json train = predictor::to_json(config.train);
  for (const auto& [key, value] : model.items()) lines[key] = render(value);
  for (const auto& [key, value] : train.items()) lines[key] = render(value);
  lines["data"] = config.data;
  lines["out"] = config.out;
  lines["stride"] = std::to_string(config.stride);
  lines["split"] = join_numbers(config.split);
  if (!config.weights.empty()) lines["weights"] = join_numbers(config.weights);
  std::string out;
  for (const auto& [key, value] : lines) out += value.empty() ? key + " =\n" : key + " = " + value + "\n";
  return out;
}

}  // namespace unin::cli
