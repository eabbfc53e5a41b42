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

#include "unin/numerics/checkpoint.hpp"

#include <cstdio>

#include "unin/errors.hpp"

namespace unin::numerics {

std::string format_double17(double value) {
  char buf[40];
  const int n = std::snprintf(buf, sizeof(buf), "%.17g", value);
  return std::string(buf, static_cast<std::size_t>(n));
}

std::string serialize_checkpoint(const ParamSet& params, const nlohmann::json& config) {
  std::string out;
  out += "{\n  \"format_version\": " + std::to_string(kCheckpointFormatVersion) + ",\n";
  out += "  \"config\": " + config.dump() + ",\n";
  out += "  \"params\": {";
  bool first = true;
  for (const auto& [name, tensor] : params.tensors()) {
    out += first ? "\n" : ",\n";
    first = false;
    out += "    " + nlohmann::json(name).dump() + ": {\"shape\": [";
    for (std::size_t i = 0; i < tensor.shape().size(); ++i) {
      if (i > 0) out += ", ";
      out += std::to_string(tensor.shape()[i]);
    }
    out += "], \"values\": [";
    for (std::size_t i = 0; i < tensor.numel(); ++i) {
      if (i > 0) out += ", ";
      out += format_double17(tensor[i]);
    }
    out += "]}";
  }
  out += "\n  }\n}\n";
  return out;
}

Checkpoint parse_checkpoint(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("checkpoint is not valid JSON: ") + e.what());
  }
  Checkpoint ckpt;
  try {
    ckpt.format_version = doc.at("format_version").get<int>();
    if (ckpt.format_version != kCheckpointFormatVersion) {
      throw CheckpointError("unsupported checkpoint format_version " +
                            std::to_string(ckpt.format_version));
    }
    ckpt.config = doc.at("config");
    for (const auto& [name, entry] : doc.at("params").items()) {
      Shape shape = entry.at("shape").get<Shape>();
      std::vector<double> values = entry.at("values").get<std::vector<double>>();
      try {
        ckpt.params.add(name, Tensor(std::move(shape), std::move(values)));
      } catch (const ShapeError& e) {
        throw CheckpointError("parameter '" + name + "': " + e.what());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("malformed checkpoint: ") + e.what());
  }
  return ckpt;
}

}  // namespace unin::numerics
