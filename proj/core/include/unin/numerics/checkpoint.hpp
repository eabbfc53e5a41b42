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

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "unin/numerics/params.hpp"

namespace unin::numerics {

inline constexpr int kCheckpointFormatVersion = 1;

struct Checkpoint {
  int format_version = kCheckpointFormatVersion;
  nlohmann::json config;
  ParamSet params;
};

/// Formats with 17 significant digits, which round-trips every double.
std::string format_double17(double value);

/// {"format_version", "config", "params": {name: {"shape", "values"}}}.
/// Output bytes depend only on the inputs.
std::string serialize_checkpoint(const ParamSet& params, const nlohmann::json& config);

/// Throws CheckpointError on malformed content.
Checkpoint parse_checkpoint(std::string_view text);

}  // namespace unin::numerics
