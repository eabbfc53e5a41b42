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

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "unin/trajdata/scenario.hpp"

namespace unin::trajdata {

// Trajectory CSV: rows `frame_id,agent_id,category_id,x,y`, frame_id
// ascending, optional `#` comment lines. A comment of the form
// `# categories: name0,name1,...` declares the category table.

struct WindowOptions {
  int t_obs = 4;
  int t_pred = 10;
  double frame_dt = 0.5;
  /// Frames between window starts; 0 means t_pred (non-overlapping).
  int stride = 0;
};

/// Cuts the recording into windows of t_pred consecutive distinct frames.
/// Agents present in fewer than t_obs observed frames of a window are
/// dropped. Throws ParseError (with line number) on malformed rows and
/// EmptyDatasetError when no window yields a scenario.
std::vector<Scenario> parse_csv(std::string_view text, const WindowOptions& options);

std::vector<Scenario> load_csv(const std::filesystem::path& path, const WindowOptions& options);

/// Every `*.csv` under `dir` in file-name order, concatenated.
std::vector<Scenario> load_csv_dir(const std::filesystem::path& dir, const WindowOptions& options);

/// Writes one scenario with frame ids 0..t_pred-1; only present frames are
/// emitted.
std::string format_csv(const Scenario& scenario);

}  // namespace unin::trajdata
