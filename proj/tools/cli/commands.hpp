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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace unin::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfig = 2,
  kNumeric = 3,
  kIo = 4,
};

struct GenerateOptions {
  std::filesystem::path out;
  std::uint64_t seed = 0;
  int scenarios = 10;
  int t_obs = 4;
  int t_pred = 10;
  double frame_dt = 0.5;
  std::vector<std::string> motifs;  // empty keeps the generator default
};

struct TrainOptions {
  std::optional<std::filesystem::path> data;
  std::optional<std::filesystem::path> config;
  std::optional<std::filesystem::path> out;
  std::optional<int> epochs;
  std::optional<std::uint64_t> seed;
};

struct EvalOptions {
  std::filesystem::path model;
  std::filesystem::path data;
  std::size_t best_of = 0;
  std::optional<std::string> weights;
  bool baseline = false;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> out;
};

struct PredictOptions {
  std::filesystem::path model;
  std::filesystem::path scenario;
  std::size_t samples = 20;
  std::filesystem::path svg;
  std::optional<std::filesystem::path> csv;  // defaults to the SVG path with a .csv extension
  std::optional<std::filesystem::path> hga_dump;
  std::uint64_t seed = 0;
};

struct AblateOptions {
  std::string kernels = "1,2,3,5,10";
  std::filesystem::path data;
  std::optional<std::filesystem::path> config;
  std::optional<int> epochs;
  std::filesystem::path out;
  bool parallel = false;
};

// Each command throws library errors; run() maps them to exit codes.
void cmd_generate(const GenerateOptions& options, std::ostream& log);
void cmd_train(const TrainOptions& options, std::ostream& log);
void cmd_eval(const EvalOptions& options, std::ostream& log);
void cmd_predict(const PredictOptions& options, std::ostream& log);
void cmd_ablate(const AblateOptions& options, std::ostream& log);

/// Parses `args` (without the program name) and runs the chosen command.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Writes to a sibling temporary file and renames it over `path`, creating
/// parent directories. Throws IoError.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Throws IoError when the file cannot be read.
std::string read_file(const std::filesystem::path& path);

}  // namespace unin::cli
