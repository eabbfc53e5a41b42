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
#include <vector>

#include "unin/predictor/gmm.hpp"
#include "unin/trajdata/scenario.hpp"

namespace unin::cli {

struct SvgOptions {
  double width = 800.0;
  double height = 800.0;
  double margin = 0.05;  // fraction of the viewport on every side
};

/// Three layers: `observed` and `truth` hold one polyline per predicted
/// agent, `samples` one circle per sampled future point, colored from blue
/// (sparse) to red (dense) by the number of nearby samples of the same agent.
std::string render_svg(const trajdata::Scenario& scenario, const std::vector<bool>& predicted,
                       const predictor::SampleSet& samples, const SvgOptions& options = {});

}  // namespace unin::cli
