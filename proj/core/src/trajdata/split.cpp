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

#include "unin/trajdata/split.hpp"

#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "unin/errors.hpp"

namespace unin::trajdata {

SplitSizes split_sizes(std::size_t n, const std::array<double, 3>& ratios) {
  if (n == 0) throw SplitError("cannot split an empty dataset");
  double total = 0.0;
  std::size_t positive = 0;
  for (double r : ratios) {
    if (!(r >= 0.0)) throw SplitError("split ratios must be non-negative");
    total += r;
    if (r > 0.0) ++positive;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw SplitError("split ratios must sum to 1, got " + std::to_string(total));
  }
  if (n < positive) {
    throw SplitError(std::to_string(n) + " items cannot fill " + std::to_string(positive) +
                     " non-empty partitions");
  }
  // The epsilon absorbs representation error such as 10 * 0.6 = 5.999...
  auto floor_share = [n](double r) {
    return static_cast<std::size_t>(std::floor(static_cast<double>(n) * r + 1e-9));
  };
  SplitSizes s;
  s.val = floor_share(ratios[1]);
  s.test = floor_share(ratios[2]);
  s.train = n - s.val - s.test;
  return s;
}

std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  numerics::Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

}  // namespace unin::trajdata
