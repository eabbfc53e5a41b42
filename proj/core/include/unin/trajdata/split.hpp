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

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "unin/numerics/random.hpp"

namespace unin::trajdata {

struct SplitSizes {
  std::size_t train = 0;
  std::size_t val = 0;
  std::size_t test = 0;
};

/// floor(n * ratio) for validation and test, the remainder to train. Throws
/// SplitError when ratios are negative, do not sum to 1 within 1e-9, the
/// input is empty, or there are fewer items than partitions with a positive
/// ratio.
SplitSizes split_sizes(std::size_t n, const std::array<double, 3>& ratios);

/// Seeded Fisher-Yates permutation of 0..n-1.
std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed);

template <typename T>
struct Split {
  std::vector<T> train;
  std::vector<T> val;
  std::vector<T> test;
};

template <typename T>
Split<T> split_dataset(const std::vector<T>& items, const std::array<double, 3>& ratios,
                       std::uint64_t seed) {
  const SplitSizes sizes = split_sizes(items.size(), ratios);
  const std::vector<std::size_t> order = shuffled_indices(items.size(), seed);
  Split<T> out;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const T& item = items[order[k]];
    if (k < sizes.train) out.train.push_back(item);
    else if (k < sizes.train + sizes.val) out.val.push_back(item);
    else out.test.push_back(item);
  }
  return out;
}

}  // namespace unin::trajdata
