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

#include <cstdlib>
#include <vector>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "unin/errors.hpp"
#include "unin/uni/uni.hpp"

namespace uni = unin::uni;
namespace nm = unin::numerics;
using nm::Tensor;
using unin::testing::random_tensor;

TEST(UniConv, IdentityKernelOnNonNegativeInput) {
  nm::Rng rng(1);
  const Tensor att = random_tensor({4, 4}, rng, 0.0, 1.0);
  EXPECT_EQ(uni::uni_conv(att, {Tensor::vector({0, 1, 0})}), att);
}

TEST(UniConv, ZeroRowStaysZero) {
  nm::Rng rng(2);
  Tensor att = random_tensor({5, 5}, rng, 0.0, 1.0);
  for (std::size_t j = 0; j < 5; ++j) att(1, j) = 0.0;
  const Tensor h = uni::uni_conv(att, {random_tensor({3}, rng), random_tensor({3}, rng)});
  for (std::size_t j = 0; j < 5; ++j) EXPECT_EQ(h(1, j), 0.0);
}

TEST(UniConv, HandConvolution) {
  const Tensor h = uni::uni_conv(Tensor::matrix({{1, 2, 3}, {0, 0, 0}, {0, 0, 0}}), {Tensor::vector({1, 1, 1})});
  EXPECT_EQ(h, Tensor::matrix({{3, 6, 5}, {0, 0, 0}, {0, 0, 0}}));
}

TEST(UniConv, ReluClipsNegativeResponses) {
  const Tensor h = uni::uni_conv(Tensor::matrix({{1, 2, 3}, {4, 5, 6}, {7, 8, 9}}), {Tensor::vector({0, -1, 0})});
  for (double v : h.data()) EXPECT_EQ(v, 0.0);
}

TEST(UniConv, ColumnAxisIsTransposedRowAxis) {
  nm::Rng rng(3);
  const Tensor att = random_tensor({4, 4}, rng);
  const std::vector<Tensor> kernels = {random_tensor({3}, rng), random_tensor({3}, rng)};
  Tensor att_t({4, 4});
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) att_t(j, i) = att(i, j);
  const Tensor col = uni::uni_conv(att, kernels, uni::ConvAxis::kColumn);
  const Tensor row = uni::uni_conv(att_t, kernels, uni::ConvAxis::kRow);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_DOUBLE_EQ(col(i, j), row(j, i));
}

TEST(UniConv, ShapePreservedOnAblationGrid) {
  nm::Rng rng(4);
  for (std::size_t k : {1u, 2u, 3u, 5u, 10u}) {
    const Tensor att = random_tensor({6, 6}, rng, 0.0, 1.0);
    EXPECT_EQ(uni::uni_conv(att, {random_tensor({k}, rng), random_tensor({k}, rng)}).shape(), att.shape());
  }
}

TEST(UniConv, RowLocality) {
  nm::Rng rng(5);
  const std::size_t n = 12, k = 3, repeats = 2;
  const std::size_t reach = repeats * (k - 1) / 2;
  std::vector<Tensor> kernels;
  for (std::size_t r = 0; r < repeats; ++r) kernels.push_back(random_tensor({k}, rng, 0.1, 1.0));
  const Tensor att = random_tensor({n, n}, rng, 0.0, 1.0);
  const Tensor base = uni::uni_conv(att, kernels);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t i = rng.below(n), j = rng.below(n);
    Tensor moved = att;
    moved(i, j) += 5.0;
    const Tensor h = uni::uni_conv(moved, kernels);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) {
        const bool inside = r == i && static_cast<std::size_t>(std::abs(static_cast<long>(c) - static_cast<long>(j))) <= reach;
        if (!inside) EXPECT_EQ(h(r, c), base(r, c)) << "(" << r << "," << c << ") after touching (" << i << "," << j << ")";
      }
  }
}

TEST(UniConv, MaskKeepsPhantomsZero) {
  nm::Rng rng(6);
  const Tensor real = random_tensor({3, 3}, rng, 0.0, 1.0);
  Tensor padded({5, 5});
  Tensor mask({5, 5});
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      padded(i, j) = real(i, j);
      mask(i, j) = 1.0;
    }
  nm::ParamSet p;
  p.add("k0", random_tensor({1, 3}, rng));
  p.add("k1", random_tensor({1, 3}, rng));
  nm::Tape tape;
  const auto v = tape.bind(p);
  const Tensor h_pad = uni::uni_conv(tape.constant(padded), {v.at("k0"), v.at("k1")}, uni::ConvAxis::kRow,
                                     tape.constant(mask)).value();
  const Tensor h_real = uni::uni_conv(real, {p.at("k0").reshaped({3}), p.at("k1").reshaped({3})});
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) {
      if (i < 3 && j < 3) EXPECT_NEAR(h_pad(i, j), h_real(i, j), 1e-12);
      else EXPECT_EQ(h_pad(i, j), 0.0);
    }
}

TEST(UniConv, WideKernelWarning) {
  EXPECT_FALSE(uni::kernel_width_warning(3, 2).has_value());
  EXPECT_FALSE(uni::kernel_width_warning(4, 2).has_value());
  EXPECT_TRUE(uni::kernel_width_warning(5, 2).has_value());
}

TEST(UniConv, Gradients) {
  nm::Rng rng(7);
  nm::ParamSet p;
  p.add("att", random_tensor({4, 4}, rng, 0.05, 1.0));
  p.add("k0", random_tensor({1, 3}, rng, 0.1, 1.0));
  p.add("k1", random_tensor({1, 2}, rng, 0.1, 1.0));
  p.add("ci", random_tensor({4, 4}, rng));
  const Tensor proj = random_tensor({4, 4}, rng);
  auto build = [&](nm::Tape& t, const std::map<std::string, nm::Var>& v) {
    nm::Var h = uni::uni_conv(v.at("att"), {v.at("k0"), v.at("k1")});
    return nm::sum(nm::mul(uni::fuse_interaction(v.at("ci"), h), t.constant(proj)));
  };
  EXPECT_LT(unin::testing::gradient_error(p, build), 1e-4);
}

TEST(FuseInteraction, Examples) {
  nm::Rng rng(8);
  const Tensor h = random_tensor({3, 3}, rng);
  EXPECT_EQ(uni::fuse_interaction(Tensor({3, 3}, 1.0), h), h);
  EXPECT_EQ(uni::fuse_interaction(h, Tensor({3, 3})), Tensor({3, 3}));
  EXPECT_EQ(uni::fuse_interaction(Tensor({2, 2}, 0.25), Tensor::matrix({{4, 8}, {12, 16}})),
            Tensor::matrix({{1, 2}, {3, 4}}));
  EXPECT_THROW(uni::fuse_interaction(Tensor({2, 2}), Tensor({2, 3})), unin::ShapeError);
}

TEST(ConvAxis, Names) {
  EXPECT_EQ(uni::parse_axis("row"), uni::ConvAxis::kRow);
  EXPECT_EQ(uni::parse_axis(uni::axis_name(uni::ConvAxis::kColumn)), uni::ConvAxis::kColumn);
  EXPECT_THROW(uni::parse_axis("diagonal"), unin::ConfigError);
}
