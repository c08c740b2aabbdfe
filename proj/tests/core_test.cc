// Copyright 2026 The htdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "htdp/core.h"

namespace htdp {
namespace {

TEST(MedianTest, EvenLengthTakesMidpoint) {
  const std::vector<double> v = {1, 2, 3, 4};
  EXPECT_EQ(Median(v), 2.5);
}

TEST(MedianTest, SingletonAndOdd) {
  EXPECT_EQ(Median(std::vector<double>{5}), 5);
  EXPECT_EQ(Median(std::vector<double>{3, 1, 2}), 2);
}

TEST(MedianTest, EmptyIsUsageError) {
  EXPECT_THROW(Median(std::vector<double>{}), UsageError);
}

TEST(MedianTest, RejectsNonFinite) {
  EXPECT_THROW(Median(std::vector<double>{1.0, std::nan("")}), UsageError);
}

TEST(MedianTest, PermutationInvariantAndTranslationEquivariant) {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> normal;
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> v(1 + rep % 17);
    for (double& x : v) x = normal(gen);
    const double m = Median(v);
    std::shuffle(v.begin(), v.end(), gen);
    EXPECT_EQ(Median(v), m);
    std::vector<double> shifted = v;
    for (double& x : shifted) x += 8.0;
    EXPECT_NEAR(Median(shifted), m + 8.0, 1e-14);
  }
}

TEST(ClipTest, Examples) {
  EXPECT_EQ(Clip(5, -3, 3), 3);
  EXPECT_EQ(Clip(-7, -3, 3), -3);
  EXPECT_EQ(Clip(0.5, -3, 3), 0.5);
}

TEST(ClipTest, InvertedIntervalIsUsageError) {
  EXPECT_THROW(Clip(0, 1, -1), UsageError);
}

TEST(ClipTest, Idempotent) {
  for (double x = -10; x <= 10; x += 0.37) {
    const double once = Clip(x, -2.5, 4.0);
    EXPECT_EQ(Clip(once, -2.5, 4.0), once);
  }
}

Dataset Rows(std::size_t n, std::size_t d) {
  std::vector<double> v(n * d);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
  return Dataset(n, d, v);
}

TEST(SplitBatchesTest, EvenSplit) {
  const auto b = SplitBatches(Rows(10, 1), 2);
  ASSERT_EQ(b.size(), 2u);
  EXPECT_EQ(b[0].n(), 5u);
  EXPECT_EQ(b[0].at(0, 0), 0);
  EXPECT_EQ(b[1].at(0, 0), 5);
  EXPECT_EQ(b[1].at(4, 0), 9);
}

TEST(SplitBatchesTest, LastBatchAbsorbsRemainder) {
  const auto b = SplitBatches(Rows(7, 1), 3);
  ASSERT_EQ(b.size(), 3u);
  EXPECT_EQ(b[0].n(), 2u);
  EXPECT_EQ(b[1].n(), 2u);
  EXPECT_EQ(b[2].n(), 3u);
}

TEST(SplitBatchesTest, Singletons) {
  const auto b = SplitBatches(Rows(4, 2), 4);
  ASSERT_EQ(b.size(), 4u);
  for (const auto& batch : b) EXPECT_EQ(batch.n(), 1u);
}

TEST(SplitBatchesTest, FewerSamplesThanBatches) {
  EXPECT_THROW(SplitBatches(Rows(3, 1), 4), UsageError);
  EXPECT_THROW(SplitBatches(Rows(3, 1), 0), UsageError);
}

TEST(SplitBatchesTest, ConcatenationReproducesRows) {
  for (std::size_t n : {5u, 16u, 33u}) {
    for (std::size_t m = 1; m <= n; m += 3) {
      const Dataset data = Rows(n, 3);
      std::vector<double> joined;
      for (const Dataset& b : SplitBatches(data, m)) {
        joined.insert(joined.end(), b.values().begin(), b.values().end());
      }
      EXPECT_EQ(joined, std::vector<double>(data.values().begin(),
                                            data.values().end()));
    }
  }
}

TEST(DatasetTest, RejectsNonFiniteAndEmpty) {
  EXPECT_THROW(Dataset(1, 1, {std::nan("")}), UsageError);
  EXPECT_THROW(Dataset(0, 1, {}), UsageError);
  EXPECT_THROW(Dataset(2, 2, {1.0, 2.0}), UsageError);
}

TEST(RngStreamTest, SamePathSameDraws) {
  RngStream a(42, {"x", "y"});
  RngStream b(42, {"x", "y"});
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(a.Normal(), b.Normal());
    EXPECT_EQ(a.Laplace(2.0), b.Laplace(2.0));
    EXPECT_EQ(a.Uniform(), b.Uniform());
  }
}

TEST(RngStreamTest, ChildIsPureFunctionOfPath) {
  RngStream root(9);
  RngStream used = root;
  used.Normal();  // advancing the parent must not change its children
  EXPECT_EQ(root.Child("a").Child(3).derived_seed(),
            used.Child("a").Child(3).derived_seed());
  EXPECT_EQ(root.Child("a").derived_seed(), RngStream(9, {"a"}).derived_seed());
  EXPECT_NE(root.Child("a").derived_seed(), root.Child("b").derived_seed());
  EXPECT_NE(root.Child(1).derived_seed(), root.Child(2).derived_seed());
  EXPECT_NE(RngStream(1).derived_seed(), RngStream(2).derived_seed());
}

TEST(RngStreamTest, UniformIsOpenInterval) {
  RngStream r(3);
  for (int i = 0; i < 100000; ++i) {
    const double u = r.Uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(MomentSpecTest, Validation) {
  MomentSpec ok{2.0, 1.0};
  EXPECT_NO_THROW(ok.Validate());
  EXPECT_THROW((MomentSpec{1.5, 1.0}.Validate()), UsageError);
  EXPECT_THROW((MomentSpec{2.0, 0.0}.Validate()), UsageError);
}

}  // namespace
}  // namespace htdp
