// Copyright 2026 The groupage Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "groupage/model.hpp"
#include "oracles.hpp"

namespace groupage {
namespace {

TEST(ValidateConfig, DerivesGroupCountAndAllZeroProbability) {
  const auto c = validate_config(120, 0.1, 4);
  EXPECT_EQ(c.m(), 30);
  EXPECT_NEAR(c.q(), 0.6561, 1e-12);

  const auto d = validate_config(48, 0.05, 6);
  EXPECT_EQ(d.m(), 8);
  EXPECT_NEAR(d.q(), std::pow(0.95, 6), 1e-12);
}

TEST(ValidateConfig, DegenerateProbabilities) {
  EXPECT_EQ(validate_config(10, 0.0, 5).q(), 1.0);
  EXPECT_EQ(validate_config(10, 1.0, 5).q(), 0.0);
}

TEST(ValidateConfig, Errors) {
  EXPECT_THROW(validate_config(120, 0.1, 7), DivisibilityError);
  EXPECT_THROW(validate_config(120, -0.1, 4), RangeError);
  EXPECT_THROW(validate_config(120, 1.5, 4), RangeError);
  EXPECT_THROW(validate_config(120, std::nan(""), 4), RangeError);
  EXPECT_THROW(validate_config(12, 0.1, 0), RangeError);
  EXPECT_THROW(validate_config(12, 0.1, 24), RangeError);
  EXPECT_THROW(validate_config(0, 0.1, 1), RangeError);
}

TEST(ValidateConfig, QMatchesPowerOnRandomInputs) {
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> pdist(0.0, 1.0);
  std::uniform_int_distribution<int> ndist(1, 400);
  for (int t = 0; t < 500; ++t) {
    const int n = ndist(gen);
    const auto divs = testing::brute_divisors(n);
    const auto k = divs[static_cast<std::size_t>(t) % divs.size()];
    const double p = pdist(gen);
    const auto c = validate_config(n, p, k);
    EXPECT_EQ(c.m() * c.k(), n);
    EXPECT_NEAR(c.q(), std::pow(1.0 - p, static_cast<double>(k)), 1e-12);
  }
}

TEST(Divisors, KnownValues) {
  EXPECT_EQ(divisors(6), (std::vector<std::int64_t>{1, 2, 3, 6}));
  EXPECT_EQ(divisors(1), (std::vector<std::int64_t>{1}));
  EXPECT_EQ(divisors(48), (std::vector<std::int64_t>{1, 2, 3, 4, 6, 8, 12, 16, 24, 48}));
  EXPECT_THROW(divisors(0), RangeError);
}

TEST(Divisors, MatchesBruteForce) {
  for (std::int64_t n = 1; n <= 2000; ++n) {
    ASSERT_EQ(divisors(n), testing::brute_divisors(n)) << "n=" << n;
  }
}

TEST(SampleStatuses, DegenerateProbabilities) {
  RandomStream rng(3);
  const auto zeros = sample_statuses(validate_config(12, 0.0, 3), rng);
  for (auto v : zeros.cells()) EXPECT_EQ(v, 0);
  const auto ones = sample_statuses(validate_config(12, 1.0, 3), rng);
  for (auto v : ones.cells()) EXPECT_EQ(v, 1);
  EXPECT_EQ(ones.groups(), 4);
  EXPECT_EQ(ones.group_size(), 3);
}

TEST(SampleStatuses, FairCoinMean) {
  RandomStream rng(11);
  const auto s = sample_statuses(validate_config(100000, 0.5, 1), rng);
  double sum = 0.0;
  for (auto v : s.cells()) sum += v;
  EXPECT_NEAR(sum / 100000.0, 0.5, 0.01);
}

TEST(SampleStatuses, DeterministicPerSeed) {
  const auto c = validate_config(60, 0.3, 6);
  RandomStream a(99);
  RandomStream b(99);
  for (int t = 0; t < 10; ++t) {
    const auto x = sample_statuses(c, a);
    const auto y = sample_statuses(c, b);
    ASSERT_TRUE(std::equal(x.cells().begin(), x.cells().end(), y.cells().begin()));
  }
}

TEST(RandomStream, SplitStreamsDiffer) {
  RandomStream parent(5);
  auto child = parent.split();
  int same = 0;
  for (int t = 0; t < 64; ++t) same += parent.next_u64() == child.next_u64();
  EXPECT_EQ(same, 0);
}

TEST(GroupOutcome, Examples) {
  const std::uint8_t zeros[] = {0, 0, 0};
  const std::uint8_t mixed[] = {0, 1, 0};
  const std::uint8_t single[] = {1};
  EXPECT_EQ(group_outcome(zeros, 3), (GroupOutcome{false, 1}));
  EXPECT_EQ(group_outcome(mixed, 3), (GroupOutcome{true, 4}));
  EXPECT_EQ(group_outcome(single, 1), (GroupOutcome{true, 2}));
  EXPECT_THROW(group_outcome(mixed, 2), SizeError);
}

TEST(SourceServiceTime, Examples) {
  EXPECT_EQ(source_service_time(false, 5, 8), 1);
  EXPECT_EQ(source_service_time(true, 1, 8), 2);
  EXPECT_EQ(source_service_time(true, 8, 8), 9);
  EXPECT_THROW(source_service_time(true, 0, 8), RangeError);
  EXPECT_THROW(source_service_time(true, 9, 8), RangeError);
}

TEST(SourceServiceTime, ConsistentWithGroupOutcome) {
  // Every group of size <= 8: last source finishes with the group, and
  // service times are non-decreasing in j.
  for (std::int64_t k = 1; k <= 8; ++k) {
    for (std::uint32_t bits = 0; bits < (1u << k); ++bits) {
      std::vector<std::uint8_t> g(static_cast<std::size_t>(k));
      for (std::int64_t j = 0; j < k; ++j) g[static_cast<std::size_t>(j)] = (bits >> j) & 1u;
      const auto out = group_outcome(g, k);
      EXPECT_EQ(out.group_service_time, source_service_time(out.has_positive, k, k));
      std::int64_t prev = 0;
      for (std::int64_t j = 1; j <= k; ++j) {
        const auto s = source_service_time(out.has_positive, j, k);
        if (out.has_positive) {
          EXPECT_GE(s, prev);
        } else {
          EXPECT_EQ(s, 1);
        }
        prev = s;
      }
    }
  }
}

TEST(GroupOutcome, PositiveFrequencyConvergesToOneMinusQ) {
  for (double p : {0.1, 0.5}) {
    const auto c = validate_config(4, p, 4);
    RandomStream rng(2024);
    const int samples = 100000;
    int positives = 0;
    for (int t = 0; t < samples; ++t) {
      const auto s = sample_statuses(c, rng);
      positives += group_outcome(s.group(0), 4).has_positive;
    }
    const double target = 1.0 - c.q();
    const double se = std::sqrt(target * (1.0 - target) / samples);
    EXPECT_NEAR(static_cast<double>(positives) / samples, target, 4.0 * se) << "p=" << p;
  }
}

}  // namespace
}  // namespace groupage
