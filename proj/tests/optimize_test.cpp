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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "groupage/optimize.hpp"
#include "oracles.hpp"

namespace groupage {
namespace {

// Residual of dE[Y]/dk = -n/k^2 - n (1-p)^k log(1-p) at continuous k.
double derivative_residual(double n, double p, double k) {
  return -n / (k * k) - n * std::pow(1.0 - p, k) * std::log(1.0 - p);
}

std::vector<double> grid(double start, double stop, double step) {
  std::vector<double> out;
  for (int i = 0; start + i * step <= stop + 1e-12; ++i) {
    out.push_back(std::round((start + i * step) * 1e6) / 1e6);
  }
  return out;
}

TEST(GroupTestingThreshold, Examples) {
  EXPECT_EQ(group_testing_efficiency_threshold(1), 0.0);
  EXPECT_NEAR(group_testing_efficiency_threshold(3), 0.3066, 5e-5);
  EXPECT_THROW(group_testing_efficiency_threshold(0), RangeError);

  std::int64_t best = 1;
  for (std::int64_t k = 1; k <= 100; ++k) {
    if (group_testing_efficiency_threshold(k) > group_testing_efficiency_threshold(best)) best = k;
  }
  EXPECT_EQ(best, 3);
}

TEST(GroupTestingThreshold, MarksBreakEvenWithSequentialUpdates) {
  // At p = p_gt(k), E[Y] = n exactly.
  for (std::int64_t k : {2, 3, 4, 6, 12}) {
    const double p = group_testing_efficiency_threshold(k);
    EXPECT_NEAR(expected_cycle_length(validate_config(12, p, k)), 12.0, 1e-9);
  }
}

TEST(StationaryGroupSizes, BranchPoint) {
  const double boundary = two_root_boundary();
  EXPECT_NEAR(boundary, 0.418, 5e-4);
  const auto roots = stationary_group_sizes(boundary);
  ASSERT_TRUE(roots.exists);
  EXPECT_NEAR(roots.alpha1, std::numbers::e * std::numbers::e / 2.0, 1e-6);
  EXPECT_NEAR(roots.alpha2, std::numbers::e * std::numbers::e / 2.0, 1e-6);
}

TEST(StationaryGroupSizes, NoRootsAboveBoundary) {
  EXPECT_FALSE(stationary_group_sizes(0.45).exists);
  EXPECT_FALSE(stationary_group_sizes(0.9).exists);
  EXPECT_THROW(stationary_group_sizes(0.0), DomainError);
  EXPECT_THROW(stationary_group_sizes(1.0), DomainError);
}

TEST(StationaryGroupSizes, RootsZeroTheDerivative) {
  for (double p = 0.001; p < 0.418; p += 0.001) {
    const auto roots = stationary_group_sizes(p);
    ASSERT_TRUE(roots.exists) << p;
    EXPECT_LE(roots.alpha1, roots.alpha2);
    const double n = 48.0;
    EXPECT_LE(std::abs(derivative_residual(n, p, roots.alpha1)), 1e-9 * n) << p;
    EXPECT_LE(std::abs(derivative_residual(n, p, roots.alpha2)), 1e-9 * n) << p;
    // The transformed equation x e^x = -sqrt(-log(1-p))/2 with x = k log(1-p)/2.
    const double rhs = -0.5 * std::sqrt(-std::log1p(-p));
    for (double alpha : {roots.alpha1, roots.alpha2}) {
      const double x = alpha / 2.0 * std::log1p(-p);
      EXPECT_NEAR(x * std::exp(x), rhs, 1e-9);
    }
  }
}

TEST(StationaryGroupSizes, ExistenceMatchesBoundary) {
  const double boundary = two_root_boundary();
  for (double p = 0.005; p < 1.0; p += 0.005) {
    EXPECT_EQ(stationary_group_sizes(p).exists, p <= boundary) << p;
  }
}

TEST(OptimalGroupSizeTesting, Examples) {
  EXPECT_EQ(optimal_group_size_testing(48, 0.05).optimal_k, 6);
  EXPECT_EQ(optimal_group_size_testing(48, 0.15).optimal_k, 3);
  for (std::int64_t n : {1, 7, 48, 120}) {
    EXPECT_EQ(optimal_group_size_testing(n, 0.0).optimal_k, n);
  }
}

TEST(OptimalGroupSizeTesting, CandidateSetStructure) {
  const auto r = optimal_group_size_testing(120, 0.05);
  EXPECT_EQ(r.metric, Metric::kExpectedUpdates);
  ASSERT_FALSE(r.candidates.empty());
  EXPECT_EQ(r.candidates.front().k, 1);
  EXPECT_EQ(r.candidates.back().k, 120);
  EXPECT_LE(r.candidates.size(), 6u);
  for (const auto& c : r.candidates) {
    EXPECT_EQ(120 % c.k, 0);
    EXPECT_GE(c.objective, r.objective_at_optimum);
  }
  EXPECT_TRUE(std::is_sorted(r.candidates.begin(), r.candidates.end(),
                             [](const Candidate& a, const Candidate& b) { return a.k < b.k; }));
}

TEST(OptimalGroupSizeTesting, LambertRouteMatchesExhaustiveSearch) {
  for (std::int64_t n : {12, 24, 48, 120, 360}) {
    for (int i = 1; i <= 30; ++i) {
      const double p = i / 100.0;
      const auto fast = optimal_group_size_testing(n, p);
      const auto full = optimal_group_size_testing_exhaustive(n, p);
      EXPECT_EQ(fast.optimal_k, full.optimal_k) << "n=" << n << " p=" << p;
      EXPECT_EQ(fast.objective_at_optimum, full.objective_at_optimum);
      // Group testing beats sequential updates whenever p <= p_gt(k*).
      if (p <= group_testing_efficiency_threshold(fast.optimal_k)) {
        EXPECT_LE(fast.objective_at_optimum, static_cast<double>(n) + 1e-9);
      }
    }
  }
}

TEST(OptimalGroupSizeTesting, FallsBackAboveBoundary) {
  const auto r = optimal_group_size_testing(48, 0.6);
  EXPECT_EQ(r.candidates.size(), divisors(48).size());
}

TEST(OptimalGroupSizeUpdating, Examples) {
  EXPECT_EQ(optimal_group_size_updating(120, 0.01).optimal_k, 8);
  EXPECT_EQ(optimal_group_size_updating(120, 0.1).optimal_k, 4);
  EXPECT_EQ(optimal_group_size_updating(120, 0.2).optimal_k, 3);
  EXPECT_EQ(optimal_group_size_updating(120, 0.4).optimal_k, 3);
  EXPECT_EQ(optimal_group_size_updating(48, 0.05).optimal_k, 4);
}

TEST(OptimalGroupSizeUpdating, ExhaustiveAndNoWorseThanExtremes) {
  for (std::int64_t n : {1, 2, 6, 48, 120, 1200}) {
    for (double p : {0.0, 0.01, 0.1, 0.3, 0.7, 1.0}) {
      const auto r = optimal_group_size_updating(n, p);
      EXPECT_EQ(r.metric, Metric::kAge);
      ASSERT_EQ(r.candidates.size(), divisors(n).size());
      EXPECT_LE(r.objective_at_optimum, average_age(validate_config(n, p, 1)));
      EXPECT_LE(r.objective_at_optimum, average_age(validate_config(n, p, n)));
      for (const auto& c : r.candidates) {
        // Smallest k wins ties: nothing before the optimum may equal it.
        if (c.k < r.optimal_k) {
          EXPECT_GT(c.objective, r.objective_at_optimum);
        } else {
          EXPECT_GE(c.objective, r.objective_at_optimum);
        }
      }
    }
  }
}

TEST(OptimalGroupSize, TiesGoToSmallestK) {
  const auto r = optimal_group_size_updating(2, 1.0);
  // k=1: 2*2/2 + 1 + 1 = 4; k=2: 3/2 + 1 + 3/2 = 4.
  EXPECT_EQ(r.candidates[0].objective, r.candidates[1].objective);
  EXPECT_EQ(r.optimal_k, 1);
}

TEST(UpdatingEfficiencyThreshold, BracketForPopulationOf120) {
  const double p_gu = updating_efficiency_threshold(120);
  EXPECT_GT(p_gu, 0.2);
  EXPECT_LT(p_gu, 0.4);
  // Independent root-finder value.
  EXPECT_NEAR(p_gu, 0.288244128994, 2e-6);
  EXPECT_LT(average_age(validate_config(120, 0.2, 3)), 61.0);
  EXPECT_GT(average_age(validate_config(120, 0.4, 3)), 61.0);
}

TEST(UpdatingEfficiencyThreshold, MatchesFineGridScan) {
  for (std::int64_t n : {2, 4}) {
    const double threshold = updating_efficiency_threshold(n);
    const double baseline = round_robin_age(n);
    double last_ok = 0.0;
    for (int i = 0; i <= 100000; ++i) {
      const double p = i / 100000.0;
      if (min_average_age(n, p) <= baseline) last_ok = p;
    }
    EXPECT_GT(threshold, 0.0);
    EXPECT_LE(threshold, 1.0);
    EXPECT_NEAR(threshold, last_ok, 2e-5) << "n=" << n;
  }
  EXPECT_THROW(updating_efficiency_threshold(1), RangeError);
}

TEST(KStarSweep, CrossoverAndMonotoneTrend) {
  const auto rows = kstar_sweep(120, grid(0.01, 0.25, 0.01));
  ASSERT_EQ(rows.size(), 25u);
  EXPECT_NE(rows.front().k_updating, rows.front().k_testing);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].p >= 0.13 - 1e-12) {
      EXPECT_EQ(rows[i].k_updating, rows[i].k_testing) << rows[i].p;
    }
    if (i > 0) {
      EXPECT_LE(rows[i].k_updating, rows[i - 1].k_updating);
      EXPECT_LE(rows[i].k_testing, rows[i - 1].k_testing);
    }
  }
}

}  // namespace
}  // namespace groupage
