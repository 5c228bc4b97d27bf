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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>
#include <vector>

#include "groupage/analytic.hpp"
#include "groupage/errors.hpp"
#include "groupage/lambertw.hpp"
#include "groupage/model.hpp"

namespace groupage {

enum class Metric { kAge, kExpectedUpdates };

inline std::string_view to_string(Metric metric) {
  return metric == Metric::kAge ? "age" : "expected-updates";
}

struct Candidate {
  std::int64_t k = 1;
  double objective = 0.0;
};

struct OptimizationResult {
  std::int64_t optimal_k = 1;
  std::vector<Candidate> candidates;  // ascending k, each divides n
  Metric metric = Metric::kAge;
  double objective_at_optimum = 0.0;
};

/// Continuous stationary points of E[Y] in k (local minimum alpha1, local
/// maximum alpha2). Only defined while the Lambert argument stays >= -1/e.
struct StationaryPoints {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  bool exists = false;
};

/// Largest p at which both stationary points exist: 1 - exp(-4/e^2).
inline double two_root_boundary() {
  return -std::expm1(-4.0 / (std::numbers::e * std::numbers::e));
}

/// Largest p at which group testing with group size k needs at most n tests
/// per cycle on average.
inline double group_testing_efficiency_threshold(std::int64_t k) {
  if (k < 1) throw RangeError("group_testing_efficiency_threshold: k must be >= 1");
  return -std::expm1(-std::log(static_cast<double>(k)) / static_cast<double>(k));
}

inline StationaryPoints stationary_group_sizes(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("stationary_group_sizes: p must lie in (0, 1)");
  }
  const double log_q1 = std::log1p(-p);  // log(1 - p) < 0
  const double y = -0.5 * std::sqrt(-log_q1);
  if (y < lambertw::kBranchPoint && !lambertw::detail::at_branch_point(y)) {
    return StationaryPoints{};
  }
  StationaryPoints out;
  out.alpha1 = 2.0 / log_q1 * lambert_w0(y);
  out.alpha2 = 2.0 / log_q1 * lambert_wm1(y);
  out.exists = true;
  return out;
}

namespace detail {

template <typename Objective>
OptimizationResult argmin_over(const std::vector<std::int64_t>& ks, Metric metric,
                               Objective&& objective) {
  OptimizationResult result;
  result.metric = metric;
  result.candidates.reserve(ks.size());
  for (auto k : ks) result.candidates.push_back(Candidate{k, objective(k)});
  std::sort(result.candidates.begin(), result.candidates.end(),
            [](const Candidate& a, const Candidate& b) { return a.k < b.k; });
  // Strict < keeps the smallest k on ties.
  const Candidate* best = &result.candidates.front();
  for (const auto& c : result.candidates) {
    if (c.objective < best->objective) best = &c;
  }
  result.optimal_k = best->k;
  result.objective_at_optimum = best->objective;
  return result;
}

// Largest divisor <= alpha (1 when alpha < 1).
inline std::int64_t divisor_below(const std::vector<std::int64_t>& divs, double alpha) {
  std::int64_t best = divs.front();
  for (auto d : divs) {
    if (static_cast<double>(d) <= alpha) best = d;
  }
  return best;
}

// Smallest divisor >= alpha (n when alpha > n).
inline std::int64_t divisor_above(const std::vector<std::int64_t>& divs, double alpha) {
  for (auto d : divs) {
    if (static_cast<double>(d) >= alpha) return d;
  }
  return divs.back();
}

inline void check_np(std::int64_t n, double p) {
  if (n < 1) throw RangeError("n must be >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw RangeError("p must lie in [0, 1]");
}

}  // namespace detail

/// Group size minimizing the expected number of updates per cycle, E[Y].
///
/// Evaluates E[Y] on {1, n} plus the divisors bracketing each stationary
/// point. E[Y] is monotone between stationary points, so the bracketing
/// divisors are the only interior candidates. Without stationary points
/// (p > 1 - e^{-4/e^2}, or p in {0, 1}) every divisor is evaluated.
inline OptimizationResult optimal_group_size_testing(std::int64_t n, double p) {
  detail::check_np(n, p);
  const auto divs = divisors(n);
  auto objective = [&](std::int64_t k) {
    return expected_cycle_length(SystemConfig(n, p, k));
  };

  if (p == 0.0 || p == 1.0) return detail::argmin_over(divs, Metric::kExpectedUpdates, objective);
  const auto roots = stationary_group_sizes(p);
  if (!roots.exists) return detail::argmin_over(divs, Metric::kExpectedUpdates, objective);

  std::vector<std::int64_t> ks{1, n};
  for (double alpha : {roots.alpha1, roots.alpha2}) {
    ks.push_back(detail::divisor_below(divs, alpha));
    ks.push_back(detail::divisor_above(divs, alpha));
  }
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  return detail::argmin_over(ks, Metric::kExpectedUpdates, objective);
}

/// Exhaustive version of the above, over every divisor of n.
inline OptimizationResult optimal_group_size_testing_exhaustive(std::int64_t n, double p) {
  detail::check_np(n, p);
  return detail::argmin_over(divisors(n), Metric::kExpectedUpdates, [&](std::int64_t k) {
    return expected_cycle_length(SystemConfig(n, p, k));
  });
}

/// Group size minimizing the average age, by exhaustive divisor search.
inline OptimizationResult optimal_group_size_updating(std::int64_t n, double p) {
  detail::check_np(n, p);
  return detail::argmin_over(divisors(n), Metric::kAge, [&](std::int64_t k) {
    return average_age(SystemConfig(n, p, k));
  });
}

inline double min_average_age(std::int64_t n, double p) {
  return optimal_group_size_updating(n, p).objective_at_optimum;
}

inline constexpr double kThresholdTolerance = 1e-6;

/// Largest p for which the best group size still matches or beats
/// round-robin, found by bisection on p. The condition is assumed monotone in
/// p; the endpoints are checked to bracket the change.
inline double updating_efficiency_threshold(std::int64_t n,
                                            double tolerance = kThresholdTolerance) {
  if (n < 2) throw RangeError("updating_efficiency_threshold: n must be >= 2");
  const double baseline = round_robin_age(n);
  auto efficient = [&](double p) { return min_average_age(n, p) <= baseline; };

  double lo = 0.0;
  double hi = 1.0;
  if (!efficient(lo)) throw BracketError("group updating loses to round-robin at p=0");
  if (efficient(hi)) return hi;
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    (efficient(mid) ? lo : hi) = mid;
  }
  return lo;
}

struct KStarPoint {
  double p = 0.0;
  std::int64_t k_updating = 1;
  std::int64_t k_testing = 1;
};

inline std::vector<KStarPoint> kstar_sweep(std::int64_t n, const std::vector<double>& p_values) {
  std::vector<KStarPoint> out;
  out.reserve(p_values.size());
  for (double p : p_values) {
    out.push_back(KStarPoint{p, optimal_group_size_updating(n, p).optimal_k,
                             optimal_group_size_testing(n, p).optimal_k});
  }
  return out;
}

}  // namespace groupage
