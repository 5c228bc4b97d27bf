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

#include <bit>
#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

#include "groupage/errors.hpp"
#include "groupage/model.hpp"

namespace groupage {

enum class MomentSource { kClosedForm, kConvolutionOracle, kEnumerationOracle, kSimulation };

inline std::string_view to_string(MomentSource source) {
  switch (source) {
    case MomentSource::kClosedForm: return "closed-form";
    case MomentSource::kConvolutionOracle: return "convolution-oracle";
    case MomentSource::kEnumerationOracle: return "enumeration-oracle";
    case MomentSource::kSimulation: return "simulation";
  }
  return "unknown";
}

/// First and second moments of the update-cycle length Y, the mean service
/// time S, and the resulting average age, tagged with where they came from.
struct MomentSet {
  double mean_cycle = 0.0;           // E[Y]
  double second_moment_cycle = 0.0;  // E[Y^2]
  double mean_service = 0.0;         // E[S]
  double average_age = 0.0;          // E[Y^2] / (2 E[Y]) + E[S]
  MomentSource source_label = MomentSource::kClosedForm;
};

/// Renewal-reward age from cycle moments and mean service time.
inline double age_from_moments(double mean_cycle, double second_moment_cycle,
                               double mean_service) {
  return second_moment_cycle / (2.0 * mean_cycle) + mean_service;
}

// E[Y] = n/k + n(1 - q)
inline double expected_cycle_length(const SystemConfig& c) {
  const auto n = static_cast<double>(c.n());
  const auto k = static_cast<double>(c.k());
  return n / k + n * c.busy_probability();
}

/// E[Y^2] = n(n-k)q^2 + n^2(k+1)^2/k^2 - n(2n(1+1/k) - k)q.
///
/// Evaluated as Var(Y) + E[Y]^2 with Var(Y) = m k^2 q(1-q), the same
/// polynomial in q without the cancellation between its large terms.
inline double cycle_length_second_moment(const SystemConfig& c) {
  const auto m = static_cast<double>(c.m());
  const auto k = static_cast<double>(c.k());
  const double mean = expected_cycle_length(c);
  return m * k * k * c.q() * c.busy_probability() + mean * mean;
}

/// E[S_j] for the j-th source (1-based) of any group.
inline double expected_source_service(const SystemConfig& c, std::int64_t j) {
  if (j < 1 || j > c.k()) {
    throw RangeError("expected_source_service: j outside [1, k]");
  }
  return 1.0 + static_cast<double>(j) * c.busy_probability();
}

inline double mean_service_time(const SystemConfig& c) {
  return 1.0 + (static_cast<double>(c.k()) + 1.0) / 2.0 * c.busy_probability();
}

/// Long-run average age over all n sources under group updating.
inline double average_age(const SystemConfig& c) {
  return age_from_moments(expected_cycle_length(c),
                          cycle_length_second_moment(c), mean_service_time(c));
}

inline MomentSet closed_form_moments(const SystemConfig& c) {
  MomentSet out;
  out.mean_cycle = expected_cycle_length(c);
  out.second_moment_cycle = cycle_length_second_moment(c);
  out.mean_service = mean_service_time(c);
  out.average_age =
      age_from_moments(out.mean_cycle, out.second_moment_cycle, out.mean_service);
  out.source_label = MomentSource::kClosedForm;
  return out;
}

/// Sequential one-at-a-time updating: every cycle is exactly n slots long and
/// every service time is 1.
inline double round_robin_age(std::int64_t n) {
  if (n < 1) throw RangeError("round_robin_age: n must be >= 1");
  return static_cast<double>(n) / 2.0 + 1.0;
}

/// Exact moments from the distribution of Y as a sum of m i.i.d. group times
/// W in {1, k+1}, P(W = 1) = q. Sums over the binomial count of positive
/// groups in log space, so it stays finite for large m.
inline MomentSet convolution_oracle(const SystemConfig& c) {
  const std::int64_t m = c.m();
  const std::int64_t k = c.k();
  const double q = c.q();

  double ey = 0.0;
  double ey2 = 0.0;
  if (q == 1.0 || q == 0.0) {
    const double y = static_cast<double>(q == 1.0 ? m : m * (k + 1));
    ey = y;
    ey2 = y * y;
  } else {
    const double log_q = std::log(q);
    const double log_pos = std::log1p(-q);
    const double log_m_fact = std::lgamma(static_cast<double>(m) + 1.0);
    for (std::int64_t b = 0; b <= m; ++b) {
      const auto bd = static_cast<double>(b);
      const double log_w = log_m_fact - std::lgamma(bd + 1.0) -
                           std::lgamma(static_cast<double>(m - b) + 1.0) +
                           bd * log_pos + static_cast<double>(m - b) * log_q;
      const double w = std::exp(log_w);
      const auto y = static_cast<double>(m + b * k);
      ey += w * y;
      ey2 += w * y * y;
    }
  }

  // S_j is 1 with probability q and j+1 otherwise.
  double es = 0.0;
  for (std::int64_t j = 1; j <= k; ++j) {
    es += q * 1.0 + (1.0 - q) * static_cast<double>(j + 1);
  }
  es /= static_cast<double>(k);

  return MomentSet{ey, ey2, es, age_from_moments(ey, ey2, es),
                   MomentSource::kConvolutionOracle};
}

inline constexpr std::int64_t kMaxEnumerationSources = 20;

/// Exact moments by enumerating all 2^n status vectors with their
/// probabilities and applying the per-group service rules directly.
inline MomentSet enumeration_oracle(const SystemConfig& c) {
  const std::int64_t n = c.n();
  if (n > kMaxEnumerationSources) {
    throw SizeError("enumeration_oracle: n=" + std::to_string(n) +
                    " exceeds the 2^20 enumeration bound");
  }
  const std::int64_t k = c.k();
  const std::int64_t m = c.m();
  const double p = c.p();

  // Probability of one specific vector with `ones` positives.
  std::vector<double> prob_by_weight(static_cast<std::size_t>(n + 1));
  for (std::int64_t w = 0; w <= n; ++w) {
    prob_by_weight[static_cast<std::size_t>(w)] =
        std::pow(p, static_cast<double>(w)) *
        std::pow(1.0 - p, static_cast<double>(n - w));
  }

  const std::uint32_t group_mask = (1u << k) - 1u;
  double ey = 0.0;
  double ey2 = 0.0;
  double es = 0.0;
  const std::uint32_t total = 1u << n;
  for (std::uint32_t v = 0; v < total; ++v) {
    const double pr = prob_by_weight[static_cast<std::size_t>(std::popcount(v))];
    if (pr == 0.0) continue;
    std::int64_t y = 0;
    std::int64_t s_sum = 0;
    for (std::int64_t i = 0; i < m; ++i) {
      std::uint8_t bits[32];
      const std::uint32_t g = (v >> (i * k)) & group_mask;
      for (std::int64_t j = 0; j < k; ++j) bits[j] = (g >> j) & 1u;
      const auto outcome = group_outcome(std::span<const std::uint8_t>(bits, k), k);
      y += outcome.group_service_time;
      for (std::int64_t j = 1; j <= k; ++j) {
        s_sum += source_service_time(outcome.has_positive, j, k);
      }
    }
    const auto yd = static_cast<double>(y);
    ey += pr * yd;
    ey2 += pr * yd * yd;
    es += pr * static_cast<double>(s_sum) / static_cast<double>(n);
  }
  return MomentSet{ey, ey2, es, age_from_moments(ey, ey2, es),
                   MomentSource::kEnumerationOracle};
}

}  // namespace groupage
