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

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "groupage/errors.hpp"
#include "groupage/rng.hpp"

namespace groupage {

/// A validated (n, p, k) triple: n sources with positive-status probability
/// p, split into m = n/k groups of k sources each.
///
/// Immutable after construction. The derived q = (1-p)^k is the probability
/// that a group has no positive source and clears with a single update.
class SystemConfig {
 public:
  SystemConfig(std::int64_t n, double p, std::int64_t k) {
    if (n < 1) throw RangeError("n must be >= 1, got " + std::to_string(n));
    if (!(p >= 0.0 && p <= 1.0)) {
      throw RangeError("p must lie in [0, 1], got " + std::to_string(p));
    }
    if (k < 1 || k > n) {
      throw RangeError("k must lie in [1, n], got k=" + std::to_string(k) +
                       " for n=" + std::to_string(n));
    }
    if (n % k != 0) {
      throw DivisibilityError("k=" + std::to_string(k) +
                              " does not divide n=" + std::to_string(n));
    }
    n_ = n;
    p_ = p;
    k_ = k;
    m_ = n / k;
    if (p == 0.0) {
      q_ = 1.0;
      busy_ = 0.0;
    } else if (p == 1.0) {
      q_ = 0.0;
      busy_ = 1.0;
    } else {
      const double log_q = static_cast<double>(k) * std::log1p(-p);
      q_ = std::exp(log_q);
      busy_ = -std::expm1(log_q);
    }
  }

  std::int64_t n() const { return n_; }
  double p() const { return p_; }
  std::int64_t k() const { return k_; }
  std::int64_t m() const { return m_; }
  double q() const { return q_; }
  /// 1 - q, accurate for small p.
  double busy_probability() const { return busy_; }

  friend bool operator==(const SystemConfig&, const SystemConfig&) = default;

 private:
  std::int64_t n_ = 1;
  double p_ = 0.0;
  std::int64_t k_ = 1;
  std::int64_t m_ = 1;
  double q_ = 1.0;
  double busy_ = 0.0;
};

/// Checks the (n, p, k) constraints and returns the config with m and q filled
/// in. Throws DivisibilityError when k does not divide n and RangeError when p
/// or k is out of range.
inline SystemConfig validate_config(std::int64_t n, double p, std::int64_t k) {
  return SystemConfig(n, p, k);
}

/// All positive divisors of n, ascending.
inline std::vector<std::int64_t> divisors(std::int64_t n) {
  if (n < 1) throw RangeError("divisors: n must be >= 1");
  std::vector<std::int64_t> low;
  std::vector<std::int64_t> high;
  for (std::int64_t d = 1; d * d <= n; ++d) {
    if (n % d != 0) continue;
    low.push_back(d);
    if (d != n / d) high.push_back(n / d);
  }
  low.insert(low.end(), high.rbegin(), high.rend());
  return low;
}

/// One cycle's worth of binary source statuses, m rows (groups) by k columns.
class StatusMatrix {
 public:
  StatusMatrix(std::int64_t groups, std::int64_t group_size)
      : groups_(groups),
        group_size_(group_size),
        cells_(static_cast<std::size_t>(groups * group_size), 0) {}

  std::int64_t groups() const { return groups_; }
  std::int64_t group_size() const { return group_size_; }

  // Zero-based (group, position).
  std::uint8_t at(std::int64_t i, std::int64_t j) const {
    return cells_[index(i, j)];
  }
  void set(std::int64_t i, std::int64_t j, bool value) {
    cells_[index(i, j)] = value ? 1 : 0;
  }

  std::span<const std::uint8_t> group(std::int64_t i) const {
    return std::span<const std::uint8_t>(cells_).subspan(
        static_cast<std::size_t>(i * group_size_),
        static_cast<std::size_t>(group_size_));
  }

  std::span<std::uint8_t> cells() { return cells_; }
  std::span<const std::uint8_t> cells() const { return cells_; }

 private:
  std::size_t index(std::int64_t i, std::int64_t j) const {
    return static_cast<std::size_t>(i * group_size_ + j);
  }

  std::int64_t groups_;
  std::int64_t group_size_;
  std::vector<std::uint8_t> cells_;
};

/// Fills `out` with i.i.d. Bernoulli(p) statuses, row-major. Reuses storage.
inline void sample_statuses_into(const SystemConfig& config, RandomStream& rng,
                                 StatusMatrix& out) {
  for (auto& cell : out.cells()) cell = rng.bernoulli(config.p()) ? 1 : 0;
}

inline StatusMatrix sample_statuses(const SystemConfig& config,
                                    RandomStream& rng) {
  StatusMatrix statuses(config.m(), config.k());
  sample_statuses_into(config, rng, statuses);
  return statuses;
}

struct GroupOutcome {
  bool has_positive = false;
  std::int64_t group_service_time = 1;  // 1, or k+1 when has_positive

  friend bool operator==(const GroupOutcome&, const GroupOutcome&) = default;
};

/// Service time of a whole group: one aggregate update, plus k individual
/// updates when any member is positive.
inline GroupOutcome group_outcome(std::span<const std::uint8_t> group_statuses,
                                  std::int64_t k) {
  if (static_cast<std::int64_t>(group_statuses.size()) != k) {
    throw SizeError("group_outcome: expected " + std::to_string(k) +
                    " statuses, got " + std::to_string(group_statuses.size()));
  }
  bool any = false;
  for (auto s : group_statuses) any = any || (s != 0);
  return GroupOutcome{any, any ? k + 1 : 1};
}

/// Service time of the j-th source (1-based) of a group of size k.
inline std::int64_t source_service_time(bool has_positive, std::int64_t j,
                                        std::int64_t k) {
  if (j < 1 || j > k) {
    throw RangeError("source index j=" + std::to_string(j) +
                     " outside [1, " + std::to_string(k) + "]");
  }
  return has_positive ? j + 1 : 1;
}

}  // namespace groupage
