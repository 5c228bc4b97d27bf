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
#include <span>
#include <vector>

#include "groupage/analytic.hpp"
#include "groupage/errors.hpp"
#include "groupage/model.hpp"
#include "groupage/rng.hpp"

namespace groupage {

/// Draws update cycles back to back: each cycle samples a fresh status matrix
/// and serves groups 1..m in order.
///
/// `visit` receives the per-group outcomes of each cycle in sequence.
template <typename Visitor>
void simulate_stream(const SystemConfig& config, std::int64_t num_cycles,
                     std::uint64_t seed, Visitor&& visit) {
  if (num_cycles < 1) throw RangeError("num_cycles must be >= 1");
  RandomStream rng(seed);
  StatusMatrix statuses(config.m(), config.k());
  std::vector<GroupOutcome> outcomes(static_cast<std::size_t>(config.m()));
  for (std::int64_t l = 0; l < num_cycles; ++l) {
    sample_statuses_into(config, rng, statuses);
    for (std::int64_t i = 0; i < config.m(); ++i) {
      outcomes[static_cast<std::size_t>(i)] = group_outcome(statuses.group(i), config.k());
    }
    visit(std::span<const GroupOutcome>(outcomes));
  }
}

/// A fully materialized simulation run. Indices are zero-based: cycle l,
/// group i, position j within the group (source j+1 in one-based terms).
class CycleTrace {
 public:
  CycleTrace(const SystemConfig& config, std::uint64_t seed)
      : config_(config), seed_(seed) {}

  void append(std::span<const GroupOutcome> groups) {
    const std::int64_t k = config_.k();
    std::int64_t offset = 0;
    cycle_starts_.push_back(cycle_starts_.empty()
                                ? 0
                                : cycle_starts_.back() + cycle_lengths_.back());
    for (const auto& g : groups) {
      group_times_.push_back(static_cast<std::int32_t>(g.group_service_time));
      group_starts_.push_back(offset);
      for (std::int64_t j = 1; j <= k; ++j) {
        service_times_.push_back(
            static_cast<std::int32_t>(source_service_time(g.has_positive, j, k)));
      }
      offset += g.group_service_time;
    }
    cycle_lengths_.push_back(offset);
  }

  const SystemConfig& config() const { return config_; }
  std::uint64_t seed() const { return seed_; }
  std::int64_t num_cycles() const { return static_cast<std::int64_t>(cycle_lengths_.size()); }

  std::int64_t cycle_length(std::int64_t l) const { return cycle_lengths_[idx(l)]; }
  std::int64_t cycle_start(std::int64_t l) const { return cycle_starts_[idx(l)]; }
  std::int64_t group_time(std::int64_t l, std::int64_t i) const {
    return group_times_[idx(l * config_.m() + i)];
  }
  // Offset of group i's service window from the start of cycle l.
  std::int64_t group_start(std::int64_t l, std::int64_t i) const {
    return group_starts_[idx(l * config_.m() + i)];
  }
  std::int64_t service_time(std::int64_t l, std::int64_t i, std::int64_t j) const {
    return service_times_[idx((l * config_.m() + i) * config_.k() + j)];
  }
  std::int64_t delivery_offset(std::int64_t l, std::int64_t i, std::int64_t j) const {
    return group_start(l, i) + service_time(l, i, j);
  }
  // Absolute instants on the back-to-back cycle timeline.
  std::int64_t generation_instant(std::int64_t l, std::int64_t i) const {
    return cycle_start(l) + group_start(l, i);
  }
  std::int64_t delivery_instant(std::int64_t l, std::int64_t i, std::int64_t j) const {
    return cycle_start(l) + delivery_offset(l, i, j);
  }

  std::span<const std::int64_t> cycle_lengths() const { return cycle_lengths_; }
  std::span<const std::int32_t> group_times(std::int64_t l) const {
    return std::span<const std::int32_t>(group_times_)
        .subspan(idx(l * config_.m()), idx(config_.m()));
  }

 private:
  static std::size_t idx(std::int64_t v) { return static_cast<std::size_t>(v); }

  SystemConfig config_;
  std::uint64_t seed_;
  std::vector<std::int32_t> group_times_;
  std::vector<std::int64_t> group_starts_;
  std::vector<std::int32_t> service_times_;
  std::vector<std::int64_t> cycle_lengths_;
  std::vector<std::int64_t> cycle_starts_;
};

inline CycleTrace simulate_cycles(const SystemConfig& config, std::int64_t num_cycles,
                                  std::uint64_t seed) {
  CycleTrace trace(config, seed);
  simulate_stream(config, num_cycles, seed,
                  [&](std::span<const GroupOutcome> groups) { trace.append(groups); });
  return trace;
}

struct AgeSummary {
  std::int64_t groups = 0;
  std::int64_t group_size = 0;
  std::vector<double> per_source_age;  // row-major groups x group_size
  double overall_age = 0.0;
  double standard_error = 0.0;
  std::int64_t num_cycles = 0;
  std::uint64_t seed = 0;

  double source_age(std::int64_t i, std::int64_t j) const {
    return per_source_age[static_cast<std::size_t>(i * group_size + j)];
  }
};

/// Running sums behind every simulation estimate; needs O(n) memory
/// regardless of the number of cycles.
///
/// For source (i, j) the renewal interval ending at cycle l is
/// Y(l) = G_i(l) - G_i(l-1), where G_i(l) is the instant group i starts
/// service in cycle l. Its age area is Y^2/2 + Y S_ij(l), and the time-average
/// age is the ratio of summed areas to summed intervals over the N-1 complete
/// intervals. The first cycle only seeds G_i.
class AgeAccumulator {
 public:
  AgeAccumulator(const SystemConfig& config, std::uint64_t seed)
      : config_(config),
        seed_(seed),
        last_generation_(static_cast<std::size_t>(config.m()), 0),
        sum_y_(static_cast<std::size_t>(config.m()), 0.0),
        sum_y2_(static_cast<std::size_t>(config.m()), 0.0),
        sum_s_(static_cast<std::size_t>(config.n()), 0.0),
        sum_s2_(static_cast<std::size_t>(config.n()), 0.0),
        sum_ys_(static_cast<std::size_t>(config.n()), 0.0) {}

  void add_cycle(std::span<const GroupOutcome> groups) {
    const std::int64_t m = config_.m();
    const std::int64_t k = config_.k();
    const auto n = static_cast<double>(config_.n());
    if (static_cast<std::int64_t>(groups.size()) != m) {
      throw SizeError("add_cycle: expected one outcome per group");
    }
    const bool complete = cycles_ > 0;
    double area_total = 0.0;
    double interval_total = 0.0;
    std::int64_t offset = 0;
    double service_total = 0.0;
    for (std::int64_t i = 0; i < m; ++i) {
      const auto& g = groups[static_cast<std::size_t>(i)];
      const std::int64_t generation = clock_ + offset;
      const auto y = static_cast<double>(generation - last_generation_[u(i)]);
      if (complete) {
        sum_y_[u(i)] += y;
        sum_y2_[u(i)] += y * y;
        interval_total += y * static_cast<double>(k);
        area_total += 0.5 * y * y * static_cast<double>(k);
      }
      for (std::int64_t j = 0; j < k; ++j) {
        const auto s = static_cast<double>(source_service_time(g.has_positive, j + 1, k));
        service_total += s;
        if (complete) {
          const std::size_t src = u(i * k + j);
          sum_s_[src] += s;
          sum_s2_[src] += s * s;
          sum_ys_[src] += y * s;
          area_total += y * s;
        }
      }
      last_generation_[u(i)] = generation;
      offset += g.group_service_time;
    }

    const auto cycle = static_cast<double>(offset);
    sum_cycle_ += cycle;
    sum_cycle2_ += cycle * cycle;
    sum_service_ += service_total;
    clock_ += offset;
    ++cycles_;

    if (complete) {
      // Per-cycle source averages for the standard error.
      const double a = area_total / n;
      const double b = interval_total / n;
      agg_a_ += a;
      agg_b_ += b;
      agg_aa_ += a * a;
      agg_bb_ += b * b;
      agg_ab_ += a * b;
      if (intervals() > 1) {
        lag_aa_ += a * prev_a_;
        lag_bb_ += b * prev_b_;
        lag_ab_ += a * prev_b_;
        lag_ba_ += b * prev_a_;
      }
      prev_a_ = a;
      prev_b_ = b;
    }
  }

  const SystemConfig& config() const { return config_; }
  std::int64_t num_cycles() const { return cycles_; }
  std::int64_t intervals() const { return std::max<std::int64_t>(cycles_ - 1, 0); }

  /// Time-average age per source and overall.
  ///
  /// The standard error linearizes the pooled ratio (delta method) over the
  /// per-cycle source-averaged areas and intervals. Consecutive intervals
  /// share one cycle's draws, so the variance includes the lag-1
  /// autocovariance. Approximate.
  AgeSummary summary() const {
    if (cycles_ < 2) {
      throw InsufficientDataError("age estimate needs at least 2 cycles");
    }
    const std::int64_t m = config_.m();
    const std::int64_t k = config_.k();
    AgeSummary out;
    out.groups = m;
    out.group_size = k;
    out.num_cycles = cycles_;
    out.seed = seed_;
    out.per_source_age.resize(u(config_.n()));
    double total = 0.0;
    for (std::int64_t i = 0; i < m; ++i) {
      for (std::int64_t j = 0; j < k; ++j) {
        const std::size_t src = u(i * k + j);
        const double area = 0.5 * sum_y2_[u(i)] + sum_ys_[src];
        out.per_source_age[src] = area / sum_y_[u(i)];
        total += out.per_source_age[src];
      }
    }
    out.overall_age = total / static_cast<double>(config_.n());

    const auto count = static_cast<double>(intervals());
    const double ratio = agg_a_ / agg_b_;
    const double mean_b = agg_b_ / count;
    const double gamma0 = (agg_aa_ - 2.0 * ratio * agg_ab_ + ratio * ratio * agg_bb_) / count;
    double gamma1 = 0.0;
    if (intervals() > 1) {
      gamma1 = (lag_aa_ - ratio * (lag_ab_ + lag_ba_) + ratio * ratio * lag_bb_) /
               (count - 1.0);
    }
    const double var = std::max(gamma0 + 2.0 * gamma1, 0.0);
    out.standard_error = std::sqrt(var / count) / mean_b;
    return out;
  }

  /// Sample moments of the cycle length and mean service time over all cycles.
  MomentSet moments() const {
    if (cycles_ < 1) throw InsufficientDataError("moments need at least 1 cycle");
    MomentSet out;
    const auto count = static_cast<double>(cycles_);
    out.mean_cycle = sum_cycle_ / count;
    out.second_moment_cycle = sum_cycle2_ / count;
    out.mean_service = sum_service_ / (count * static_cast<double>(config_.n()));
    out.average_age = age_from_moments(out.mean_cycle, out.second_moment_cycle, out.mean_service);
    out.source_label = MomentSource::kSimulation;
    return out;
  }

  /// Largest absolute sample correlation, over sources, between the renewal
  /// interval Y_ij(l) and the service time S_ij(l) that closes it. Zero
  /// variance on either side counts as zero correlation.
  double max_abs_cross_correlation() const {
    if (cycles_ < 2) throw InsufficientDataError("cross-term check needs at least 2 cycles");
    const auto count = static_cast<double>(intervals());
    const std::int64_t k = config_.k();
    double worst = 0.0;
    for (std::int64_t i = 0; i < config_.m(); ++i) {
      const double my = sum_y_[u(i)] / count;
      const double vy = sum_y2_[u(i)] / count - my * my;
      for (std::int64_t j = 0; j < k; ++j) {
        const std::size_t src = u(i * k + j);
        const double ms = sum_s_[src] / count;
        const double vs = sum_s2_[src] / count - ms * ms;
        if (vy <= 0.0 || vs <= 0.0) continue;
        const double cov = sum_ys_[src] / count - my * ms;
        worst = std::max(worst, std::abs(cov / std::sqrt(vy * vs)));
      }
    }
    return worst;
  }

 private:
  static std::size_t u(std::int64_t v) { return static_cast<std::size_t>(v); }

  SystemConfig config_;
  std::uint64_t seed_;
  std::int64_t cycles_ = 0;
  std::int64_t clock_ = 0;

  std::vector<std::int64_t> last_generation_;
  std::vector<double> sum_y_;
  std::vector<double> sum_y2_;
  std::vector<double> sum_s_;
  std::vector<double> sum_s2_;
  std::vector<double> sum_ys_;

  double sum_cycle_ = 0.0;
  double sum_cycle2_ = 0.0;
  double sum_service_ = 0.0;

  double agg_a_ = 0.0, agg_b_ = 0.0;
  double agg_aa_ = 0.0, agg_bb_ = 0.0, agg_ab_ = 0.0;
  double lag_aa_ = 0.0, lag_bb_ = 0.0, lag_ab_ = 0.0, lag_ba_ = 0.0;
  double prev_a_ = 0.0, prev_b_ = 0.0;
};

inline AgeAccumulator replay(const CycleTrace& trace) {
  const SystemConfig& c = trace.config();
  AgeAccumulator acc(c, trace.seed());
  std::vector<GroupOutcome> outcomes(static_cast<std::size_t>(c.m()));
  for (std::int64_t l = 0; l < trace.num_cycles(); ++l) {
    for (std::int64_t i = 0; i < c.m(); ++i) {
      const auto w = trace.group_time(l, i);
      outcomes[static_cast<std::size_t>(i)] = GroupOutcome{w != 1, w};
    }
    acc.add_cycle(outcomes);
  }
  return acc;
}

inline AgeSummary empirical_average_age(const CycleTrace& trace) {
  if (trace.num_cycles() < 2) {
    throw InsufficientDataError("empirical_average_age needs at least 2 cycles");
  }
  return replay(trace).summary();
}

inline MomentSet empirical_moments(const CycleTrace& trace) {
  if (trace.num_cycles() < 1) throw InsufficientDataError("empty trace");
  return replay(trace).moments();
}

inline double cross_term_check(const CycleTrace& trace) {
  return replay(trace).max_abs_cross_correlation();
}

/// Low-memory run: simulates and accumulates without keeping the trace.
inline AgeAccumulator simulate_accumulate(const SystemConfig& config, std::int64_t num_cycles,
                                          std::uint64_t seed) {
  AgeAccumulator acc(config, seed);
  simulate_stream(config, num_cycles, seed,
                  [&](std::span<const GroupOutcome> groups) { acc.add_cycle(groups); });
  return acc;
}

}  // namespace groupage
