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
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "groupage/analytic.hpp"
#include "groupage/model.hpp"
#include "groupage/optimize.hpp"
#include "groupage/sim.hpp"

// Experiment recipes behind the command-line tool. Each writer emits one CSV
// table: header row, comma separated, reals with 12 significant digits, rows
// sorted by their key columns.
namespace groupage::experiments {

// Bad flag values or inconsistent parameters.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kAnalyticMismatch = 2,
  kStatisticalMismatch = 3,
  kIoError = 4,
};

inline std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

namespace detail {

inline std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.emplace_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw UsageError("not a number: '" + s + "'");
  return v;
}

inline std::int64_t parse_int(const std::string& s) {
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size()) throw UsageError("not an integer: '" + s + "'");
  return v;
}

// Snap to the 12-significant-digit value that will be printed.
inline double snap(double v) { return std::strtod(format_real(v).c_str(), nullptr); }

inline double checked_p(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw UsageError("p must lie in [0, 1], got " + format_real(p));
  return p;
}

}  // namespace detail

/// "0.01,0.1,0.2" or an inclusive grid "start:stop:step".
inline std::vector<double> parse_p_list(std::string_view text) {
  std::vector<double> out;
  if (text.find(':') != std::string_view::npos) {
    const auto parts = detail::split(text, ':');
    if (parts.size() != 3) throw UsageError("p grid must be start:stop:step");
    const double start = detail::parse_double(parts[0]);
    const double stop = detail::parse_double(parts[1]);
    const double step = detail::parse_double(parts[2]);
    if (!(step > 0.0) || stop < start) throw UsageError("p grid needs step > 0 and stop >= start");
    const auto count = static_cast<std::int64_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (std::int64_t i = 0; i < count; ++i) {
      out.push_back(detail::checked_p(detail::snap(start + static_cast<double>(i) * step)));
    }
  } else {
    for (const auto& part : detail::split(text, ',')) {
      out.push_back(detail::checked_p(detail::parse_double(part)));
    }
  }
  return out;
}

/// "120", "12,24,48" or an inclusive range "start:stop:step".
inline std::vector<std::int64_t> parse_n_range(std::string_view text) {
  std::vector<std::int64_t> out;
  if (text.find(':') != std::string_view::npos) {
    const auto parts = detail::split(text, ':');
    if (parts.size() != 3) throw UsageError("n range must be start:stop:step");
    const auto start = detail::parse_int(parts[0]);
    const auto stop = detail::parse_int(parts[1]);
    const auto step = detail::parse_int(parts[2]);
    if (step < 1 || stop < start) throw UsageError("n range needs step >= 1 and stop >= start");
    for (auto n = start; n <= stop; n += step) out.push_back(n);
  } else {
    for (const auto& part : detail::split(text, ',')) out.push_back(detail::parse_int(part));
  }
  for (auto n : out) {
    if (n < 1) throw UsageError("n must be >= 1");
  }
  return out;
}

inline std::vector<std::uint64_t> parse_seeds(std::string_view text) {
  std::vector<std::uint64_t> out;
  for (auto n : parse_n_range(text)) out.push_back(static_cast<std::uint64_t>(n));
  return out;
}

namespace detail {

inline std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

inline void check_n(std::int64_t n) {
  if (n < 1) throw UsageError("n must be >= 1");
}

}  // namespace detail

/// Average age versus every divisor k, per p, next to the round-robin age.
inline void write_age_vs_k(std::ostream& out, std::int64_t n, const std::vector<double>& p_list) {
  detail::check_n(n);
  out << "p,k,delta_group_updating,delta_round_robin,is_optimal\n";
  const std::string rr = format_real(round_robin_age(n));
  for (double p : detail::sorted_unique(p_list)) {
    const auto result = optimal_group_size_updating(n, p);
    for (const auto& c : result.candidates) {
      out << format_real(p) << ',' << c.k << ',' << format_real(c.objective) << ',' << rr << ','
          << (c.k == result.optimal_k ? 1 : 0) << '\n';
    }
  }
}

/// Minimum age over k versus population size n.
inline void write_age_vs_n(std::ostream& out, const std::vector<std::int64_t>& n_list,
                           const std::vector<double>& p_list) {
  auto ns = n_list;
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  out << "p,n,k_star,delta_at_kstar,delta_round_robin\n";
  for (double p : detail::sorted_unique(p_list)) {
    for (auto n : ns) {
      detail::check_n(n);
      const auto result = optimal_group_size_updating(n, p);
      out << format_real(p) << ',' << n << ',' << result.optimal_k << ','
          << format_real(result.objective_at_optimum) << ',' << format_real(round_robin_age(n))
          << '\n';
    }
  }
}

/// Age and expected updates per cycle on the same divisor grid.
inline void write_compare_metrics(std::ostream& out, std::int64_t n,
                                  const std::vector<double>& p_list) {
  detail::check_n(n);
  out << "p,k,delta,expected_updates,is_gu_optimal,is_gt_optimal\n";
  for (double p : detail::sorted_unique(p_list)) {
    const auto gu = optimal_group_size_updating(n, p);
    const auto gt = optimal_group_size_testing(n, p);
    for (const auto& c : gu.candidates) {
      const double updates = expected_cycle_length(SystemConfig(n, p, c.k));
      out << format_real(p) << ',' << c.k << ',' << format_real(c.objective) << ','
          << format_real(updates) << ',' << (c.k == gu.optimal_k ? 1 : 0) << ','
          << (c.k == gt.optimal_k ? 1 : 0) << '\n';
    }
  }
}

inline void write_kstar_vs_p(std::ostream& out, std::int64_t n, const std::vector<double>& p_list) {
  detail::check_n(n);
  out << "p,k_gu_star,k_gt_star\n";
  for (const auto& row : kstar_sweep(n, detail::sorted_unique(p_list))) {
    out << format_real(row.p) << ',' << row.k_updating << ',' << row.k_testing << '\n';
  }
}

/// One simulation replication per seed, next to the closed-form values.
inline void write_simulate(std::ostream& out, const SystemConfig& config, std::int64_t cycles,
                           std::vector<std::uint64_t> seeds) {
  if (cycles < 2) throw UsageError("--cycles must be >= 2 for age estimates");
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
  const auto exact = closed_form_moments(config);
  out << "seed,n,k,p,cycles,age_estimate,standard_error,age_closed_form,mean_cycle,"
         "second_moment_cycle,mean_service\n";
  for (auto seed : seeds) {
    const auto acc = simulate_accumulate(config, cycles, seed);
    const auto age = acc.summary();
    const auto mom = acc.moments();
    out << seed << ',' << config.n() << ',' << config.k() << ',' << format_real(config.p())
        << ',' << cycles << ',' << format_real(age.overall_age) << ','
        << format_real(age.standard_error) << ',' << format_real(exact.average_age) << ','
        << format_real(mom.mean_cycle) << ',' << format_real(mom.second_moment_cycle) << ','
        << format_real(mom.mean_service) << '\n';
  }
}

inline constexpr double kOracleTolerance = 1e-9;
inline constexpr double kStandardErrorBand = 3.0;

inline double relative_error(double value, double reference) {
  if (value == reference) return 0.0;
  return std::abs(value - reference) / std::max(std::abs(reference), 1e-300);
}

/// Closed form vs convolution oracle vs enumeration oracle vs simulation.
/// Writes a human-readable report and returns the process exit code.
inline int run_validate(std::ostream& report, const SystemConfig& config, std::int64_t cycles,
                        std::vector<std::uint64_t> seeds) {
  if (cycles < 2) throw UsageError("--cycles must be >= 2");
  if (seeds.empty()) throw UsageError("--seeds must name at least one seed");
  bool analytic_ok = true;
  bool statistical_ok = true;

  const auto exact = closed_form_moments(config);
  report << "config n=" << config.n() << " k=" << config.k() << " p=" << format_real(config.p())
         << '\n';
  report << "closed form: E[Y]=" << format_real(exact.mean_cycle)
         << " E[Y^2]=" << format_real(exact.second_moment_cycle)
         << " E[S]=" << format_real(exact.mean_service)
         << " age=" << format_real(exact.average_age) << '\n';

  auto compare = [&](const MomentSet& oracle) {
    const double worst = std::max({relative_error(exact.mean_cycle, oracle.mean_cycle),
                                   relative_error(exact.second_moment_cycle,
                                                  oracle.second_moment_cycle),
                                   relative_error(exact.mean_service, oracle.mean_service),
                                   relative_error(exact.average_age, oracle.average_age)});
    const bool ok = worst <= kOracleTolerance;
    report << (ok ? "PASS " : "FAIL ") << to_string(oracle.source_label)
           << ": max relative error " << format_real(worst) << '\n';
    analytic_ok = analytic_ok && ok;
  };
  compare(convolution_oracle(config));
  if (config.n() <= kMaxEnumerationSources) {
    compare(enumeration_oracle(config));
  } else {
    report << "SKIP enumeration-oracle: n=" << config.n() << " exceeds "
           << kMaxEnumerationSources << '\n';
  }

  std::sort(seeds.begin(), seeds.end());
  for (auto seed : seeds) {
    const auto age = simulate_accumulate(config, cycles, seed).summary();
    const double diff = std::abs(age.overall_age - exact.average_age);
    // A zero standard error means a deterministic run, which must hit exactly.
    const bool ok = age.standard_error > 0.0
                        ? diff <= kStandardErrorBand * age.standard_error
                        : relative_error(age.overall_age, exact.average_age) <= 1e-12;
    report << (ok ? "PASS " : "FAIL ") << "simulation seed=" << seed
           << ": estimate=" << format_real(age.overall_age)
           << " se=" << format_real(age.standard_error) << " |diff|=" << format_real(diff) << '\n';
    statistical_ok = statistical_ok && ok;
  }

  if (!analytic_ok) return kAnalyticMismatch;
  if (!statistical_ok) return kStatisticalMismatch;
  return kOk;
}

}  // namespace groupage::experiments
