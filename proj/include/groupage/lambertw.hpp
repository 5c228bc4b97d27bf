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
#include <limits>
#include <numbers>
#include <string>

#include "groupage/errors.hpp"

/// Real Lambert W on the principal (W0) and lower (W-1) branches.
///
/// Both branches start from a branch-point series when the argument is close
/// to -1/e and from the usual log-based asymptotic guess elsewhere, then
/// polish with Halley's iteration on f(w) = w e^w - y.
namespace groupage::lambertw {

inline constexpr double kBranchPoint = -1.0 / std::numbers::e;
inline constexpr int kMaxIterations = 100;

namespace detail {

// Arguments this close below -1/e are rounding noise around the branch point.
inline constexpr double kBranchSlack = 8.0 * std::numeric_limits<double>::epsilon();

inline bool at_branch_point(double y) {
  return y <= kBranchPoint + kBranchSlack && y >= kBranchPoint - kBranchSlack;
}

// W = -1 + s - s^2/3 + 11/72 s^3 - 43/540 s^4, s = +-sqrt(2(1 + e y)).
inline double branch_series(double y, bool principal) {
  const double t = std::fma(std::numbers::e, y, 1.0);
  const double s = (principal ? 1.0 : -1.0) * std::sqrt(2.0 * std::max(t, 0.0));
  return -1.0 + s * (1.0 + s * (-1.0 / 3.0 + s * (11.0 / 72.0 - s * 43.0 / 540.0)));
}

inline double halley(double y, double w, const char* name) {
  for (int it = 0; it < kMaxIterations; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - y;
    // Near the branch point f' vanishes and w can only be pinned to the
    // rounding level of the residual.
    if (std::abs(f) <= 2.0 * std::numeric_limits<double>::epsilon() * std::abs(y)) return w;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) return w;
    const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    if (denom == 0.0 || !std::isfinite(denom)) return w;
    const double step = f / denom;
    w -= step;
    if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(w))) {
      return w;
    }
  }
  throw ConvergenceError(std::string(name) + ": no convergence for y=" + std::to_string(y));
}

}  // namespace detail

/// Principal branch, defined for y >= -1/e. Returns W0(y) >= -1.
inline double w0(double y) {
  if (std::isnan(y)) throw DomainError("lambert_w0: NaN argument");
  if (detail::at_branch_point(y)) return -1.0;
  if (y < kBranchPoint) {
    throw DomainError("lambert_w0: argument " + std::to_string(y) + " below -1/e");
  }
  if (y == 0.0) return 0.0;
  if (std::isinf(y)) return y;

  double guess;
  if (y < -0.25) {
    guess = detail::branch_series(y, true);
  } else if (y < 3.0) {
    guess = std::log1p(y);
  } else {
    const double l1 = std::log(y);
    const double l2 = std::log(l1);
    guess = l1 - l2 + l2 / l1;
  }
  const double w = detail::halley(y, guess, "lambert_w0");
  return y < 0.0 ? std::clamp(w, -1.0, 0.0) : w;
}

/// Lower branch, defined for -1/e <= y < 0. Returns W-1(y) <= -1.
inline double wm1(double y) {
  if (std::isnan(y)) throw DomainError("lambert_wm1: NaN argument");
  if (detail::at_branch_point(y)) return -1.0;
  if (y < kBranchPoint || y >= 0.0) {
    throw DomainError("lambert_wm1: argument " + std::to_string(y) +
                      " outside [-1/e, 0)");
  }

  double guess;
  if (y < -0.25) {
    guess = detail::branch_series(y, false);
  } else {
    const double l1 = std::log(-y);
    const double l2 = std::log(-l1);
    guess = l1 - l2 + l2 / l1;
  }
  const double w = detail::halley(y, guess, "lambert_wm1");
  return std::min(w, -1.0);
}

enum class Branch { kPrincipal, kMinusOne };

struct BranchValue {
  double argument = 0.0;
  double value = 0.0;
  Branch branch = Branch::kPrincipal;
};

inline BranchValue evaluate(double y, Branch branch) {
  return BranchValue{y, branch == Branch::kPrincipal ? w0(y) : wm1(y), branch};
}

}  // namespace groupage::lambertw

namespace groupage {

inline double lambert_w0(double y) { return lambertw::w0(y); }
inline double lambert_wm1(double y) { return lambertw::wm1(y); }

}  // namespace groupage
