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

#include <cstdint>
#include <limits>
#include <random>

namespace groupage {

/// Seedable, splittable random stream.
///
/// Wraps a 64-bit Mersenne Twister whose output sequence is fixed by the
/// C++ standard, so a given seed yields the same draws on every platform.
/// `split()` derives an independent child stream through a SplitMix64 mix of
/// the parent's next output; streams are single-owner and never shared.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(mix(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Bernoulli(p) draw. p <= 0 never fires, p >= 1 always fires.
  bool bernoulli(double p) { return uniform() < p; }

  RandomStream split() { return RandomStream(next_u64() ^ kSplitSalt); }

 private:
  static constexpr std::uint64_t kSplitSalt = 0x6a09e667f3bcc909ULL;

  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  std::mt19937_64 engine_;
};

}  // namespace groupage
