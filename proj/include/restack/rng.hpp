// Copyright 2026 The restack Authors.
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

#ifndef RESTACK_RNG_HPP_
#define RESTACK_RNG_HPP_

#include <cmath>
#include <cstdint>

namespace restack {

// SplitMix64 (Steele, Lea & Flood 2014; public-domain reference constants).
// Used instead of <random> engines because the standard distributions are
// implementation-defined: identical seeds must give identical draws on every
// platform, and batch run r must be reachable as seed base + r.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1) with 53 bits of mantissa.
  double next_uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on [lo, hi).
  double next_uniform(double lo, double hi) {
    return lo + (hi - lo) * next_uniform01();
  }

  // Uniform integer in {0, ..., n-1}.
  int next_index(int n) {
    // Rejection-free modulo of a 53-bit draw; bias is negligible for the
    // small n used here (n <= a few hundred), but scale-from-double keeps
    // the draw identical across platforms.
    int i = static_cast<int>(next_uniform01() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }

  // Exponential with rate `rate` (mean 1/rate) via inverse CDF.
  double next_exponential(double rate) {
    // -log(1-u) with u in [0,1) never evaluates log at 0.
    return -std::log1p(-next_uniform01()) / rate;
  }

  // Derives an independent stream; `salt` separates the sub-streams of one
  // master seed (e.g. adversary draws vs. learner perturbation).
  SplitMix64 split(std::uint64_t salt) {
    SplitMix64 mix(state_ ^ (0x9e3779b97f4a7c15ULL * (salt + 1)));
    return SplitMix64(mix.next_u64());
  }

 private:
  std::uint64_t state_;
};

}  // namespace restack

#endif  // RESTACK_RNG_HPP_
