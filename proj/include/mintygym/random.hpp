// Copyright 2026 The Mintygym Authors
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

#ifndef MINTYGYM_RANDOM_HPP_
#define MINTYGYM_RANDOM_HPP_

#include <cmath>
#include <cstdint>

#include "mintygym/common.hpp"

namespace mintygym {

// SplitMix64 (Steele, Lea, Flood). Portable across platforms and compilers:
// the output sequence is fully determined by the 64-bit state, unlike the
// standard-library distributions. Streams are split by hashing
// (seed, stream index) into a fresh state, so per-rollout substreams are
// independent of the degree of parallelism.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1): 53 mantissa bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on the open interval (0, 1).
  double next_open01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double next_uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  // Standard normal via Box-Muller on portable uniforms.
  double next_normal() {
    const double u1 = next_open01();
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  // Index into a categorical distribution given by `probs` (need not sum to
  // one; the residual mass maps to the sentinel value probs.size()).
  std::size_t next_categorical(const Vec& probs) {
    double u = next_double();
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (u < probs[i]) return i;
      u -= probs[i];
    }
    return probs.size();
  }

  static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
    SplitMix64 g(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
    return g.next_u64();
  }

  // Substream generator for rollout `stream` of the run seeded by `seed`.
  static SplitMix64 substream(std::uint64_t seed, std::uint64_t stream) {
    return SplitMix64(mix(seed, stream));
  }

 private:
  std::uint64_t state_;
};

// Uniform point on the probability simplex of dimension k (exponential
// spacings, normalized).
inline Vec random_simplex_point(SplitMix64& rng, int k) {
  Vec v(static_cast<std::size_t>(k));
  double total = 0.0;
  for (auto& x : v) {
    x = -std::log(rng.next_open01());
    total += x;
  }
  for (auto& x : v) x /= total;
  return v;
}

// Random unit vector of dimension k (normalized Gaussian).
inline Vec random_unit_vector(SplitMix64& rng, int k) {
  Vec v(static_cast<std::size_t>(k));
  double norm_sq = 0.0;
  do {
    norm_sq = 0.0;
    for (auto& x : v) {
      x = rng.next_normal();
      norm_sq += x * x;
    }
  } while (norm_sq < 1e-30);
  const double inv = 1.0 / std::sqrt(norm_sq);
  for (auto& x : v) x *= inv;
  return v;
}

}  // namespace mintygym

#endif  // MINTYGYM_RANDOM_HPP_
