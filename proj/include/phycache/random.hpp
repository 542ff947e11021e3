// Copyright 2026 The phycache Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PHYCACHE_RANDOM_HPP_
#define PHYCACHE_RANDOM_HPP_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace phycache {

using Rng = std::mt19937_64;

// Library distributions differ between standard library vendors, so the
// conversions used for reproducible output live here.
inline double uniform01(Rng& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline double uniform(Rng& g, double lo, double hi) {
  return lo + (hi - lo) * uniform01(g);
}

/// Unbiased integer in [0, n).
inline std::uint64_t uniform_index(Rng& g, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = g();
  } while (x >= limit);
  return x % n;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent stream seed from a base seed and a tuple of ids.
inline std::uint64_t derive_seed(std::uint64_t base,
                                 std::initializer_list<std::uint64_t> ids) {
  std::uint64_t h = splitmix64(base);
  for (std::uint64_t id : ids) h = splitmix64(h ^ splitmix64(id + 0x51ed27ULL));
  return h;
}

}  // namespace phycache

#endif  // PHYCACHE_RANDOM_HPP_
