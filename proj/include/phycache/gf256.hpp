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

#ifndef PHYCACHE_GF256_HPP_
#define PHYCACHE_GF256_HPP_

#include <array>
#include <cstddef>
#include <cstdint>

namespace phycache::gf256 {

// Field generated by x^8 + x^4 + x^3 + x^2 + 1 with primitive element 2.
struct Tables {
  std::array<std::uint8_t, 512> exp{};
  std::array<std::uint8_t, 256> log{};
};

constexpr Tables make_tables() {
  Tables t{};
  unsigned x = 1;
  for (int i = 0; i < 255; ++i) {
    t.exp[i] = static_cast<std::uint8_t>(x);
    t.log[x] = static_cast<std::uint8_t>(i);
    x <<= 1;
    if (x & 0x100) x ^= 0x11d;
  }
  for (int i = 255; i < 512; ++i) t.exp[i] = t.exp[i - 255];
  return t;
}

inline constexpr Tables kTables = make_tables();

constexpr std::uint8_t add(std::uint8_t a, std::uint8_t b) { return a ^ b; }

constexpr std::uint8_t mul(std::uint8_t a, std::uint8_t b) {
  if (a == 0 || b == 0) return 0;
  return kTables.exp[kTables.log[a] + kTables.log[b]];
}

constexpr std::uint8_t inv(std::uint8_t a) {
  return kTables.exp[255 - kTables.log[a]];
}

constexpr std::uint8_t div(std::uint8_t a, std::uint8_t b) {
  if (a == 0) return 0;
  return kTables.exp[kTables.log[a] + 255 - kTables.log[b]];
}

/// y += a * x over n bytes.
inline void axpy(std::uint8_t a, const std::uint8_t* x, std::uint8_t* y,
                 std::size_t n) {
  if (a == 0) return;
  const unsigned la = kTables.log[a];
  for (std::size_t i = 0; i < n; ++i)
    if (x[i]) y[i] ^= kTables.exp[la + kTables.log[x[i]]];
}

/// x *= a over n bytes.
inline void scale(std::uint8_t a, std::uint8_t* x, std::size_t n) {
  if (a == 1) return;
  if (a == 0) {
    for (std::size_t i = 0; i < n; ++i) x[i] = 0;
    return;
  }
  const unsigned la = kTables.log[a];
  for (std::size_t i = 0; i < n; ++i)
    if (x[i]) x[i] = kTables.exp[la + kTables.log[x[i]]];
}

}  // namespace phycache::gf256

#endif  // PHYCACHE_GF256_HPP_
