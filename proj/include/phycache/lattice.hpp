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

// Power-law sums over square lattices.
//
// A quadrant sum  sum_{i,j>=1} ((a+i)^2 + (c+j)^2)^(-s)  is evaluated as an
// outer sum of row sums. Each row sum is exact up to rounding (direct terms
// plus an Euler-Maclaurin tail), and the outer sum is truncated at K rows
// with an asymptotic Hurwitz-zeta tail, so doubling K changes the value only
// by the next-order remainder O(K^(-2s-1)).

#ifndef PHYCACHE_LATTICE_HPP_
#define PHYCACHE_LATTICE_HPP_

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <array>
#include <cmath>

#include "phycache/error.hpp"

namespace phycache::lattice {

namespace detail {

// B_{2k} / (2k)! for k = 1..7.
inline constexpr std::array<double, 7> kBernoulliOverFactorial = {
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0};

}  // namespace detail

/// Hurwitz zeta  sum_{n>=0} (q+n)^(-s)  for s > 1, q > 0.
inline double hurwitz_zeta(double s, double q) {
  if (!(s > 1.0)) fail(Errc::divergent_sum, "hurwitz zeta needs s > 1");
  if (!(q > 0.0)) fail(Errc::domain_error, "hurwitz zeta needs q > 0");
  double sum = 0.0;
  double a = q;
  while (a < 16.0) {
    sum += std::pow(a, -s);
    a += 1.0;
  }
  sum += std::pow(a, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(a, -s);
  // Rising factorial s (s+1) ... (s+2k-2) times a^(-s-2k+1).
  double rise = s;
  double apow = std::pow(a, -s - 1.0);
  for (size_t k = 0; k < detail::kBernoulliOverFactorial.size(); ++k) {
    sum += detail::kBernoulliOverFactorial[k] * rise * apow;
    rise *= (s + 2 * k + 1) * (s + 2 * k + 2);
    apow /= a * a;
  }
  return sum;
}

/// Integral of (u^2 + b^2)^(-s) over [u0, inf), s > 1/2, u0 > 0.
inline double tail_integral(double u0, double b, double s) {
  if (b == 0.0) return std::pow(u0, 1.0 - 2.0 * s) / (2.0 * s - 1.0);
  const double t = u0 / b;
  const double x0 = 1.0 / (1.0 + t * t);
  return std::pow(b, 1.0 - 2.0 * s) * 0.5 *
         boost::math::beta(s - 0.5, 0.5, x0);
}

/// sum_{j>=1} ((c+j)^2 + b^2)^(-s) for c > -1 and s > 1/2.
inline double row_sum(double c, double b, double s) {
  constexpr int kDirect = 16;
  double sum = 0.0;
  for (int j = 1; j <= kDirect; ++j) {
    const double u = c + j;
    sum += std::pow(u * u + b * b, -s);
  }
  // Euler-Maclaurin from u0 on:
  //   sum_{j>J} f = int_{u0} f - f(u0)/2 - sum_k B_2k/(2k)! f^(2k-1)(u0).
  // Taylor coefficients of g^p with g(u0+h) = g0 + 2 u0 h + h^2 follow
  //   n g0 f_n = sum_{k=1,2} ((p+1) k - n) g_k f_{n-k}.
  const double u0 = c + kDirect;
  const double g0 = u0 * u0 + b * b;
  const double g1 = 2.0 * u0;
  const double p = -s;
  std::array<double, 14> f{};
  f[0] = std::pow(g0, p);
  for (int n = 1; n < 14; ++n) {
    double acc = ((p + 1.0) - n) * g1 * f[n - 1];
    if (n >= 2) acc += ((p + 1.0) * 2 - n) * f[n - 2];
    f[n] = acc / (n * g0);
  }
  double tail = tail_integral(u0, b, s) - 0.5 * f[0];
  double fact = 1.0;  // (2k-1)!
  for (int k = 1; k <= 7; ++k) {
    const int order = 2 * k - 1;
    if (order > 1) fact *= (order - 1) * order;
    tail -= detail::kBernoulliOverFactorial[k - 1] * fact * f[order];
  }
  return sum + tail;
}

/// sum_{i>=1} row_sum(c_col, c_row + i, s) with the first K rows exact and
/// the remainder replaced by its two-term large-row asymptotic
///   I0 (c_row+i)^(1-2s) - (c_col + 1/2) (c_row+i)^(-2s),
/// where I0 is the integral of (1+t^2)^(-s) over [0, inf).
inline double quadrant_sum(double c_row, double c_col, double s, int K) {
  double sum = 0.0;
  for (int i = 1; i <= K; ++i) sum += row_sum(c_col, c_row + i, s);
  const double i0 = std::sqrt(3.14159265358979323846) *
                    boost::math::tgamma_ratio(s - 0.5, s) / 2.0;
  const double q = c_row + K + 1;
  sum += i0 * hurwitz_zeta(2.0 * s - 1.0, q) -
         (c_col + 0.5) * hurwitz_zeta(2.0 * s, q);
  return sum;
}

/// Same-subband interference seen by a grid link under the 3x3 reuse
/// pattern, in units of r_0^(-alpha) (unit lattice spacing):
///   sum_i [sum_j 2((3i+1)^2 + 9j^2)^(-a/2) + (3i+1)^(-a)]
/// + sum_i [sum_j 2((3i-1)^2 + 9j^2)^(-a/2) + (3i-1)^(-a)]
/// + sum_i 2 (9i^2 + 1)^(-a/2).
inline double reuse9_interference_sum(double alpha, int K) {
  const double s = alpha / 2.0;
  const double nine = std::pow(9.0, -s);
  const double rows =
      2.0 * nine * (quadrant_sum(1.0 / 3.0, 0.0, s, K) +
                    quadrant_sum(-1.0 / 3.0, 0.0, s, K));
  const double axis = std::pow(3.0, -alpha) * (hurwitz_zeta(alpha, 4.0 / 3.0) +
                                               hurwitz_zeta(alpha, 2.0 / 3.0));
  const double column = 2.0 * nine * row_sum(0.0, 1.0 / 3.0, s);
  return rows + axis + column;
}

/// Aggregate gain from every opposite-colour node of a checkerboard with
/// unit spacing, i.e. sum over (a, b) with a + b odd of (a^2 + b^2)^(-alpha/2):
///   4 * 2^(-a/2) * sum_{i,j>=0} ((i+1/2)^2 + (j+1/2)^2)^(-a/2).
inline double checkerboard_gain_sum(double alpha, int K) {
  const double s = alpha / 2.0;
  return 4.0 * std::pow(2.0, -s) * quadrant_sum(-0.5, -0.5, s, K);
}

struct AdaptiveSum {
  double value = 0.0;
  int radius = 0;
  double tail_bound = 0.0;
};

/// Doubles the row truncation until successive values agree to tol.
template <class F>
AdaptiveSum adaptive(F&& sum_at, double tol, int start = 8,
                     int max_radius = 1 << 16) {
  AdaptiveSum out;
  int k = start;
  double prev = sum_at(k);
  while (true) {
    const double next = sum_at(2 * k);
    const double diff = std::fabs(next - prev);
    if (diff <= tol * std::fabs(next) || 2 * k >= max_radius) {
      out.value = next;
      out.radius = 2 * k;
      out.tail_bound = diff;
      return out;
    }
    prev = next;
    k *= 2;
  }
}

}  // namespace phycache::lattice

#endif  // PHYCACHE_LATTICE_HPP_
