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

#ifndef PHYCACHE_REPLICATION_HPP_
#define PHYCACHE_REPLICATION_HPP_

#include <algorithm>
#include <cmath>
#include <vector>

#include "phycache/error.hpp"

namespace phycache {

/// min_q sum_l p_l / sqrt(q_l)  s.t.  sum_l q_l <= budget,  1/N <= q_l <= 1.
struct ReplicationProblem {
  std::vector<double> p;
  double N = 1.0;
  double budget = 1.0;  // B_C / F

  int L() const { return static_cast<int>(p.size()); }
  double lower() const { return 1.0 / N; }
};

/// Rejects libraries whose files differ in size.
inline double common_file_size(const std::vector<double>& sizes) {
  if (sizes.empty()) fail(Errc::invalid_argument, "no files");
  for (double f : sizes)
    if (f != sizes.front())
      fail(Errc::invalid_argument, "heterogeneous file sizes are not supported");
  return sizes.front();
}

inline double objective(const std::vector<double>& q,
                        const std::vector<double>& p) {
  if (q.size() != p.size()) fail(Errc::invalid_argument, "size mismatch");
  double s = 0.0;
  for (size_t l = 0; l < q.size(); ++l) {
    if (!(q[l] > 0.0)) fail(Errc::domain_error, "q_l must be positive");
    s += p[l] / std::sqrt(q[l]);
  }
  return s;
}

inline double sum_p_two_thirds(const std::vector<double>& p) {
  double s = 0.0;
  for (double v : p) s += std::cbrt(v * v);
  return s;
}

/// Minimiser without the box constraints.
inline std::vector<double> solve_relaxed(const std::vector<double>& p,
                                         double budget) {
  if (!(budget > 0.0)) fail(Errc::invalid_argument, "budget must be positive");
  const double z = sum_p_two_thirds(p);
  std::vector<double> q(p.size());
  for (size_t l = 0; l < p.size(); ++l) q[l] = budget * std::cbrt(p[l] * p[l]) / z;
  return q;
}

inline double relaxed_optimum(const std::vector<double>& p, double budget) {
  return std::sqrt(1.0 / budget) * std::pow(sum_p_two_thirds(p), 1.5);
}

struct ConstrainedSolution {
  std::vector<double> q;
  double lambda = 0.0;
  double budget_residual = 0.0;  // |sum q - budget| when the budget binds
  double kkt_residual = 0.0;     // worst stationarity / sign violation
};

namespace detail {

inline double clamp_q(double p, double lambda, double lo) {
  if (lambda <= 0.0) return 1.0;
  return std::clamp(std::cbrt((p / (2.0 * lambda)) * (p / (2.0 * lambda))), lo,
                    1.0);
}

inline double total_q(const std::vector<double>& p, double lambda, double lo) {
  double s = 0.0;
  for (double v : p) s += clamp_q(v, lambda, lo);
  return s;
}

}  // namespace detail

/// Dual bisection on the budget multiplier with per-file clamping
///   q_l = clamp((p_l / (2 lambda))^(2/3), 1/N, 1),
/// followed by an exact solve for lambda on the free coordinates.
inline ConstrainedSolution solve_constrained(const ReplicationProblem& pr,
                                             double tol = 1e-10) {
  const int L = pr.L();
  const double lo = pr.lower();
  if (L * lo > pr.budget * (1.0 + 1e-12))
    fail(Errc::infeasible, "budget below L/N");
  ConstrainedSolution out;
  if (pr.budget >= L) {
    out.q.assign(L, 1.0);
    return out;
  }
  if (L * lo >= pr.budget) {
    out.q.assign(L, lo);
    out.lambda = 0.0;
    for (double v : pr.p) out.lambda = std::max(out.lambda, 0.5 * v / std::pow(lo, 1.5));
    return out;
  }
  // sum q(lambda) is non-increasing; bracket in log space.
  double a = 1e-300, b = 1.0;
  while (detail::total_q(pr.p, b, lo) > pr.budget) b *= 4.0;
  a = b;
  while (detail::total_q(pr.p, a, lo) < pr.budget && a > 1e-300) a /= 4.0;
  for (int it = 0; it < 400; ++it) {
    const double mid = std::sqrt(a * b);
    if (mid <= a || mid >= b) break;
    if (detail::total_q(pr.p, mid, lo) > pr.budget)
      a = mid;
    else
      b = mid;
    if (b / a - 1.0 < 1e-15) break;
  }
  double lambda = std::sqrt(a * b);
  // Exact multiplier for the active set found by bisection.
  {
    double fixed = 0.0, free_mass = 0.0;
    for (double v : pr.p) {
      const double qv = detail::clamp_q(v, lambda, lo);
      if (qv <= lo || qv >= 1.0)
        fixed += qv;
      else
        free_mass += std::cbrt(v * v);
    }
    if (free_mass > 0.0 && pr.budget > fixed) {
      const double t = (pr.budget - fixed) / free_mass;  // (2 lambda)^(-2/3)
      const double exact = 0.5 * std::pow(t, -1.5);
      bool same = true;
      for (double v : pr.p) {
        const double raw = std::cbrt((v / (2.0 * exact)) * (v / (2.0 * exact)));
        const double cur = detail::clamp_q(v, lambda, lo);
        const bool was_free = cur > lo && cur < 1.0;
        const bool is_free = raw > lo && raw < 1.0;
        if (was_free != is_free) same = false;
      }
      if (same) lambda = exact;
    }
  }
  out.lambda = lambda;
  out.q.resize(L);
  double s = 0.0;
  for (int l = 0; l < L; ++l) s += out.q[l] = detail::clamp_q(pr.p[l], lambda, lo);
  out.budget_residual = std::fabs(s - pr.budget);
  double kkt = 0.0;
  for (int l = 0; l < L; ++l) {
    const double g = -0.5 * pr.p[l] / std::pow(out.q[l], 1.5) + lambda;
    const double scale = std::max(lambda, 1e-300);
    if (out.q[l] > lo * (1 + 1e-12) && out.q[l] < 1.0 - 1e-12)
      kkt = std::max(kkt, std::fabs(g) / scale);
    else if (out.q[l] <= lo * (1 + 1e-12))
      kkt = std::max(kkt, std::max(0.0, -g) / scale);
    else
      kkt = std::max(kkt, std::max(0.0, g) / scale);
  }
  out.kkt_residual = kkt;
  if (out.budget_residual > tol * std::max(1.0, pr.budget))
    fail(Errc::infeasible, "dual bisection did not meet the budget tolerance");
  return out;
}

inline std::vector<double> order_optimal_q(const std::vector<double>& p,
                                           double budget, double N) {
  const double L = static_cast<double>(p.size());
  if (!(budget > L / N)) fail(Errc::infeasible, "budget must exceed L/N");
  const double z = sum_p_two_thirds(p);
  std::vector<double> q(p.size());
  for (size_t l = 0; l < p.size(); ++l)
    q[l] = std::min((budget - L / N) * std::cbrt(p[l] * p[l]) / z + 1.0 / N, 1.0);
  return q;
}

inline std::vector<double> uniform_q(size_t L, double budget, double N) {
  const double v = budget / static_cast<double>(L);
  if (v < 1.0 / N) fail(Errc::infeasible, "uniform share below 1/N");
  return std::vector<double>(L, std::min(v, 1.0));
}

/// Budget at which the j-th most popular Zipf file (1-based) first reaches
/// q* = 1/2 under the order-optimal rule.
inline double comp_threshold_budget(double tau, int L, double N, int j = 1) {
  double s = 0.0;
  for (int l = L; l >= 1; --l) s += std::pow(static_cast<double>(l), -2.0 * tau / 3.0);
  return (0.5 - 1.0 / N) * std::pow(static_cast<double>(j), 2.0 * tau / 3.0) * s +
         static_cast<double>(L) / N;
}

}  // namespace phycache

#endif  // PHYCACHE_REPLICATION_HPP_
