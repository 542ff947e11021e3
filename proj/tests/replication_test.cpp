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

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "phycache/coding.hpp"
#include "phycache/random.hpp"
#include "phycache/replication.hpp"

namespace phycache {
namespace {

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

// Feasible point drawn uniformly in the box, then pulled under the budget.
std::vector<double> random_feasible(Rng& g, int L, double lo, double budget) {
  std::vector<double> q(L);
  for (auto& v : q) v = uniform(g, lo, 1.0);
  const double excess = sum(q) - budget;
  if (excess > 0) {
    const double room = sum(q) - L * lo;
    for (auto& v : q) v -= (v - lo) * excess / room;
  }
  return q;
}

TEST(Objective, KnownValues) {
  EXPECT_DOUBLE_EQ(objective({1, 1, 1}, {0.2, 0.3, 0.5}), 1.0);
  EXPECT_DOUBLE_EQ(objective({0.25, 0.25, 0.25, 0.25}, {0.25, 0.25, 0.25, 0.25}), 2.0);
}

TEST(Objective, MatchesRecomputation) {
  Rng g(1);
  const auto p = zipf(30, 0.8).p;
  for (int t = 0; t < 50; ++t) {
    std::vector<double> q(30);
    for (auto& v : q) v = uniform(g, 0.01, 1);
    double want = 0;
    for (int l = 0; l < 30; ++l) want += p[l] * std::pow(q[l], -0.5);
    EXPECT_NEAR(objective(q, p), want, 1e-12 * want);
  }
}

TEST(Objective, RejectsNonPositive) {
  try {
    objective({0.5, 0.0}, {0.5, 0.5});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::domain_error);
  }
}

TEST(Relaxed, UniformPopularity) {
  const auto q = solve_relaxed({0.25, 0.25, 0.25, 0.25}, 2.0);
  for (double v : q) EXPECT_NEAR(v, 0.5, 1e-15);
}

TEST(Relaxed, TwoFileExample) {
  const auto q = solve_relaxed({0.8, 0.2}, 1.0);
  EXPECT_NEAR(q[0], 0.716, 5e-4);
  EXPECT_NEAR(q[1], 0.284, 5e-4);
  EXPECT_NEAR(objective(q, {0.8, 0.2}), relaxed_optimum({0.8, 0.2}, 1.0), 1e-10);
}

TEST(Relaxed, OptimumFormula) {
  for (double tau : {0.0, 0.5, 1.2}) {
    const auto p = zipf(40, tau).p;
    const auto q = solve_relaxed(p, 3.0);
    EXPECT_NEAR(objective(q, p), relaxed_optimum(p, 3.0), 1e-10);
  }
}

TEST(Constrained, InactiveBoxMatchesRelaxed) {
  const auto p = zipf(10, 0.5).p;
  ReplicationProblem pr{p, 1000, 2.0};
  const auto sol = solve_constrained(pr);
  const auto rel = solve_relaxed(p, 2.0);
  for (int l = 0; l < 10; ++l) EXPECT_NEAR(sol.q[l], rel[l], 1e-10);
  EXPECT_NEAR(objective(sol.q, p), relaxed_optimum(p, 2.0),
              1e-8 * relaxed_optimum(p, 2.0));
}

TEST(Constrained, TightBudgetForcesLowerBound) {
  const auto p = zipf(8, 1).p;
  const auto sol = solve_constrained({p, 16, 0.5});
  for (double v : sol.q) EXPECT_DOUBLE_EQ(v, 1.0 / 16);
}

TEST(Constrained, InfeasibleBudget) {
  try {
    solve_constrained({zipf(8, 1).p, 16, 0.4});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::infeasible);
  }
}

TEST(Constrained, KktAndBudgetResiduals) {
  Rng g(5);
  for (int t = 0; t < 100; ++t) {
    const int L = 2 + static_cast<int>(uniform_index(g, 60));
    const double N = 16 + uniform_index(g, 1000);
    const double budget = uniform(g, L / N * 1.01, 0.9 * L);
    const auto p = zipf(L, uniform(g, 0, 2.5)).p;
    const auto sol = solve_constrained({p, N, budget});
    EXPECT_LT(sol.budget_residual, 1e-10 * std::max(1.0, budget));
    EXPECT_LT(sol.kkt_residual, 1e-8);
    for (double v : sol.q) {
      EXPECT_GE(v, 1.0 / N * (1 - 1e-12));
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(Constrained, BeatsSampledFeasiblePoints) {
  Rng g(6);
  for (int t = 0; t < 20; ++t) {
    const int L = 12;
    const double N = 64, budget = uniform(g, 0.5, 6);
    const auto p = zipf(L, uniform(g, 0.2, 2)).p;
    const auto sol = solve_constrained({p, N, budget});
    const double best = objective(sol.q, p);
    EXPECT_LE(best, objective(order_optimal_q(p, budget, N), p) + 1e-12);
    for (int k = 0; k < 100; ++k)
      EXPECT_LE(best, objective(random_feasible(g, L, 1 / N, budget), p) + 1e-10);
  }
}

TEST(OrderOptimal, UniformPopularity) {
  const auto q = order_optimal_q({0.25, 0.25, 0.25, 0.25}, 2.0, 64);
  const double want = std::min((2.0 - 4.0 / 64) / 4 + 1.0 / 64, 1.0);
  for (double v : q) EXPECT_NEAR(v, want, 1e-15);
}

TEST(OrderOptimal, FeasibleAndMonotone) {
  Rng g(7);
  for (int t = 0; t < 200; ++t) {
    const int L = 1 + static_cast<int>(uniform_index(g, 80));
    const double N = 8 + uniform_index(g, 4000);
    const double budget = uniform(g, L / N * 1.001, 1.5 * L);
    const auto p = zipf(L, uniform(g, 0, 3)).p;
    const auto q = order_optimal_q(p, budget, N);
    EXPECT_LE(sum(q), budget * (1 + 1e-12));
    for (int l = 0; l < L; ++l) {
      EXPECT_GE(q[l], 1.0 / N);
      EXPECT_LE(q[l], 1.0);
      if (l > 0) EXPECT_LE(q[l], q[l - 1]);
    }
    const auto r = solve_relaxed(p, budget);
    EXPECT_TRUE(std::is_sorted(r.rbegin(), r.rend()));
  }
}

TEST(OrderOptimal, BudgetAtOrBelowFloorIsInfeasible) {
  try {
    order_optimal_q(zipf(4, 1).p, 4.0 / 64, 64);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::infeasible);
  }
}

TEST(OrderOptimal, RatioToExactStaysBounded) {
  const auto p = zipf(20, 1).p;
  double worst = 1.0;
  for (int e = 4; e <= 12; ++e) {
    const double N = std::ldexp(1.0, e);
    const double budget = 2.0 + 20 / N;
    const double exact = objective(solve_constrained({p, N, budget}).q, p);
    const double ratio = objective(order_optimal_q(p, budget, N), p) / exact;
    EXPECT_GE(ratio, 1 - 1e-12);
    worst = std::max(worst, ratio);
  }
  EXPECT_LT(worst, 1.5);
}

TEST(OrderOptimal, CompThresholdBudget) {
  for (double tau : {0.5, 1.0, 1.5}) {
    const int L = 30;
    const double N = 256;
    const auto p = zipf(L, tau).p;
    const double b = comp_threshold_budget(tau, L, N);
    EXPECT_GE(order_optimal_q(p, b * (1 + 1e-9), N)[0], 0.5);
    EXPECT_LT(order_optimal_q(p, b * (1 - 1e-9), N)[0], 0.5);
  }
}

TEST(FileSizes, HeterogeneousRejected) {
  EXPECT_DOUBLE_EQ(common_file_size({8, 8, 8}), 8);
  try {
    common_file_size({8, 9});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::invalid_argument);
  }
}

}  // namespace
}  // namespace phycache
