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

#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "phycache/experiments.hpp"
#include "phycache/random.hpp"

namespace phycache {
namespace {

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::invalid_argument;
}

ExperimentConfig l_sweep(double tau) {
  ExperimentConfig c;
  c.tau = tau;
  c.axis = SweepAxis::L;
  c.values = {5, 10, 20, 40, 80, 160};
  c.rc_source = RcSource::monte_carlo;
  return c;
}

TEST(Config, RoundTripsThroughText) {
  ExperimentConfig c;
  c.placement = PlacementKind::constrained_random;
  c.n_nodes = 300;
  c.r_min = 47.25;
  c.torus = true;
  c.params.alpha = 4.1;
  c.params.r_I = 1.0 / 3.0 * 800;
  c.snr_db = 17.3;
  c.params.set_snr_db(17.3);
  c.L = 33;
  c.tau = 0.1 + 0.2;
  c.policy = ReplicationPolicy::exact_convex;
  c.schemes = {Scheme::multihop_caching};
  c.axis = SweepAxis::tau;
  c.values = {0.5, 1.0 / 7, 2};
  c.rc_source = RcSource::monte_carlo;
  c.source_metric = SourceMetric::grid_hops;
  c.simulate = true;
  c.output_prefix = "x";
  EXPECT_EQ(parse_config(serialize_config(c)), c);
  EXPECT_EQ(parse_config(serialize_config(ExperimentConfig{})), ExperimentConfig{});
}

TEST(Config, RawPowerRoundTrips) {
  const auto c = parse_config("params.P = 123.5\n");
  EXPECT_FALSE(c.snr_db);
  EXPECT_EQ(c.params.P, 123.5);
  EXPECT_EQ(parse_config(serialize_config(c)), c);
}

TEST(Config, CommentsAndBlankLines) {
  const auto c = parse_config("# header\n\n  popularity.L = 7   # trailing\n");
  EXPECT_EQ(c.L, 7);
}

TEST(Config, ParseErrors) {
  EXPECT_EQ(code_of([] { parse_config("nope = 1"); }), Errc::parse_error);
  EXPECT_EQ(code_of([] { parse_config("popularity.L 3"); }), Errc::parse_error);
  EXPECT_EQ(code_of([] { parse_config("popularity.tau = abc"); }), Errc::parse_error);
  EXPECT_EQ(code_of([] { parse_config("popularity.L = 2.5"); }), Errc::parse_error);
  EXPECT_EQ(code_of([] { parse_config("policy = greedy"); }), Errc::parse_error);
  EXPECT_EQ(code_of([] { parse_config("placement.torus = maybe"); }), Errc::parse_error);
}

TEST(Config, ValidationRejectsBadValues) {
  ExperimentConfig c;
  c.params.alpha = 2.0;
  EXPECT_THROW(validate_config(c), Error);
  c = {};
  c.n_nodes = 250;
  EXPECT_THROW(validate_config(c), Error);
  c = {};
  c.axis = SweepAxis::L;
  EXPECT_THROW(validate_config(c), Error);
  c = {};
  c.schemes.clear();
  EXPECT_THROW(validate_config(c), Error);
}

TEST(Baselines, UniformCaching) {
  const auto q = baseline_uniform_caching({0.4, 0.3, 0.2, 0.1}, 2, 4, 100);
  EXPECT_EQ(q, std::vector<double>(4, 0.5));
  EXPECT_EQ(code_of([] { baseline_uniform_caching(std::vector<double>(10, 0.1), 0.05, 10, 100); }),
            Errc::infeasible);
}

TEST(Baselines, UniformNeverBeatsOptimum) {
  Rng g(4);
  for (int t = 0; t < 200; ++t) {
    const int L = 2 + static_cast<int>(uniform_index(g, 40));
    const double N = 64 + static_cast<double>(uniform_index(g, 1000));
    const double budget = uniform(g, L / N * 1.01, 0.9 * L);
    const auto p = zipf(L, uniform(g, 0, 2.5)).p;
    const auto opt = solve_constrained({p, N, budget}).q;
    const auto uni = baseline_uniform_caching(p, budget, L, N);
    ASSERT_GE(objective(uni, p) / objective(opt, p), 1.0 - 1e-10);
  }
}

TEST(Baselines, UniformOrderInLinearBudget) {
  // Budget proportional to L: uniform and optimal rates stay within a constant.
  std::vector<double> ratios;
  for (int L : {16, 64, 256, 1024}) {
    const auto p = zipf(L, 0.8).p;
    const double budget = L / 8.0, N = 1e6;
    const auto uni = baseline_uniform_caching(p, budget, L, N);
    ratios.push_back(objective(uni, p) / objective(solve_constrained({p, N, budget}).q, p));
    EXPECT_NEAR(1.0 / objective(uni, p), std::sqrt(budget / L), 1e-12);
  }
  for (double r : ratios) EXPECT_LT(r, 1.5);
}

TEST(Baselines, ClassicalSingleNodeIsUnlimited) {
  const auto pl = make_regular_grid(1, 100);
  const auto vor = voronoi(pl);
  const Router r(vor);
  const auto res = baseline_classical_multihop(r, {1.0}, 1.0, 1);
  EXPECT_TRUE(std::isinf(res.rate));
}

TEST(Baselines, ClassicalHomesAreDistinct) {
  const auto pl = make_regular_grid(8, 100);
  const auto vor = voronoi(pl);
  const Router r(vor);
  const auto res = baseline_classical_multihop(r, zipf(20, 1).p, 1.0, 9);
  std::set<NodeId> homes(res.home_of_file.begin(), res.home_of_file.end());
  EXPECT_EQ(homes.size(), 20u);
  EXPECT_GT(res.max_link_load, 0.0);
}

TEST(Baselines, ClassicalFollowsInverseRootN) {
  // One equally popular file homed at every node.
  std::vector<double> n, rate;
  for (int side : {8, 10, 12, 16, 20, 24, 32}) {
    const auto pl = make_regular_grid(side, 100);
    const auto vor = voronoi(pl);
    const Router r(vor);
    const int N = side * side;
    n.push_back(N);
    rate.push_back(baseline_classical_multihop(r, zipf(N, 0).p, 1.0, 1).rate);
  }
  EXPECT_NEAR(fit_scaling(n, rate).slope, -0.5, 0.07);
}

TEST(Baselines, HotHomeLimitsClassicalRate) {
  // A fixed library concentrates N requests on each home: rate ~ 1/N.
  std::vector<double> n, rate;
  for (int side : {8, 10, 12, 16, 20, 24}) {
    const auto pl = make_regular_grid(side, 100);
    const auto vor = voronoi(pl);
    const Router r(vor);
    n.push_back(side * side);
    rate.push_back(baseline_classical_multihop(r, zipf(20, 1).p, 1.0, 1).rate);
  }
  EXPECT_LT(fit_scaling(n, rate).slope, -0.6);
}

TEST(Replicate, PoliciesRespectBudget) {
  ExperimentConfig c;
  const auto p = zipf(c.L, c.tau).p;
  for (auto pol : {ReplicationPolicy::order_optimal, ReplicationPolicy::exact_convex,
                   ReplicationPolicy::uniform, ReplicationPolicy::single_copy}) {
    c.policy = pol;
    const auto q = replicate(c, p);
    double s = 0;
    for (double v : q) s += v;
    EXPECT_LE(s, c.params.budget() * (1 + 1e-9)) << policy_name(pol);
  }
}

TEST(Sweep, SchemeOrdering) {
  for (double tau : {1.0, 2.0}) {
    const auto t = run_sweep(l_sweep(tau));
    ASSERT_EQ(t.rows.size(), 6u);
    for (const auto& r : t.rows) {
      ASSERT_TRUE(r.error.empty()) << r.error;
      EXPECT_GE(r.gamma_A, r.gamma_B * (1 - 0.02)) << r.param;
      EXPECT_GE(r.gamma_B, r.gamma_classical * (1 - 0.02)) << r.param;
    }
  }
}

TEST(Sweep, TauAndAlphaAxes) {
  ExperimentConfig c;
  c.rc_source = RcSource::monte_carlo;
  c.axis = SweepAxis::tau;
  c.values = {0, 0.5, 1, 1.5, 2};
  c.L = 30;
  for (const auto& r : run_sweep(c).rows) EXPECT_TRUE(r.error.empty()) << r.error;
  c.axis = SweepAxis::alpha;
  c.values = {2.5, 3, 3.5, 4, 4.5};
  c.L = 20;
  c.params.B_C = 10 * c.params.F;
  c.schemes = {Scheme::phy_caching, Scheme::multihop_caching};
  for (const auto& r : run_sweep(c).rows) {
    EXPECT_TRUE(r.error.empty()) << r.error;
    EXPECT_GE(r.gamma_A, r.gamma_B);
  }
}

TEST(Sweep, Deterministic) {
  auto c = l_sweep(1.0);
  c.simulate = true;
  EXPECT_EQ(sweep_csv(run_sweep(c)), sweep_csv(run_sweep(c)));
}

TEST(Sweep, ScaleInvariant) {
  auto a = l_sweep(1.0);
  a.schemes = {Scheme::phy_caching, Scheme::multihop_caching};
  auto b = a;
  b.params.F *= 1024;
  b.params.L_S *= 1024;
  b.params.B_C *= 1024;
  const auto ta = run_sweep(a), tb = run_sweep(b);
  for (size_t i = 0; i < ta.rows.size(); ++i) {
    EXPECT_NEAR(ta.rows[i].gamma_A, tb.rows[i].gamma_A, 1e-9 * ta.rows[i].gamma_A);
    EXPECT_NEAR(ta.rows[i].gamma_B, tb.rows[i].gamma_B, 1e-9 * ta.rows[i].gamma_B);
  }
}

TEST(Sweep, FailingPointIsReported) {
  auto c = l_sweep(1.0);
  c.values = {10, 2000};  // 2000 files exceed what 256 nodes can hold once
  const auto t = run_sweep(c);
  EXPECT_TRUE(t.rows[0].error.empty());
  EXPECT_FALSE(t.rows[1].error.empty());
  EXPECT_EQ(t.rows[1].param, 2000);
}

TEST(Sweep, SimulationMatchesFormulaOnTorus) {
  ExperimentConfig c;
  c.n_nodes = 1024;
  c.torus = true;
  c.simulate = true;
  c.schemes = {Scheme::multihop_caching};
  c.L = 12;
  const auto r = run_sweep(c).rows.at(0);
  EXPECT_NEAR(r.gamma_B_sim, r.gamma_B, 0.01 * r.gamma_B);
}

TEST(Csv, SweepColumns) {
  auto c = l_sweep(1.0);
  c.values = {5, 10};
  const auto csv = sweep_csv(run_sweep(c));
  std::istringstream in(csv);
  std::string header, line;
  std::getline(in, header);
  EXPECT_EQ(header.rfind("param,gamma_B,gamma_A,gamma_A_L,gamma_A_U,W_c_star,delta_gamma_bar,rc_source", 0), 0u);
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','),
              std::count(header.begin(), header.end(), ','));
    EXPECT_NE(line.find("monte_carlo"), std::string::npos);
  }
  EXPECT_EQ(rows, 2);
}

TEST(Csv, Numbers) {
  EXPECT_EQ(csv_number(std::numeric_limits<double>::quiet_NaN()), "");
  EXPECT_EQ(csv_number(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(std::stod(csv_number(0.1)), 0.1);
}

TEST(Csv, RequestColumns) {
  DeliveryReport rep;
  RequestResult r;
  r.requester = 3;
  r.file = 1;
  r.bottleneck = "local";
  rep.results.push_back(r);
  const auto csv = request_csv(rep);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "requester,file,mode,hops,bits,completion_time,bottleneck");
  EXPECT_NE(csv.find("3,1,"), std::string::npos);
}

TEST(Fit, ConstantTableHasZeroSlope) {
  const std::vector<double> x{1, 2, 4, 8, 16, 32}, y(6, 3.5);
  const auto f = fit_scaling(x, y);
  EXPECT_NEAR(f.slope, 0.0, 1e-12);
  EXPECT_NEAR(f.intercept, std::log(3.5), 1e-12);
}

TEST(Fit, LogCorrectedModelFlattens) {
  std::vector<double> x, y;
  for (double L = 16; L <= 4096; L *= 2) x.push_back(L), y.push_back(2 * std::log(L) / std::sqrt(L));
  EXPECT_NEAR(fit_scaling(x, y, ScalingModel::log_corrected).slope, 0.0, 1e-12);
  EXPECT_LT(fit_scaling(x, y).slope, -0.25);
}

TEST(Fit, Errors) {
  EXPECT_THROW(fit_scaling({1, 2, 3}, {1, 2, 3}), Error);
  EXPECT_EQ(code_of([] { fit_scaling({1, 2, 3, 4, 5, 6}, {1, 1, 1, 1, 1, 1},
                                     ScalingModel::log_corrected); }),
            Errc::domain_error);
  EXPECT_EQ(code_of([] { parse_scaling_model("cubic"); }), Errc::parse_error);
}

}  // namespace
}  // namespace phycache
