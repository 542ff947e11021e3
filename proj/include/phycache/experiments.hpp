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

#ifndef PHYCACHE_EXPERIMENTS_HPP_
#define PHYCACHE_EXPERIMENTS_HPP_

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "phycache/channel.hpp"
#include "phycache/coding.hpp"
#include "phycache/delivery.hpp"
#include "phycache/error.hpp"
#include "phycache/freqplan.hpp"
#include "phycache/random.hpp"
#include "phycache/replication.hpp"
#include "phycache/throughput.hpp"
#include "phycache/topology.hpp"

namespace phycache {

enum class ReplicationPolicy { order_optimal, exact_convex, uniform, single_copy };

inline const char* policy_name(ReplicationPolicy p) {
  switch (p) {
    case ReplicationPolicy::order_optimal: return "order_optimal";
    case ReplicationPolicy::exact_convex: return "exact_convex";
    case ReplicationPolicy::uniform: return "uniform";
    case ReplicationPolicy::single_copy: return "single_copy";
  }
  return "?";
}

inline ReplicationPolicy parse_policy(const std::string& s) {
  for (auto p : {ReplicationPolicy::order_optimal, ReplicationPolicy::exact_convex,
                 ReplicationPolicy::uniform, ReplicationPolicy::single_copy})
    if (s == policy_name(p)) return p;
  fail(Errc::parse_error, "unknown replication policy '" + s + "'");
}

enum class Scheme { phy_caching, multihop_caching, classical_multihop };

inline const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::phy_caching: return "phy_caching";
    case Scheme::multihop_caching: return "multihop_caching";
    case Scheme::classical_multihop: return "classical_multihop";
  }
  return "?";
}

inline Scheme parse_scheme(const std::string& s) {
  for (auto x : {Scheme::phy_caching, Scheme::multihop_caching,
                 Scheme::classical_multihop})
    if (s == scheme_name(x)) return x;
  fail(Errc::parse_error, "unknown scheme '" + s + "'");
}

enum class SweepAxis { none, L, tau, alpha, budget, snr_db, N };

inline const char* axis_name(SweepAxis a) {
  switch (a) {
    case SweepAxis::none: return "none";
    case SweepAxis::L: return "L";
    case SweepAxis::tau: return "tau";
    case SweepAxis::alpha: return "alpha";
    case SweepAxis::budget: return "budget";
    case SweepAxis::snr_db: return "snr_db";
    case SweepAxis::N: return "N";
  }
  return "?";
}

inline SweepAxis parse_axis(const std::string& s) {
  for (auto a : {SweepAxis::none, SweepAxis::L, SweepAxis::tau, SweepAxis::alpha,
                 SweepAxis::budget, SweepAxis::snr_db, SweepAxis::N})
    if (s == axis_name(a)) return a;
  fail(Errc::parse_error, "unknown sweep axis '" + s + "'");
}

struct ExperimentConfig {
  // placement
  PlacementKind placement = PlacementKind::regular_grid;
  int n_nodes = 256;
  double r_min = 50.0;   // random placements only
  double r_max = 75.0;
  bool torus = false;
  std::uint64_t placement_seed = 1;
  double neighbor_radius_factor = 2.0;  // MARK range in units of r_max

  SystemParams params = [] {
    SystemParams sp;
    sp.set_snr_db(10.0);
    return sp;
  }();
  std::optional<double> snr_db = 10.0;  // overrides params.P when set

  int L = 20;
  double tau = 1.0;
  ReplicationPolicy policy = ReplicationPolicy::order_optimal;
  std::vector<Scheme> schemes = {Scheme::phy_caching, Scheme::multihop_caching,
                                 Scheme::classical_multihop};
  SweepAxis axis = SweepAxis::none;
  std::vector<double> values;

  std::uint64_t seed = 1;
  RcSource rc_source = RcSource::lower_bound;
  int mc_samples = 200;
  SourceMetric source_metric = SourceMetric::euclidean;
  bool simulate = false;  // add flow-simulation cross-checks to sweeps

  int code_k = 32;
  int profiles = 10;
  int verify_segments = 1;

  std::string output_dir = "out";
  std::string output_prefix = "phycache";

  bool operator==(const ExperimentConfig&) const = default;
};

namespace detail {

inline std::string fmt_double(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline double parse_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const char* b = v.data();
  const char* e = b + v.size();
  auto r = std::from_chars(b, e, x);
  if (r.ec != std::errc() || r.ptr != e)
    fail(Errc::parse_error, key + ": '" + v + "' is not a number");
  return x;
}

inline long long parse_int(const std::string& key, const std::string& v) {
  long long x = 0;
  const char* b = v.data();
  const char* e = b + v.size();
  auto r = std::from_chars(b, e, x);
  if (r.ec != std::errc() || r.ptr != e)
    fail(Errc::parse_error, key + ": '" + v + "' is not an integer");
  return x;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(Errc::parse_error, key + ": '" + v + "' is not a boolean");
}

inline std::string trim(std::string s) {
  const auto ws = " \t\r\n";
  const auto a = s.find_first_not_of(ws);
  if (a == std::string::npos) return {};
  return s.substr(a, s.find_last_not_of(ws) - a + 1);
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ','))
    if (auto t = trim(item); !t.empty()) out.push_back(t);
  return out;
}

}  // namespace detail

/// Applies one `key = value` setting.
inline void set_config_value(ExperimentConfig& c, const std::string& key,
                             const std::string& v) {
  using namespace detail;
  auto& sp = c.params;
  if (key == "placement.kind") c.placement = parse_placement_kind(v);
  else if (key == "placement.n_nodes") c.n_nodes = static_cast<int>(parse_int(key, v));
  else if (key == "placement.r_min") c.r_min = parse_double(key, v);
  else if (key == "placement.r_max") c.r_max = parse_double(key, v);
  else if (key == "placement.torus") c.torus = parse_bool(key, v);
  else if (key == "placement.seed") c.placement_seed = static_cast<std::uint64_t>(parse_int(key, v));
  else if (key == "placement.neighbor_radius_factor") c.neighbor_radius_factor = parse_double(key, v);
  else if (key == "params.P") sp.P = parse_double(key, v), c.snr_db.reset();
  else if (key == "params.snr_db") c.snr_db = parse_double(key, v);
  else if (key == "params.W") sp.W = parse_double(key, v);
  else if (key == "params.alpha") sp.alpha = parse_double(key, v);
  else if (key == "params.r_0") sp.r_0 = parse_double(key, v);
  else if (key == "params.r_I") sp.r_I = parse_double(key, v);
  else if (key == "params.N_c") sp.N_c = static_cast<int>(parse_int(key, v));
  else if (key == "params.L_S") sp.L_S = parse_double(key, v);
  else if (key == "params.B_C") sp.B_C = parse_double(key, v);
  else if (key == "params.F") sp.F = parse_double(key, v);
  else if (key == "popularity.L") c.L = static_cast<int>(parse_int(key, v));
  else if (key == "popularity.tau") c.tau = parse_double(key, v);
  else if (key == "policy") c.policy = parse_policy(v);
  else if (key == "schemes") {
    c.schemes.clear();
    for (const auto& s : split_list(v)) c.schemes.push_back(parse_scheme(s));
  } else if (key == "sweep.axis") c.axis = parse_axis(v);
  else if (key == "sweep.values") {
    c.values.clear();
    for (const auto& s : split_list(v)) c.values.push_back(parse_double(key, s));
  } else if (key == "seed") c.seed = static_cast<std::uint64_t>(parse_int(key, v));
  else if (key == "rc_source") c.rc_source = parse_rc_source(v);
  else if (key == "mc_samples") c.mc_samples = static_cast<int>(parse_int(key, v));
  else if (key == "source_metric") c.source_metric = parse_source_metric(v);
  else if (key == "simulate") c.simulate = parse_bool(key, v);
  else if (key == "code.k") c.code_k = static_cast<int>(parse_int(key, v));
  else if (key == "delivery.profiles") c.profiles = static_cast<int>(parse_int(key, v));
  else if (key == "delivery.verify_segments") c.verify_segments = static_cast<int>(parse_int(key, v));
  else if (key == "output.dir") c.output_dir = v;
  else if (key == "output.prefix") c.output_prefix = v;
  else fail(Errc::parse_error, "unknown key '" + key + "'");
  if (c.snr_db) sp.set_snr_db(*c.snr_db);
}

/// Parses `key = value` lines; `#` starts a comment.
inline ExperimentConfig parse_config(const std::string& text,
                                     ExperimentConfig base = {}) {
  std::stringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(Errc::parse_error, "line " + std::to_string(lineno) + ": missing '='");
    set_config_value(base, detail::trim(line.substr(0, eq)),
                     detail::trim(line.substr(eq + 1)));
  }
  return base;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(Errc::invalid_argument, "cannot open config '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

inline std::string serialize_config(const ExperimentConfig& c) {
  using detail::fmt_double;
  std::ostringstream o;
  const auto& sp = c.params;
  auto list = [](const auto& v, auto f) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + f(v[i]);
    return s;
  };
  o << "placement.kind = " << placement_kind_name(c.placement) << "\n"
    << "placement.n_nodes = " << c.n_nodes << "\n"
    << "placement.r_min = " << fmt_double(c.r_min) << "\n"
    << "placement.r_max = " << fmt_double(c.r_max) << "\n"
    << "placement.torus = " << (c.torus ? "true" : "false") << "\n"
    << "placement.seed = " << c.placement_seed << "\n"
    << "placement.neighbor_radius_factor = " << fmt_double(c.neighbor_radius_factor) << "\n"
    << "params.W = " << fmt_double(sp.W) << "\n"
    << "params.alpha = " << fmt_double(sp.alpha) << "\n"
    << "params.r_0 = " << fmt_double(sp.r_0) << "\n"
    << "params.r_I = " << fmt_double(sp.r_I) << "\n"
    << "params.N_c = " << sp.N_c << "\n"
    << "params.L_S = " << fmt_double(sp.L_S) << "\n"
    << "params.B_C = " << fmt_double(sp.B_C) << "\n"
    << "params.F = " << fmt_double(sp.F) << "\n";
  if (c.snr_db)
    o << "params.snr_db = " << fmt_double(*c.snr_db) << "\n";
  else
    o << "params.P = " << fmt_double(sp.P) << "\n";
  o << "popularity.L = " << c.L << "\n"
    << "popularity.tau = " << fmt_double(c.tau) << "\n"
    << "policy = " << policy_name(c.policy) << "\n"
    << "schemes = " << list(c.schemes, [](Scheme s) { return std::string(scheme_name(s)); }) << "\n"
    << "sweep.axis = " << axis_name(c.axis) << "\n"
    << "sweep.values = " << list(c.values, fmt_double) << "\n"
    << "seed = " << c.seed << "\n"
    << "rc_source = " << rc_source_name(c.rc_source) << "\n"
    << "mc_samples = " << c.mc_samples << "\n"
    << "source_metric = " << source_metric_name(c.source_metric) << "\n"
    << "simulate = " << (c.simulate ? "true" : "false") << "\n"
    << "code.k = " << c.code_k << "\n"
    << "delivery.profiles = " << c.profiles << "\n"
    << "delivery.verify_segments = " << c.verify_segments << "\n"
    << "output.dir = " << c.output_dir << "\n"
    << "output.prefix = " << c.output_prefix << "\n";
  return o.str();
}

inline double grid_side_of(int n) {
  const double s = std::round(std::sqrt(static_cast<double>(n)));
  return s * s == n ? s : 0.0;
}

inline void validate_config(const ExperimentConfig& c) {
  const auto& sp = c.params;
  validate_alpha(sp.alpha);
  if (c.n_nodes < 1) fail(Errc::invalid_argument, "placement.n_nodes must be positive");
  if (c.placement == PlacementKind::regular_grid && grid_side_of(c.n_nodes) < 2)
    fail(Errc::invalid_argument, "regular grids need a square node count of at least 4");
  if (c.placement == PlacementKind::constrained_random && !(c.r_min < c.r_max))
    fail(Errc::invalid_argument, "placement needs r_min < r_max");
  if (!(sp.P > 0 && sp.W > 0 && sp.r_0 > 0 && sp.L_S > 0 && sp.F > 0 && sp.B_C > 0))
    fail(Errc::invalid_argument, "powers, bandwidth and sizes must be positive");
  if (sp.N_c < 1) fail(Errc::invalid_argument, "params.N_c must be positive");
  if (c.L < 1) fail(Errc::invalid_argument, "popularity.L must be positive");
  if (!(c.tau >= 0)) fail(Errc::invalid_argument, "popularity.tau must be non-negative");
  if (c.axis != SweepAxis::none && c.values.empty())
    fail(Errc::invalid_argument, "sweep.values is empty");
  if (c.schemes.empty()) fail(Errc::invalid_argument, "no schemes selected");
  if (c.mc_samples < 1) fail(Errc::invalid_argument, "mc_samples must be positive");
  if (c.code_k < 1 || c.code_k > 255) fail(Errc::invalid_argument, "code.k must lie in [1, 255]");
  if (c.profiles < 0) fail(Errc::invalid_argument, "delivery.profiles must be >= 0");
}

inline NodePlacement make_placement(const ExperimentConfig& c) {
  if (c.placement == PlacementKind::regular_grid)
    return make_regular_grid(static_cast<int>(grid_side_of(c.n_nodes)),
                             c.params.r_0, c.torus);
  if (c.placement == PlacementKind::constrained_random)
    return make_constrained_random(c.n_nodes, c.params.r_0, c.r_min, c.r_max,
                                   c.placement_seed, c.torus);
  fail(Errc::invalid_argument, "custom placements cannot be generated");
}

// ---------------------------------------------------------------------------
// Baselines

inline std::vector<double> baseline_uniform_caching(const std::vector<double>& p,
                                                    double budget, int L,
                                                    double N) {
  if (static_cast<int>(p.size()) != L)
    fail(Errc::invalid_argument, "popularity length differs from L");
  return uniform_q(static_cast<size_t>(L), budget, N);
}

inline std::vector<double> replicate(const ExperimentConfig& c,
                                     const std::vector<double>& p) {
  const double N = c.n_nodes, budget = c.params.budget();
  switch (c.policy) {
    case ReplicationPolicy::order_optimal:
      return order_optimal_q(p, budget, N);
    case ReplicationPolicy::exact_convex:
      return solve_constrained({p, N, budget}).q;
    case ReplicationPolicy::uniform:
      return baseline_uniform_caching(p, budget, static_cast<int>(p.size()), N);
    case ReplicationPolicy::single_copy:
      if (static_cast<double>(p.size()) / N > budget * (1 + 1e-12))
        fail(Errc::infeasible, "one copy per file exceeds the budget");
      return std::vector<double>(p.size(), 1.0 / N);
  }
  return {};
}

struct ClassicalResult {
  double rate = 0.0;  // +inf when no traffic crosses the network
  double max_link_load = 0.0;  // at unit request rate
  LinkLoad bottleneck;
  std::vector<NodeId> home_of_file;
};

/// Each file lives complete at one random node (distinct nodes while
/// L <= N); every node fetches file l at rate p_l R over Voronoi routes.
inline ClassicalResult baseline_classical_multihop(const Router& router,
                                                   const std::vector<double>& p,
                                                   double link_rate,
                                                   std::uint64_t seed) {
  const NodePlacement& pl = router.placement();
  const int N = pl.size(), L = static_cast<int>(p.size());
  ClassicalResult out;
  Rng g(seed);
  if (L <= N) {
    std::vector<NodeId> perm(N);
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = N - 1; i > 0; --i)
      std::swap(perm[i], perm[uniform_index(g, static_cast<std::uint64_t>(i) + 1)]);
    out.home_of_file.assign(perm.begin(), perm.begin() + L);
  } else {
    for (int l = 0; l < L; ++l)
      out.home_of_file.push_back(static_cast<NodeId>(uniform_index(g, N)));
  }
  LinkLoadMap loads(router.voronoi());
  for (int l = 0; l < L; ++l) {
    if (p[l] <= 0.0) continue;
    const NodeId h = out.home_of_file[l];
    for (NodeId n = 0; n < N; ++n)
      if (n != h) loads.add_path(router(h, n), p[l]);
  }
  out.bottleneck = loads.max_undirected();
  out.max_link_load = out.bottleneck.load;
  out.rate = out.max_link_load > 0.0 ? link_rate / out.max_link_load
                                     : std::numeric_limits<double>::infinity();
  return out;
}

// ---------------------------------------------------------------------------
// Monte-Carlo CoMP rate as a function of W_c

/// Per-node MC rate of the reference grid cluster, tabulated at `points`
/// values of W_c in (0, W/2] and interpolated linearly.
inline RcFunction mc_rc_function(const SystemParams& sp, int samples,
                                 std::uint64_t seed, int points = 9,
                                 int grid_side = 30) {
  const auto ref = make_grid_comp_reference(grid_side, sp.r_0);
  std::vector<double> xs, ys;
  for (int i = 1; i <= points; ++i) {
    const double wc = sp.W / 2.0 * i / points;
    xs.push_back(wc);
    ys.push_back(comp_cluster_rate_mc(ref.placement, sp, ref.cluster,
                                      ref.interferers, wc, samples,
                                      derive_seed(seed, {static_cast<std::uint64_t>(i)}))
                     .per_node);
  }
  return [xs, ys](double wc) {
    if (wc <= xs.front()) return ys.front();
    if (wc >= xs.back()) return ys.back();
    const size_t j = std::upper_bound(xs.begin(), xs.end(), wc) - xs.begin();
    const double t = (wc - xs[j - 1]) / (xs[j] - xs[j - 1]);
    return ys[j - 1] + t * (ys[j] - ys[j - 1]);
  };
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepRow {
  double param = std::numeric_limits<double>::quiet_NaN();
  double gamma_B = std::numeric_limits<double>::quiet_NaN();
  double gamma_A = std::numeric_limits<double>::quiet_NaN();
  double gamma_A_L = std::numeric_limits<double>::quiet_NaN();
  double gamma_A_U = std::numeric_limits<double>::quiet_NaN();
  double W_c_star = std::numeric_limits<double>::quiet_NaN();
  double delta_gamma_bar = std::numeric_limits<double>::quiet_NaN();
  double gamma_classical = std::numeric_limits<double>::quiet_NaN();
  double gamma_B_sim = std::numeric_limits<double>::quiet_NaN();
  double comp_files = 0;
  RcSource rc_source = RcSource::lower_bound;
  std::string error;  // non-empty when the point failed
};

struct SweepTable {
  ExperimentConfig config;
  std::vector<SweepRow> rows;
};

inline ExperimentConfig config_at(ExperimentConfig c, double v) {
  switch (c.axis) {
    case SweepAxis::none: break;
    case SweepAxis::L: c.L = static_cast<int>(std::llround(v)); break;
    case SweepAxis::tau: c.tau = v; break;
    case SweepAxis::alpha: c.params.alpha = v; break;
    case SweepAxis::budget: c.params.B_C = v * c.params.F; break;
    case SweepAxis::snr_db:
      c.snr_db = v;
      c.params.set_snr_db(v);
      break;
    case SweepAxis::N: c.n_nodes = static_cast<int>(std::llround(v)); break;
  }
  if (c.snr_db) c.params.set_snr_db(*c.snr_db);
  return c;
}

inline bool has_scheme(const ExperimentConfig& c, Scheme s) {
  return std::find(c.schemes.begin(), c.schemes.end(), s) != c.schemes.end();
}

/// Closed forms (and optional simulation checks) at one configuration.
inline SweepRow sweep_point(const ExperimentConfig& c, double param) {
  SweepRow row;
  row.param = param;
  row.rc_source = c.rc_source;
  validate_config(c);
  const auto& sp = c.params;
  const auto pop = zipf(c.L, c.tau);
  const auto q = replicate(c, pop.p);
  for (double v : q) row.comp_files += mode_of(v) == CacheMode::comp;
  const auto k = compute_constants(sp);
  RcFunction rc;
  if (c.rc_source == RcSource::monte_carlo)
    rc = mc_rc_function(sp, c.mc_samples, c.seed);
  if (has_scheme(c, Scheme::multihop_caching)) row.gamma_B = gamma_B(q, pop.p, sp, k);
  if (has_scheme(c, Scheme::phy_caching)) {
    const auto rep = throughput_report(q, pop.p, sp, k, c.rc_source, rc);
    row.gamma_A = rep.gamma_A;
    row.gamma_A_L = rep.gamma_A_lower;
    row.gamma_A_U = rep.gamma_A_upper;
    row.W_c_star = rep.W_c_star;
    if (rep.delta_gamma_highsnr) row.delta_gamma_bar = *rep.delta_gamma_highsnr;
  }
  const bool need_net = has_scheme(c, Scheme::classical_multihop) || c.simulate;
  if (need_net) {
    const auto pl = make_placement(c);
    const auto vor = voronoi(pl);
    const Router router(vor);
    const double link = sp.W * link_rate_R_b(sp, k);
    if (has_scheme(c, Scheme::classical_multihop))
      row.gamma_classical = baseline_classical_multihop(router, pop.p, link, c.seed).rate;
    if (c.simulate && pl.is_grid()) {
      LoadOptions lo;
      lo.metric = SourceMetric::grid_hops;
      lo.comp_files_local = false;
      const auto rep = accumulate_link_load(router, pop.p, q, 1.0, lo);
      const double m = rep.map.max_undirected().load;
      row.gamma_B_sim = m > 0 ? link / m : std::numeric_limits<double>::infinity();
    }
  }
  return row;
}

inline SweepTable run_sweep(const ExperimentConfig& c) {
  validate_config(c);
  SweepTable t;
  t.config = c;
  std::vector<double> vals = c.values;
  if (c.axis == SweepAxis::none) vals = {std::numeric_limits<double>::quiet_NaN()};
  for (double v : vals) {
    try {
      t.rows.push_back(sweep_point(config_at(c, v), v));
    } catch (const Error& e) {
      SweepRow r;
      r.param = v;
      r.rc_source = c.rc_source;
      r.error = e.what();
      t.rows.push_back(r);
    }
  }
  return t;
}

inline std::string csv_number(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return detail::fmt_double(v);
}

inline const std::vector<std::string>& sweep_csv_columns() {
  static const std::vector<std::string> cols = {
      "param",     "gamma_B",         "gamma_A",         "gamma_A_L",
      "gamma_A_U", "W_c_star",        "delta_gamma_bar", "rc_source",
      "gamma_classical", "gamma_B_sim", "comp_files",    "error"};
  return cols;
}

inline std::string sweep_csv(const SweepTable& t) {
  std::ostringstream o;
  const auto& cols = sweep_csv_columns();
  for (size_t i = 0; i < cols.size(); ++i) o << (i ? "," : "") << cols[i];
  o << "\n";
  for (const auto& r : t.rows) {
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    o << csv_number(r.param) << "," << csv_number(r.gamma_B) << ","
      << csv_number(r.gamma_A) << "," << csv_number(r.gamma_A_L) << ","
      << csv_number(r.gamma_A_U) << "," << csv_number(r.W_c_star) << ","
      << csv_number(r.delta_gamma_bar) << "," << rc_source_name(r.rc_source) << ","
      << csv_number(r.gamma_classical) << "," << csv_number(r.gamma_B_sim) << ","
      << csv_number(r.comp_files) << "," << err << "\n";
  }
  return o.str();
}

inline std::string request_csv(const DeliveryReport& rep) {
  std::ostringstream o;
  o << "requester,file,mode,hops,bits,completion_time,bottleneck\n";
  for (const auto& r : rep.results)
    o << r.requester << "," << r.file << "," << cache_mode_name(r.mode) << ","
      << r.hops << "," << csv_number(r.bits) << ","
      << csv_number(r.completion_time) << "," << r.bottleneck << "\n";
  return o.str();
}

// ---------------------------------------------------------------------------
// Fitting

enum class ScalingModel { power, log_corrected };

inline ScalingModel parse_scaling_model(const std::string& s) {
  if (s == "power") return ScalingModel::power;
  if (s == "log_corrected") return ScalingModel::log_corrected;
  fail(Errc::parse_error, "unknown scaling model '" + s + "'");
}

/// `power` fits log y against log x. `log_corrected` fits
/// y sqrt(x) / log x, whose slope is zero under Theta(log x / sqrt x).
inline LogLogFit fit_scaling(const std::vector<double>& x,
                             const std::vector<double>& y,
                             ScalingModel model = ScalingModel::power) {
  if (x.size() < 6) fail(Errc::invalid_argument, "need at least 6 points");
  if (model == ScalingModel::power) return fit_loglog(x, y);
  std::vector<double> z(y.size());
  for (size_t i = 0; i < y.size(); ++i) {
    if (!(x[i] > 1.0)) fail(Errc::domain_error, "log-corrected model needs x > 1");
    z[i] = y[i] * std::sqrt(x[i]) / std::log(x[i]);
  }
  return fit_loglog(x, z);
}

}  // namespace phycache

#endif  // PHYCACHE_EXPERIMENTS_HPP_
