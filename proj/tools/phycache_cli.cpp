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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "phycache/phycache.hpp"

namespace fs = std::filesystem;
using namespace phycache;
using io::Json;

namespace {

struct Common {
  std::string config_path;
  std::vector<std::string> sets;
  std::string out_dir;
  bool quiet = false;
  // Shorthands for frequently swept fields.
  std::optional<int> L, nodes;
  std::optional<double> tau, alpha, snr_db, budget;
  std::optional<std::uint64_t> seed;
  std::string policy, placement, rc_source;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("-c,--config", c.config_path, "key = value config file");
  app->add_option("-s,--set", c.sets, "override one setting, key=value")
      ->take_all();
  app->add_option("-o,--out", c.out_dir, "output directory");
  app->add_flag("-q,--quiet", c.quiet, "do not echo JSON to stdout");
  app->add_option("--L", c.L, "number of files");
  app->add_option("--tau", c.tau, "Zipf skewness");
  app->add_option("--alpha", c.alpha, "path-loss exponent");
  app->add_option("--snr-db", c.snr_db, "P r_0^-alpha / W in dB");
  app->add_option("--budget", c.budget, "cache size in files, B_C / F");
  app->add_option("--nodes", c.nodes, "number of nodes");
  app->add_option("--seed", c.seed, "base seed");
  app->add_option("--policy", c.policy, "order_optimal|exact_convex|uniform|single_copy");
  app->add_option("--placement", c.placement, "regular_grid|constrained_random");
  app->add_option("--rc", c.rc_source, "bound_lower|bound_upper|monte_carlo");
}

ExperimentConfig resolve(const Common& c) {
  ExperimentConfig cfg = c.config_path.empty() ? ExperimentConfig{}
                                               : load_config(c.config_path);
  if (const char* env = std::getenv("PHYCACHE_OUTPUT_DIR"); env && *env)
    cfg.output_dir = env;
  auto set = [&](const std::string& k, const std::string& v) {
    set_config_value(cfg, k, v);
  };
  auto d = [](double v) { return detail::fmt_double(v); };
  if (c.L) set("popularity.L", std::to_string(*c.L));
  if (c.tau) set("popularity.tau", d(*c.tau));
  if (c.alpha) set("params.alpha", d(*c.alpha));
  if (c.snr_db) set("params.snr_db", d(*c.snr_db));
  if (c.budget) set("params.B_C", d(*c.budget * cfg.params.F));
  if (c.nodes) set("placement.n_nodes", std::to_string(*c.nodes));
  if (c.seed) set("seed", std::to_string(*c.seed));
  if (!c.policy.empty()) set("policy", c.policy);
  if (!c.placement.empty()) set("placement.kind", c.placement);
  if (!c.rc_source.empty()) set("rc_source", c.rc_source);
  for (const auto& kv : c.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      fail(Errc::parse_error, "--set expects key=value, got '" + kv + "'");
    set(detail::trim(kv.substr(0, eq)), detail::trim(kv.substr(eq + 1)));
  }
  if (!c.out_dir.empty()) cfg.output_dir = c.out_dir;
  validate_config(cfg);
  return cfg;
}

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.output_dir);
  return (fs::path(cfg.output_dir) / (cfg.output_prefix + "_" + name)).string();
}

void emit(const Common& c, const ExperimentConfig& cfg, const std::string& name,
          const Json& j) {
  const auto path = out_path(cfg, name);
  io::write_json(path, j);
  if (!c.quiet) std::cout << j.dump(2) << "\n";
  std::cerr << "wrote " << path << "\n";
}

double placement_r_min(const ExperimentConfig& cfg) {
  return cfg.placement == PlacementKind::regular_grid ? cfg.params.r_0 : cfg.r_min;
}
double placement_r_max(const ExperimentConfig& cfg) {
  return cfg.placement == PlacementKind::regular_grid
             ? cfg.params.r_0 * std::sqrt(2.0) / 2.0 * (1.0 + 1e-9)
             : cfg.r_max;
}

RcFunction rc_for(const ExperimentConfig& cfg) {
  if (cfg.rc_source == RcSource::monte_carlo)
    return mc_rc_function(cfg.params, cfg.mc_samples, cfg.seed);
  return nullptr;
}

int cmd_constants(const Common& c) {
  const auto cfg = resolve(c);
  Json j = io::to_json(compute_constants(cfg.params, placement_r_min(cfg),
                                         placement_r_max(cfg)));
  const auto k = compute_constants(cfg.params);
  const auto b = comp_rate_bounds(cfg.params, k);
  j["R_b"] = link_rate_R_b(cfg.params, k);
  j["R_m_lower"] = link_rate_R_m_lower(cfg.params, k);
  j["R_c_lower"] = b.lower;
  j["R_c_upper"] = b.upper;
  j["alpha"] = cfg.params.alpha;
  j["snr"] = cfg.params.snr();
  emit(c, cfg, "constants.json", j);
  return 0;
}

int cmd_replicate(const Common& c) {
  const auto cfg = resolve(c);
  const auto pop = zipf(cfg.L, cfg.tau);
  const auto q = replicate(cfg, pop.p);
  Json j = io::document("replication");
  j["policy"] = policy_name(cfg.policy);
  j["budget"] = cfg.params.budget();
  j["N"] = cfg.n_nodes;
  j["L"] = cfg.L;
  j["tau"] = cfg.tau;
  j["p"] = pop.p;
  j["q"] = q;
  Json modes = Json::array();
  for (double v : q) modes.push_back(cache_mode_name(mode_of(v)));
  j["modes"] = std::move(modes);
  j["objective"] = objective(q, pop.p);
  j["relaxed_optimum"] = relaxed_optimum(pop.p, cfg.params.budget());
  if (cfg.policy == ReplicationPolicy::exact_convex) {
    const auto s = solve_constrained({pop.p, double(cfg.n_nodes), cfg.params.budget()});
    j["lambda"] = s.lambda;
    j["kkt_residual"] = s.kkt_residual;
    j["budget_residual"] = s.budget_residual;
  }
  emit(c, cfg, "replication.json", j);
  return 0;
}

int cmd_throughput(const Common& c) {
  const auto cfg = resolve(c);
  const auto pop = zipf(cfg.L, cfg.tau);
  const auto q = replicate(cfg, pop.p);
  const auto k = compute_constants(cfg.params);
  auto rep = throughput_report(q, pop.p, cfg.params, k, cfg.rc_source, rc_for(cfg));
  rep.general = general_network_rate(placement_r_min(cfg), placement_r_max(cfg), q,
                                     pop.p, cfg.params);
  Json j = io::to_json(rep);
  j["q"] = q;
  emit(c, cfg, "throughput.json", j);
  return 0;
}

int cmd_simulate(const Common& c) {
  const auto cfg = resolve(c);
  const auto& sp = cfg.params;
  const auto pl = make_placement(cfg);
  const auto vor = voronoi(pl);
  const Router router(vor);
  const auto bp = partition_nodes(pl, cfg.neighbor_radius_factor * pl.r_max());
  const auto pop = zipf(cfg.L, cfg.tau);
  const auto q = replicate(cfg, pop.p);
  const auto layout = build_cache_layout(pl, bp, q, pop, sp);
  const auto k = compute_constants(sp);
  const auto split = solve_W_c_star(
      q, pop.p, sp, k,
      cfg.rc_source == RcSource::monte_carlo
          ? mc_rc_function(sp, cfg.mc_samples, cfg.seed)
          : rc_bound(sp, k, cfg.rc_source == RcSource::upper_bound));
  auto coloring = pl.is_grid() ? grid_reuse_9(pl) : color_subbands(pl, sp.r_I);
  const auto plan = with_power(sp, make_plan(sp, split.W_c, std::move(coloring)));

  DeliveryOptions dopt;
  dopt.k = cfg.code_k;
  dopt.metric = cfg.source_metric;
  dopt.verify_segments = cfg.verify_segments;
  dopt.W_c = split.W_c;
  dopt.link_rate = plan.W_b * split.R_m;
  dopt.comp_rate = split.W_c > 0 ? split.W_c * split.R_c : 0.0;
  if (!(dopt.comp_rate > 0)) dopt.comp_rate = sp.W / 4 * comp_rate_bounds(sp, k).lower;
  ContentStore store(cfg.seed, sp.L_S, cfg.code_k);

  int failures = 0, radius_bad = 0, top_ups = 0, segments = 0;
  DeliveryReport first;
  ControlTrace trace;
  std::optional<CompClustering> clustering;
  for (int s = 0; s < std::max(1, cfg.profiles); ++s) {
    const auto prof =
        sample_profile(pl.size(), pop.p, derive_seed(cfg.seed, {0x9F, std::uint64_t(s)}));
    dopt.seed = derive_seed(cfg.seed, {0xD0, std::uint64_t(s)});
    auto rep = end_to_end_delivery(router, layout, prof, sp, dopt, &store);
    failures += rep.decode_failures;
    radius_bad += rep.radius_violations;
    top_ups += rep.top_up_symbols;
    segments += rep.segments_verified;
    if (s == 0) {
      std::vector<NodeId> comp_req;
      for (const auto& r : prof)
        if (q[r.file] < 1.0 && mode_of(q[r.file]) == CacheMode::comp)
          comp_req.push_back(r.node);
      if (!comp_req.empty()) {
        clustering = cluster_comp(pl, bp, sp.N_c);
        assign_receivers(*clustering, pl, bp, comp_req);
      }
      ControlOptions co;
      co.metric = cfg.source_metric;
      co.clustering = clustering ? &*clustering : nullptr;
      trace = simulate_control_plane(router, layout, prof, co);
      first = std::move(rep);
    }
  }
  LoadOptions lo;
  lo.metric = cfg.source_metric;
  const auto loads = accumulate_link_load(router, pop.p, q, 1.0, lo);

  io::write_json(out_path(cfg, "placement.json"), io::to_json(pl));
  io::write_json(out_path(cfg, "layout.json"), io::to_json(layout));
  io::write_json(out_path(cfg, "plan.json"), io::to_json(plan));
  io::write_json(out_path(cfg, "trace.json"), io::to_json(trace));
  io::write_json(out_path(cfg, "link_loads.json"), io::to_json(loads.map));
  if (clustering) io::write_json(out_path(cfg, "clustering.json"), io::to_json(*clustering));
  io::write_text(out_path(cfg, "requests.csv"), request_csv(first));

  Json j = io::document("simulation_summary");
  j["nodes"] = pl.size();
  j["profiles"] = std::max(1, cfg.profiles);
  j["decode_failures"] = failures;
  j["radius_violations"] = radius_bad + trace.radius_violations;
  j["top_up_symbols"] = top_ups;
  j["segments_verified"] = segments;
  j["W_c"] = split.W_c;
  j["link_rate"] = dopt.link_rate;
  j["comp_rate"] = dopt.comp_rate;
  j["colors"] = plan.M;
  j["max_link_load_per_unit_rate"] = loads.map.max_undirected().load;
  j["messages"] = {{"REQ", trace.count[0]}, {"ACK", trace.count[1]},
                   {"REQm", trace.count[2]}, {"COMP_REG", trace.count[3]}};
  emit(c, cfg, "simulation.json", j);
  return failures == 0 ? 0 : 3;
}

int cmd_sweep(const Common& c) {
  const auto cfg = resolve(c);
  const auto t = run_sweep(cfg);
  const auto csv = sweep_csv(t);
  io::write_text(out_path(cfg, "sweep.csv"), csv);
  io::write_json(out_path(cfg, "sweep.json"), io::to_json(t));
  if (!c.quiet) std::cout << csv;
  std::cerr << "wrote " << out_path(cfg, "sweep.csv") << "\n";
  return 0;
}

struct FitArgs {
  std::string input;
  std::string x = "param";
  std::string y = "gamma_A";
  std::string model = "power";
};

int cmd_fit(const FitArgs& a) {
  std::ifstream f(a.input);
  if (!f) fail(Errc::invalid_argument, "cannot open '" + a.input + "'");
  std::string line;
  std::getline(f, line);
  std::vector<std::string> head;
  {
    std::stringstream ss(line);
    std::string h;
    while (std::getline(ss, h, ',')) head.push_back(detail::trim(h));
  }
  auto col = [&](const std::string& name) {
    auto it = std::find(head.begin(), head.end(), name);
    if (it == head.end()) fail(Errc::invalid_argument, "no column '" + name + "'");
    return static_cast<size_t>(it - head.begin());
  };
  const size_t cx = col(a.x), cy = col(a.y);
  std::vector<double> xs, ys;
  while (std::getline(f, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string v;
    while (std::getline(ss, v, ',')) cells.push_back(detail::trim(v));
    if (cells.size() <= std::max(cx, cy) || cells[cx].empty() || cells[cy].empty())
      continue;
    xs.push_back(detail::parse_double(a.x, cells[cx]));
    ys.push_back(detail::parse_double(a.y, cells[cy]));
  }
  const auto fit = fit_scaling(xs, ys, parse_scaling_model(a.model));
  Json j = io::document("fit");
  j["x"] = a.x;
  j["y"] = a.y;
  j["model"] = a.model;
  j["slope"] = fit.slope;
  j["intercept"] = fit.intercept;
  j["r2"] = fit.r2;
  j["max_abs_residual"] = fit.max_abs_residual;
  j["n"] = fit.n;
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PHY caching analysis and simulation"};
  app.require_subcommand(1);
  Common common;
  FitArgs fit;
  auto* constants = app.add_subcommand("constants", "interference constants and link rates");
  auto* repl = app.add_subcommand("replicate", "cache replication vector");
  auto* thr = app.add_subcommand("throughput", "closed-form throughput report");
  auto* sim = app.add_subcommand("simulate", "protocol and delivery simulation");
  auto* sweep = app.add_subcommand("sweep", "parameter sweep table");
  auto* fitc = app.add_subcommand("fit", "log-log slope of a CSV table");
  for (auto* s : {constants, repl, thr, sim, sweep}) add_common(s, common);
  fitc->add_option("input", fit.input, "CSV file")->required();
  fitc->add_option("--x", fit.x, "abscissa column");
  fitc->add_option("--y", fit.y, "ordinate column");
  fitc->add_option("--model", fit.model, "power|log_corrected");
  CLI11_PARSE(app, argc, argv);
  try {
    if (*constants) return cmd_constants(common);
    if (*repl) return cmd_replicate(common);
    if (*thr) return cmd_throughput(common);
    if (*sim) return cmd_simulate(common);
    if (*sweep) return cmd_sweep(common);
    if (*fitc) return cmd_fit(fit);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
