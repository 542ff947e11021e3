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

#ifndef PHYCACHE_THROUGHPUT_HPP_
#define PHYCACHE_THROUGHPUT_HPP_

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "phycache/channel.hpp"
#include "phycache/coding.hpp"
#include "phycache/error.hpp"
#include "phycache/replication.hpp"

namespace phycache {

/// Hop radius of the ring of sources: ceil((-1 + sqrt(2/q - 1)) / 2).
inline long phi(double q) {
  if (!(q > 0.0)) fail(Errc::domain_error, "phi needs q > 0");
  if (q > 1.0) fail(Errc::domain_error, "phi needs q <= 1");
  const double x = (-1.0 + std::sqrt(2.0 / q - 1.0)) / 2.0;
  // Snap values that differ from an integer only by rounding.
  const double c = std::ceil(x - 1e-9);
  return c < 0 ? 0 : static_cast<long>(c);
}

/// [phi (1 - q) - (2/3)(phi^3 - phi) q] / 2 for any field type.
template <class T>
T psi_given_phi(const T& q, long f) {
  const T ff(f);
  return (ff * (T(1) - q) - T(2) * (ff * ff * ff - ff) * q / T(3)) / T(2);
}

inline double psi(double q) { return psi_given_phi(q, phi(q)); }

struct TrafficFactors {
  double multihop = 0.0;  // sum over q < 1/2 of p psi(q)
  double comp = 0.0;      // sum over q >= 1/2 of p (1 - q)
  double all = 0.0;       // sum over every file of p psi(q)
};

inline TrafficFactors traffic_factors(const std::vector<double>& q,
                                      const std::vector<double>& p) {
  if (q.size() != p.size()) fail(Errc::invalid_argument, "size mismatch");
  TrafficFactors t;
  for (size_t l = 0; l < q.size(); ++l) {
    const double s = p[l] * psi(q[l]);
    t.all += s;
    if (mode_of(q[l]) == CacheMode::multihop)
      t.multihop += s;
    else
      t.comp += p[l] * (1.0 - q[l]);
  }
  return t;
}

inline double gamma_B(const std::vector<double>& q,
                      const std::vector<double>& p, const SystemParams& sp,
                      const InterferenceConstants& c) {
  const double den = traffic_factors(q, p).all;
  if (!(den > 0.0))
    fail(Errc::infinite_throughput, "every request is served locally");
  return sp.W * link_rate_R_b(sp, c) / den;
}

enum class RcSource { lower_bound, upper_bound, monte_carlo, custom };

inline const char* rc_source_name(RcSource s) {
  switch (s) {
    case RcSource::lower_bound: return "bound_lower";
    case RcSource::upper_bound: return "bound_upper";
    case RcSource::monte_carlo: return "monte_carlo";
    case RcSource::custom: return "custom";
  }
  return "custom";
}

inline RcSource parse_rc_source(const std::string& s) {
  if (s == "bound_lower" || s == "lower") return RcSource::lower_bound;
  if (s == "bound_upper" || s == "upper") return RcSource::upper_bound;
  if (s == "monte_carlo" || s == "mc") return RcSource::monte_carlo;
  fail(Errc::parse_error, "unknown R_c source '" + s + "'");
}

/// R_c as a function of the CoMP bandwidth.
using RcFunction = std::function<double(double W_c)>;

inline RcFunction rc_bound(const SystemParams& sp,
                           const InterferenceConstants& c, bool upper) {
  const auto b = comp_rate_bounds(sp, c);
  const double v = upper ? b.upper : b.lower;
  return [v](double) { return v; };
}

struct BandwidthSplit {
  double W_c = 0.0;
  double gamma_A = 0.0;
  double residual = 0.0;  // |Q_c (W - 2 W_c) R_m - Q_mh W_c R_c| at W_c
  double R_m = 0.0;
  double R_c = 0.0;
  TrafficFactors factors;
};

/// Balances the multihop and CoMP bands:
///   Q_c (W - 2 W_c) R_m(W_c) = Q_mh W_c R_c(W_c),
/// then Gamma_A = W R_m / (Q_mh + 2 Q_c R_m / R_c).
inline BandwidthSplit solve_W_c_star(const std::vector<double>& q,
                                     const std::vector<double>& p,
                                     const SystemParams& sp,
                                     const InterferenceConstants& c,
                                     const RcFunction& rc) {
  BandwidthSplit out;
  out.factors = traffic_factors(q, p);
  const double Qm = out.factors.multihop, Qc = out.factors.comp;
  if (Qm <= 0.0 && Qc <= 0.0)
    fail(Errc::infinite_throughput, "every request is served locally");
  if (Qc <= 0.0) {
    out.W_c = 0.0;
    out.R_m = link_rate_R_m(0.0, sp, c);
    out.gamma_A = sp.W * out.R_m / Qm;
    return out;
  }
  if (Qm <= 0.0) {
    out.W_c = sp.W / 2.0;
    out.R_m = link_rate_R_m(out.W_c, sp, c);
    out.R_c = rc(out.W_c);
    out.gamma_A = out.W_c * out.R_c / Qc;
    return out;
  }
  auto h = [&](double w) {
    return Qc * (sp.W - 2.0 * w) * link_rate_R_m(w, sp, c) - Qm * w * rc(w);
  };
  double a = 0.0, b = sp.W / 2.0;
  for (int it = 0; it < 200 && b - a > 1e-15 * sp.W; ++it) {
    const double mid = 0.5 * (a + b);
    if (h(mid) > 0.0)
      a = mid;
    else
      b = mid;
  }
  out.W_c = 0.5 * (a + b);
  out.residual = std::fabs(h(out.W_c));
  out.R_m = link_rate_R_m(out.W_c, sp, c);
  out.R_c = rc(out.W_c);
  out.gamma_A = sp.W * out.R_m / (Qm + 2.0 * Qc * out.R_m / out.R_c);
  return out;
}

struct GammaBounds {
  double lower = 0.0;
  double upper = 0.0;
};

inline double gamma_A_closed(double W, double R_m, double R_c,
                             const TrafficFactors& t) {
  if (t.multihop <= 0.0 && t.comp <= 0.0)
    fail(Errc::infinite_throughput, "every request is served locally");
  if (t.comp <= 0.0) return W * R_m / t.multihop;
  if (t.multihop <= 0.0) return W * R_c / (2.0 * t.comp);
  return W * R_m / (t.multihop + 2.0 * t.comp * R_m / R_c);
}

inline GammaBounds gamma_A_bounds(const std::vector<double>& q,
                                  const std::vector<double>& p,
                                  const SystemParams& sp,
                                  const InterferenceConstants& c) {
  const auto t = traffic_factors(q, p);
  const auto rc = comp_rate_bounds(sp, c);
  return {gamma_A_closed(sp.W, link_rate_R_m_lower(sp, c), rc.lower, t),
          gamma_A_closed(sp.W, link_rate_R_b(sp, c), rc.upper, t)};
}

/// Limit of Gamma_A as power and cluster size grow: W/(9 Q_mh) log(1 + r_0^-a / I_R).
inline double gamma_A_high_snr(const std::vector<double>& q,
                               const std::vector<double>& p,
                               const SystemParams& sp,
                               const InterferenceConstants& c) {
  const auto t = traffic_factors(q, p);
  if (!(t.multihop > 0.0))
    fail(Errc::not_applicable, "limit needs at least one multihop file");
  return sp.W / (9.0 * t.multihop) *
         std::log1p(std::pow(sp.r_0, -sp.alpha) / c.I_R);
}

struct PhyCachingGain {
  double lower = 0.0;
  double upper = 0.0;
  std::optional<double> high_snr;  // empty when no file is served by multihop
};

inline PhyCachingGain phy_caching_gain(const std::vector<double>& q,
                                       const std::vector<double>& p,
                                       const SystemParams& sp,
                                       const InterferenceConstants& c) {
  PhyCachingGain g;
  const double gb = gamma_B(q, p, sp, c);
  const auto b = gamma_A_bounds(q, p, sp, c);
  g.lower = b.lower - gb;
  g.upper = b.upper - gb;
  const auto t = traffic_factors(q, p);
  double comp_psi = 0.0;
  for (size_t l = 0; l < q.size(); ++l)
    if (mode_of(q[l]) == CacheMode::comp) comp_psi += p[l] * psi(q[l]);
  if (comp_psi <= 0.0) {
    g.high_snr = 0.0;
  } else if (t.multihop > 0.0) {
    g.high_snr = sp.W / 9.0 * std::log1p(std::pow(sp.r_0, -sp.alpha) / c.I_R) *
                 comp_psi / (t.multihop * t.all);
  }
  return g;
}

struct GeneralRate {
  double rate = 0.0;  // achievable representative, constant set to one
  double M = 0.0;
  double I_A = 0.0;
  double C_B = 0.0;
};

inline GeneralRate general_network_rate(double r_min, double r_max,
                                        const std::vector<double>& q,
                                        const std::vector<double>& p,
                                        const SystemParams& sp) {
  GeneralRate g;
  g.I_A = compute_I_A(sp.P, sp.r_I, r_min, r_max, sp.alpha);
  const double t = 2.0 * sp.r_I / r_min + 1.0;
  g.M = t * t + 1.0;
  g.C_B = sp.W / g.M *
          std::log1p(3.0 * g.M * sp.P * std::pow(2.0 * r_max, -sp.alpha) /
                     ((g.M + 1.0) * sp.W + 3.0 * g.M * g.I_A));
  g.rate = g.C_B / objective(q, p);
  return g;
}

inline GeneralRate general_network_rate(const NodePlacement& pl,
                                        const std::vector<double>& q,
                                        const std::vector<double>& p,
                                        const SystemParams& sp) {
  return general_network_rate(pl.r_min(), pl.r_max(), q, p, sp);
}

/// Everything the closed forms say about one (q, p, params) point.
struct ThroughputReport {
  double gamma_B = 0.0;
  double gamma_A = 0.0;
  double gamma_A_lower = 0.0;
  double gamma_A_upper = 0.0;
  double W_c_star = 0.0;
  double residual = 0.0;
  double delta_gamma_lower = 0.0;
  double delta_gamma_upper = 0.0;
  std::optional<double> delta_gamma_highsnr;
  std::optional<double> gamma_A_limit;
  double Q_multihop = 0.0;
  double Q_comp = 0.0;
  double R_b = 0.0;
  double R_m = 0.0;
  double R_c = 0.0;
  std::optional<GeneralRate> general;
  RcSource rc_source = RcSource::lower_bound;
};

inline ThroughputReport throughput_report(
    const std::vector<double>& q, const std::vector<double>& p,
    const SystemParams& sp, const InterferenceConstants& c,
    RcSource source = RcSource::lower_bound, RcFunction rc = nullptr) {
  ThroughputReport r;
  r.rc_source = source;
  if (!rc) rc = rc_bound(sp, c, source == RcSource::upper_bound);
  r.R_b = link_rate_R_b(sp, c);
  r.gamma_B = gamma_B(q, p, sp, c);
  const auto split = solve_W_c_star(q, p, sp, c, rc);
  r.gamma_A = split.gamma_A;
  r.W_c_star = split.W_c;
  r.residual = split.residual;
  r.R_m = split.R_m;
  r.R_c = split.R_c;
  r.Q_multihop = split.factors.multihop;
  r.Q_comp = split.factors.comp;
  const auto b = gamma_A_bounds(q, p, sp, c);
  r.gamma_A_lower = b.lower;
  r.gamma_A_upper = b.upper;
  const auto g = phy_caching_gain(q, p, sp, c);
  r.delta_gamma_lower = g.lower;
  r.delta_gamma_upper = g.upper;
  r.delta_gamma_highsnr = g.high_snr;
  if (r.Q_multihop > 0.0) r.gamma_A_limit = gamma_A_high_snr(q, p, sp, c);
  return r;
}

// ---------------------------------------------------------------------------
// Scaling

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 1.0;
  double max_abs_residual = 0.0;
  int n = 0;
};

/// Least squares of log y against log x.
inline LogLogFit fit_loglog(const std::vector<double>& x,
                            const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    fail(Errc::invalid_argument, "need at least two matching points");
  const int n = static_cast<int>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<double> lx(n), ly(n);
  for (int i = 0; i < n; ++i) {
    if (!(x[i] > 0 && y[i] > 0)) fail(Errc::domain_error, "log of non-positive");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
    sx += lx[i], sy += ly[i], sxx += lx[i] * lx[i], sxy += lx[i] * ly[i];
  }
  LogLogFit f;
  f.n = n;
  const double den = n * sxx - sx * sx;
  f.slope = den != 0 ? (n * sxy - sx * sy) / den : 0.0;
  f.intercept = (sy - f.slope * sx) / n;
  const double mean = sy / n;
  double ss_tot = 0, ss_res = 0;
  for (int i = 0; i < n; ++i) {
    const double r = ly[i] - (f.intercept + f.slope * lx[i]);
    ss_res += r * r;
    ss_tot += (ly[i] - mean) * (ly[i] - mean);
    f.max_abs_residual = std::max(f.max_abs_residual, std::fabs(r));
  }
  f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return f;
}

/// Order-optimal rate 1 / sum p_l sqrt(1/q_l*) for a Zipf library.
inline double order_optimal_rate(double tau, int L, double budget, double N) {
  const auto pop = zipf(L, tau);
  return 1.0 / objective(order_optimal_q(pop.p, budget, N), pop.p);
}

struct ScalingResult {
  std::vector<double> L;
  std::vector<double> rate;
  LogLogFit fit;
};

inline ScalingResult scaling_exponent(double tau, double budget,
                                      const std::vector<int>& L_grid,
                                      const std::function<double(int)>& N_of_L) {
  if (L_grid.size() < 6) fail(Errc::invalid_argument, "need at least 6 points");
  ScalingResult out;
  for (int L : L_grid) {
    out.L.push_back(L);
    out.rate.push_back(order_optimal_rate(tau, L, budget, N_of_L(L)));
  }
  out.fit = fit_loglog(out.L, out.rate);
  return out;
}

}  // namespace phycache

#endif  // PHYCACHE_THROUGHPUT_HPP_
