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

#ifndef PHYCACHE_CHANNEL_HPP_
#define PHYCACHE_CHANNEL_HPP_

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "phycache/error.hpp"
#include "phycache/lattice.hpp"
#include "phycache/random.hpp"
#include "phycache/topology.hpp"

namespace phycache {

/// Physical-layer and cache parameters. Powers are normalised so that the
/// noise spectral density is one; rates are in nats.
struct SystemParams {
  double P = 1.0;        // transmit power per node
  double W = 1.0e6;      // system bandwidth, Hz
  double alpha = 3.9;    // path-loss exponent
  double r_0 = 100.0;    // nominal node spacing, m
  double r_I = 250.0;    // spatial reuse distance, m
  int N_c = 9;           // CoMP cluster size
  double L_S = 524288;   // segment size, bits
  double B_C = 4.0 * 8388608;  // cache size, bits
  double F = 8388608;    // file size, bits

  /// Received SNR at distance r_0 with the full band, P r_0^-a / W.
  double snr() const { return P * std::pow(r_0, -alpha) / W; }

  SystemParams& set_snr_db(double db) {
    P = std::pow(10.0, db / 10.0) * W * std::pow(r_0, alpha);
    return *this;
  }

  double budget() const { return B_C / F; }

  bool operator==(const SystemParams&) const = default;
};

inline void validate_alpha(double alpha) {
  if (!(alpha > 2.0))
    fail(Errc::divergent_sum, "path-loss exponent must exceed 2");
}

inline double channel_gain(double d, double alpha) {
  if (!(d > 0.0)) fail(Errc::degenerate_distance, "zero link distance");
  return std::pow(d, -alpha);
}

struct LatticeConstant {
  double value = 0.0;
  int truncation_radius = 0;
  double tail_bound = 0.0;
};

inline LatticeConstant compute_I_R(double r_0, double alpha, double tol = 1e-8) {
  validate_alpha(alpha);
  auto s = lattice::adaptive(
      [&](int k) { return lattice::reuse9_interference_sum(alpha, k); }, tol);
  const double scale = std::pow(r_0, -alpha);
  return {s.value * scale, s.radius, s.tail_bound * scale};
}

struct GainConstants {
  double G_C = 0.0;
  double rho = 0.0;
  int truncation_radius = 0;
  double tail_bound = 0.0;
};

/// Aggregate gain of a node towards every node of the opposite checkerboard
/// layer, and the coefficient rho = (1 - r_0^-a / G_C)^2 / 2.
inline GainConstants compute_G_C_rho(double r_0, double alpha,
                                     double tol = 1e-8) {
  validate_alpha(alpha);
  auto s = lattice::adaptive(
      [&](int k) { return lattice::checkerboard_gain_sum(alpha, k); }, tol);
  const double scale = std::pow(r_0, -alpha);
  GainConstants out;
  out.G_C = s.value * scale;
  out.truncation_radius = s.radius;
  out.tail_bound = s.tail_bound * scale;
  const double t = 1.0 - 1.0 / s.value;
  out.rho = 0.5 * t * t;
  return out;
}

inline double compute_I_A(double P, double r_I, double r_min, double r_max,
                          double alpha) {
  validate_alpha(alpha);
  if (!(r_I > 2.0 * r_max))
    fail(Errc::invalid_reuse_distance, "r_I must exceed 2 r_max");
  const double gap = r_I - 2.0 * r_max;
  return 4.0 * P * (gap + r_min) /
         (r_min * r_min * std::pow(gap, alpha - 1.0)) *
         (2.0 / (alpha - 2.0) + 1.0 / (alpha - 1.0) + 3.0);
}

struct InterferenceConstants {
  double I_R = 0.0;
  double G_C = 0.0;
  double rho = 0.0;
  double I_A = 0.0;  // zero when the placement radii were not supplied
  int truncation_radius = 0;
  double tail_bound_I_R = 0.0;
  double tail_bound_G_C = 0.0;
};

inline InterferenceConstants compute_constants(const SystemParams& sp,
                                               double tol = 1e-8) {
  InterferenceConstants c;
  const auto ir = compute_I_R(sp.r_0, sp.alpha, tol);
  const auto gc = compute_G_C_rho(sp.r_0, sp.alpha, tol);
  c.I_R = ir.value;
  c.G_C = gc.G_C;
  c.rho = gc.rho;
  c.truncation_radius = std::max(ir.truncation_radius, gc.truncation_radius);
  c.tail_bound_I_R = ir.tail_bound;
  c.tail_bound_G_C = gc.tail_bound;
  return c;
}

inline InterferenceConstants compute_constants(const SystemParams& sp,
                                               double r_min, double r_max,
                                               double tol = 1e-8) {
  auto c = compute_constants(sp, tol);
  c.I_A = compute_I_A(sp.P, sp.r_I, r_min, r_max, sp.alpha);
  return c;
}

inline double link_rate_R_b(const SystemParams& sp,
                            const InterferenceConstants& c) {
  const double s = 9.0 * sp.P * std::pow(sp.r_0, -sp.alpha);
  return std::log1p(s / (sp.W + 9.0 * sp.P * c.I_R)) / 9.0;
}

inline double link_rate_R_m(double W_c, const SystemParams& sp,
                            const InterferenceConstants& c) {
  if (!(W_c >= 0.0 && W_c <= sp.W / 2.0))
    fail(Errc::invalid_bandwidth_split, "W_c must lie in [0, W/2]");
  const double s = 9.0 * sp.P * std::pow(sp.r_0, -sp.alpha);
  return std::log1p(s / (sp.W + 7.0 * W_c + 9.0 * sp.P * c.I_R)) / 9.0;
}

inline double link_rate_R_m_lower(const SystemParams& sp,
                                  const InterferenceConstants& c) {
  const double s = 2.0 * sp.P * std::pow(sp.r_0, -sp.alpha);
  return std::log1p(s / (sp.W + 2.0 * sp.P * c.I_R)) / 9.0;
}

struct CompRateBounds {
  double lower = 0.0;
  double upper = 0.0;
};

inline CompRateBounds comp_rate_bounds(const SystemParams& sp,
                                       const InterferenceConstants& c) {
  CompRateBounds b;
  b.upper = std::log1p(9.0 * sp.P * c.G_C / sp.W);
  b.lower = c.rho * std::log1p(2.0 * sp.P * std::pow(sp.r_0, -sp.alpha) / sp.W);
  return b;
}

/// Per-node power of the scheduled nodes in the dual CoMP network.
inline double comp_dual_power(const SystemParams& sp, double W_c) {
  return 9.0 * W_c * sp.P / (sp.W + 7.0 * W_c);
}

/// One CoMP cluster: `tx` are the cooperating transmitters, `rx` the
/// receivers they serve in this slot.
struct TxCluster {
  std::vector<NodeId> tx;
  std::vector<NodeId> rx;
};

struct McRate {
  double sum_rate = 0.0;        // E log det, nats/s/Hz per cluster
  double sum_rate_stderr = 0.0;
  double per_node = 0.0;        // sum_rate / |tx|
  double per_node_stderr = 0.0;
  int n_samples = 0;
};

/// Monte-Carlo cluster sum rate over i.i.d. uniform phases, evaluated in the
/// dual network: the receivers transmit at power P' to the transmitter
/// array, and the receivers of other clusters (`interferers`) are treated as
/// noise,
///   E log det(I + P' Omega^-1 H H^H),  Omega = W_c I + P' sum h h^H.
inline McRate comp_cluster_rate_mc(const NodePlacement& pl,
                                   const SystemParams& sp,
                                   const TxCluster& cluster,
                                   const std::vector<NodeId>& interferers,
                                   double W_c, int n_samples,
                                   std::uint64_t seed) {
  if (n_samples < 1) fail(Errc::invalid_argument, "n_samples must be >= 1");
  if (!(W_c > 0.0)) fail(Errc::invalid_bandwidth_split, "W_c must be positive");
  for (NodeId a : cluster.tx)
    for (NodeId b : cluster.rx)
      if (a == b) fail(Errc::invalid_argument, "Tx and Rx sets overlap");
  using cd = std::complex<double>;
  using Mat = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic>;
  const int nt = static_cast<int>(cluster.tx.size());
  const int nr = static_cast<int>(cluster.rx.size());
  const int ni = static_cast<int>(interferers.size());
  const double snr = comp_dual_power(sp, W_c) / W_c;

  // Amplitudes are fixed by geometry; only phases are drawn.
  Eigen::MatrixXd amp(nt, nr), amp_i(nt, ni);
  for (int a = 0; a < nt; ++a) {
    for (int b = 0; b < nr; ++b)
      amp(a, b) = std::sqrt(
          snr * channel_gain(pl.distance(cluster.tx[a], cluster.rx[b]), sp.alpha));
    for (int b = 0; b < ni; ++b)
      amp_i(a, b) = std::sqrt(
          snr * channel_gain(pl.distance(cluster.tx[a], interferers[b]), sp.alpha));
  }

  Rng g(seed);
  const double two_pi = 6.283185307179586;
  auto phase = [&] {
    const double t = two_pi * uniform01(g);
    return cd(std::cos(t), std::sin(t));
  };
  double mean = 0.0, m2 = 0.0;
  Mat H(nt, nr), Hi(nt, ni);
  for (int k = 0; k < n_samples; ++k) {
    for (int b = 0; b < nr; ++b)
      for (int a = 0; a < nt; ++a) H(a, b) = amp(a, b) * phase();
    for (int b = 0; b < ni; ++b)
      for (int a = 0; a < nt; ++a) Hi(a, b) = amp_i(a, b) * phase();
    Mat omega = Mat::Identity(nt, nt);
    if (ni > 0) omega.noalias() += Hi * Hi.adjoint();
    Mat full = omega;
    full.noalias() += H * H.adjoint();
    const Eigen::LLT<Mat> lo(omega), lf(full);
    double ld = 0.0;
    for (int a = 0; a < nt; ++a)
      ld += 2.0 * (std::log(lf.matrixL()(a, a).real()) -
                   std::log(lo.matrixL()(a, a).real()));
    const double d = ld - mean;
    mean += d / (k + 1);
    m2 += d * (ld - mean);
  }
  McRate out;
  out.n_samples = n_samples;
  out.sum_rate = mean;
  out.sum_rate_stderr =
      n_samples > 1 ? std::sqrt(m2 / (n_samples - 1) / n_samples) : 0.0;
  const double denom = std::max(1, nt);
  out.per_node = mean / denom;
  out.per_node_stderr = out.sum_rate_stderr / denom;
  return out;
}

}  // namespace phycache

#endif  // PHYCACHE_CHANNEL_HPP_
