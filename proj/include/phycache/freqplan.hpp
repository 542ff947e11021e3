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

#ifndef PHYCACHE_FREQPLAN_HPP_
#define PHYCACHE_FREQPLAN_HPP_

#include <algorithm>
#include <cmath>
#include <vector>

#include "phycache/channel.hpp"
#include "phycache/error.hpp"
#include "phycache/topology.hpp"

namespace phycache {

struct FrequencyPlan {
  double W_b = 0.0;
  double W_c = 0.0;
  int M = 0;
  std::vector<int> subband_of_node;
  double power_multihop = 0.0;
  double power_comp = 0.0;
};

/// Upper bound on the colours needed so that nodes within r_I differ.
inline double reuse_color_bound(double r_I, double r_min) {
  const double t = 2.0 * r_I / r_min + 1.0;
  return t * t + 1.0;
}

/// Greedy colouring of the conflict graph (pairs within r_I) in node order.
inline std::vector<int> color_subbands(const NodePlacement& pl, double r_I) {
  if (!(r_I > 2.0 * pl.r_max()))
    fail(Errc::invalid_reuse_distance, "r_I must exceed 2 r_max");
  const int n = pl.size();
  std::vector<int> color(n, -1);
  SpatialIndex idx(pl, r_I);
  std::vector<char> used;
  for (NodeId i = 0; i < n; ++i) {
    used.assign(used.size(), 0);
    idx.for_each_within(pl.position(i), r_I, [&](int j, double) {
      if (j == i || color[j] < 0) return;
      if (color[j] >= static_cast<int>(used.size())) used.resize(color[j] + 1, 0);
      used[color[j]] = 1;
    });
    int c = 0;
    while (c < static_cast<int>(used.size()) && used[c]) ++c;
    color[i] = c;
  }
  return color;
}

inline int color_count(const std::vector<int>& color) {
  return color.empty() ? 0 : *std::max_element(color.begin(), color.end()) + 1;
}

/// True iff every pair within r_I has distinct colours.
inline bool satisfies_reuse_condition(const NodePlacement& pl,
                                      const std::vector<int>& color,
                                      double r_I) {
  SpatialIndex idx(pl, r_I);
  for (NodeId i = 0; i < pl.size(); ++i) {
    bool ok = true;
    idx.for_each_within(pl.position(i), r_I, [&](int j, double) {
      if (j != i && color[j] == color[i]) ok = false;
    });
    if (!ok) return false;
  }
  return true;
}

/// 3x3 reuse pattern on a regular grid: 3 (row mod 3) + (col mod 3).
inline std::vector<int> grid_reuse_9(const NodePlacement& pl) {
  if (!pl.is_grid())
    fail(Errc::wrong_placement_kind, "reuse-9 pattern needs a regular grid");
  std::vector<int> color(pl.size());
  for (NodeId i = 0; i < pl.size(); ++i) {
    const auto [r, c] = pl.grid_cell(i);
    color[i] = 3 * (r % 3) + (c % 3);
  }
  return color;
}

/// Builds a plan with W_b = W - 2 W_c and bandwidth-proportional power.
inline FrequencyPlan make_plan(const SystemParams& sp, double W_c,
                               std::vector<int> coloring) {
  if (!(W_c >= 0.0 && 2.0 * W_c <= sp.W))
    fail(Errc::invalid_bandwidth_split, "W_c must lie in [0, W/2]");
  FrequencyPlan plan;
  plan.W_c = W_c;
  plan.W_b = sp.W - 2.0 * W_c;
  plan.M = color_count(coloring);
  plan.subband_of_node = std::move(coloring);
  return plan;
}

struct PowerAllocation {
  double multihop = 0.0;
  double comp = 0.0;
};

inline PowerAllocation allocate_power(const SystemParams& sp,
                                      const FrequencyPlan& plan) {
  const double den = plan.W_b + plan.M * plan.W_c;
  if (!(den > 0.0))
    fail(Errc::invalid_bandwidth_split, "plan carries no bandwidth");
  return {plan.W_b * sp.P / den, plan.M * plan.W_c * sp.P / den};
}

inline FrequencyPlan with_power(const SystemParams& sp, FrequencyPlan plan) {
  const auto pw = allocate_power(sp, plan);
  plan.power_multihop = pw.multihop;
  plan.power_comp = pw.comp;
  return plan;
}

}  // namespace phycache

#endif  // PHYCACHE_FREQPLAN_HPP_
