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
#include <set>

#include "phycache/delivery.hpp"
#include "phycache/random.hpp"
#include "phycache/replication.hpp"
#include "phycache/throughput.hpp"

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

// Owners of densely sampled points along the perturbed segment.
std::vector<NodeId> sampled_cells(const VoronoiPartition& vor, NodeId a, NodeId b) {
  const auto& pl = vor.placement();
  const Point A = pl.position(a) + route_perturbation(pl);
  const Point D = pl.displacement(a, b);
  std::vector<NodeId> out;
  const int steps = 20000;
  for (int i = 0; i <= steps; ++i) {
    const NodeId o = vor.owner(pl.wrap(A + (double(i) / steps) * D));
    if (out.empty() || out.back() != o) out.push_back(o);
  }
  return out;
}

NodePlacement eight_node_layout() {
  std::vector<Point> pts;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 4; ++c) pts.push_back({c + 0.5, 1.5 - r});
  return make_custom_placement(pts, 4, 2, 1, 1, 0.75);
}

TEST(Sources, GridExample) {
  const auto pl = make_regular_grid(5, 100);
  const auto s = select_sources(pl, 12, 0, 0.12, 1.0);
  EXPECT_EQ(s.B_n.size(), 8u);
  EXPECT_EQ(s.B_bar_n.size(), 4u);
  for (const auto& sh : s.shares) EXPECT_NEAR(sh.bits, sh.inner ? 0.12 : 0.10, 1e-12);
  EXPECT_NEAR(s.bits_from_others(), 0.88, 1e-12);
  EXPECT_NEAR(s.r_star, 100 * std::sqrt(2.0), 1e-9);
}

TEST(Sources, JustBelowHalf) {
  const auto pl = make_regular_grid(5, 100);
  const auto s = select_sources(pl, 12, 0, 0.5 - 1e-6, 1.0);
  EXPECT_EQ(replicas_needed(0.5 - 1e-6), 3);
  EXPECT_EQ(s.B_n.size(), 2u);
  EXPECT_EQ(s.B_n, (std::vector<NodeId>{7, 11}));
  EXPECT_GE(s.bits_from_others() + s.local_bits(), 1.0 - 1e-12);
}

TEST(Sources, HopRankingKeepsWholeRing) {
  const auto pl = make_regular_grid(7, 100, true);
  const auto s = select_sources(pl, 24, 0, 0.3, 1.0, SourceMetric::grid_hops);
  EXPECT_EQ(s.B_n.size(), 4u);
  EXPECT_TRUE(s.B_bar_n.empty());
  for (const auto& sh : s.shares) EXPECT_NEAR(sh.bits, 0.7 / 4, 1e-12);
}

TEST(Sources, TooFewNodes) {
  const auto pl = make_regular_grid(3, 100);
  EXPECT_EQ(code_of([&] { select_sources(pl, 0, 0, 0.05, 1.0); }),
            Errc::insufficient_replicas);
}

TEST(Sources, InvariantsOnRandomPlacements) {
  Rng g(21);
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto pl = make_constrained_random(64, 100, 50, 75, seed);
    for (int t = 0; t < 5; ++t) {
      const NodeId n = static_cast<NodeId>(uniform_index(g, 64));
      const double q = uniform(g, 0.02, 0.49);
      const auto s = select_sources(pl, n, 0, q, 1.0);
      ASSERT_LE(s.r_star, source_radius_bound(q, pl.r_max()) * (1 + 1e-12));
      ASSERT_GE(s.bits_from_others() + q, 1.0 - 1e-9);
      int within = 1;
      for (NodeId j = 0; j < pl.size(); ++j)
        if (j != n && pl.distance(n, j) <= s.r_star * (1 + 1e-9)) ++within;
      ASSERT_GE(within, replicas_needed(q));
      for (const auto& sh : s.shares)
        if (sh.inner) ASSERT_NEAR(sh.bits, q, 1e-12);
    }
  }
}

TEST(Routing, AdjacentNodesTakeOneHop) {
  const auto pl = make_regular_grid(6, 100);
  const auto vor = voronoi(pl);
  const auto p = route(vor, 7, 8);
  EXPECT_EQ(p.nodes, (std::vector<NodeId>{7, 8}));
}

TEST(Routing, MiddleCellIsCrossed) {
  // Node 1 is in the middle; the others sit off the line.
  const auto pl = make_custom_placement(
      {{50, 100}, {150, 110}, {250, 100}, {150, 20}, {150, 190}, {50, 10}, {250, 190}},
      300, 200, 100, 50, 150);
  const auto vor = voronoi(pl);
  EXPECT_EQ(route(vor, 0, 2).nodes, (std::vector<NodeId>{0, 1, 2}));
  EXPECT_EQ(route(vor, 2, 0).nodes, (std::vector<NodeId>{2, 1, 0}));
}

TEST(Routing, MatchesSampledSegment) {
  const auto pl = make_constrained_random(144, 100, 50, 75, 5);
  const auto vor = voronoi(pl);
  Rng g(2);
  for (int t = 0; t < 200; ++t) {
    const NodeId a = static_cast<NodeId>(uniform_index(g, 144));
    const NodeId b = static_cast<NodeId>(uniform_index(g, 144));
    if (a == b) continue;
    ASSERT_EQ(route(vor, a, b).nodes, sampled_cells(vor, a, b)) << a << " " << b;
  }
}

TEST(Routing, ReverseIsSymmetric) {
  const auto pl = make_constrained_random(256, 100, 50, 75, 1);
  const auto vor = voronoi(pl);
  const Router r(vor);
  Rng g(3);
  int asym = 0;
  for (int t = 0; t < 1000; ++t) {
    const NodeId a = static_cast<NodeId>(uniform_index(g, 256));
    const NodeId b = static_cast<NodeId>(uniform_index(g, 256));
    auto f = r(a, b).nodes;
    std::reverse(f.begin(), f.end());
    if (f != r(b, a).nodes) ++asym;
  }
  EXPECT_EQ(asym, 0);
}

TEST(Routing, GridCacheAgreesWithDirectWalk) {
  const auto pl = make_regular_grid(12, 100, true);
  const auto vor = voronoi(pl);
  const Router r(vor);
  for (NodeId a = 0; a < pl.size(); a += 7)
    for (NodeId b = 0; b < pl.size(); b += 5)
      ASSERT_EQ(r(a, b).nodes, route(vor, a, b).nodes) << a << " " << b;
}

TEST(LinkLoad, TorusMatchesTrafficFactor) {
  const auto pl = make_regular_grid(32, 100, true);
  const auto vor = voronoi(pl);
  const Router r(vor);
  LoadOptions o;
  o.metric = SourceMetric::grid_hops;
  const auto rep = accumulate_link_load(r, {1.0}, {0.12}, 1.0, o);
  EXPECT_NEAR(rep.map.max_undirected().load, psi(0.12), 0.01 * psi(0.12));
}

TEST(LinkLoad, FullReplicationCarriesNothing) {
  const auto pl = make_regular_grid(8, 100);
  const auto vor = voronoi(pl);
  const Router r(vor);
  const auto rep = accumulate_link_load(r, {0.5, 0.5}, {1.0, 1.0}, 1.0);
  EXPECT_EQ(rep.map.total(), 0.0);
  EXPECT_TRUE(rep.map.links().empty());
}

TEST(LinkLoad, FlowConservation) {
  const auto pl = make_constrained_random(100, 100, 50, 75, 3);
  const auto vor = voronoi(pl);
  const Router r(vor);
  const auto p = zipf(6, 1).p;
  const std::vector<double> q{0.4, 0.3, 0.2, 0.1, 0.1, 0.05};
  const auto rep = accumulate_link_load(r, p, q, 2.0);
  double sum = 0;
  for (const auto& l : rep.map.links()) sum += l.load;
  EXPECT_NEAR(sum, rep.injected, 1e-9 * sum);
  double relay = 0;
  for (NodeId n = 0; n < pl.size(); ++n) relay += rep.map.relay_load(n);
  EXPECT_NEAR(relay, sum, 1e-9 * sum);
}

TEST(LinkLoad, SampledProfilesApproachExpectation) {
  const auto pl = make_regular_grid(10, 100, true);
  const auto vor = voronoi(pl);
  const Router r(vor);
  const auto p = zipf(4, 1).p;
  const std::vector<double> q{0.3, 0.2, 0.1, 0.1};
  const auto exact = accumulate_link_load(r, p, q, 1.0);
  LoadOptions o;
  o.n_samples = 400;
  const auto mc = accumulate_link_load(r, p, q, 1.0, o);
  EXPECT_NEAR(mc.injected, exact.injected, 0.03 * exact.injected);
}

TEST(LinkLoad, RelayLoadScalesWithTrafficFactor) {
  // The supportable rate R (C_B / 3) / max T_n stays within a constant band of
  // C_B / sum p sqrt(1/q) as the network grows.
  SystemParams sp;
  sp.set_snr_db(10);
  sp.r_I = 250;
  const auto p = zipf(20, 1).p;
  std::vector<double> kappa;
  for (int n : {64, 256, 1024}) {
    const auto pl = make_constrained_random(n, 100, 50, 75, 1);
    const auto vor = voronoi(pl);
    const Router r(vor);
    const auto q = order_optimal_q(p, 4, n);
    const auto g = general_network_rate(pl, q, p, sp);
    LoadOptions o;
    o.comp_files_local = false;
    const auto rep = accumulate_link_load(r, p, q, g.rate, o);
    const double supported = g.rate * (g.C_B / 3) / rep.map.max_relay_load();
    kappa.push_back(supported * objective(q, p) / g.C_B);
  }
  const auto [lo, hi] = std::minmax_element(kappa.begin(), kappa.end());
  EXPECT_GT(*lo, 0.1);
  EXPECT_LT(*hi / *lo, 2.0);
}

TEST(Clustering, EightNodeExample) {
  const auto pl = eight_node_layout();
  const Bipartition bp{{1, 2, 1, 2, 2, 1, 2, 1}};
  auto cc = cluster_comp(pl, bp, 2);
  ASSERT_EQ(cc.clusters.size(), 4u);
  EXPECT_EQ(cc.clusters[0].members, (std::vector<NodeId>{0, 5}));
  EXPECT_EQ(cc.clusters[1].members, (std::vector<NodeId>{2, 7}));
  EXPECT_EQ(cc.clusters[2].members, (std::vector<NodeId>{1, 4}));
  EXPECT_EQ(cc.clusters[3].members, (std::vector<NodeId>{3, 6}));
  assign_receivers(cc, pl, bp, {1, 4, 3, 5, 2, 7});
  EXPECT_EQ(cc.rx_set(0), (std::vector<NodeId>{1, 4}));
  EXPECT_EQ(cc.rx_set(1), (std::vector<NodeId>{3}));
  EXPECT_EQ(cc.rx_set(2), (std::vector<NodeId>{5}));
  EXPECT_EQ(cc.rx_set(3), (std::vector<NodeId>{2, 7}));
}

TEST(Clustering, PartitionsEachLayer) {
  const auto pl = make_constrained_random(256, 100, 50, 75, 2);
  const auto bp = partition_nodes(pl, 2 * pl.r_max());
  for (int Nc : {2, 4, 9, 16}) {
    const auto cc = cluster_comp(pl, bp, Nc, {37, 11});
    std::vector<int> hits(pl.size(), 0);
    for (int layer = 0; layer < 2; ++layer)
      for (int id : cc.tx_clusters[layer])
        for (NodeId n : cc.clusters[id].members) {
          ++hits[n];
          EXPECT_EQ(bp.layer[n], layer + 1);
          EXPECT_EQ(cc.cluster_of_node[n], id);
        }
    for (int h : hits) EXPECT_EQ(h, 1);
  }
}

TEST(Clustering, ReceiversServedByOppositeLayer) {
  const auto pl = make_regular_grid(12, 100);
  const auto bp = partition_nodes(pl, 100.5);
  auto cc = cluster_comp(pl, bp, 9);
  const auto layer1 = bp.members(1);
  assign_receivers(cc, pl, bp, layer1);
  for (NodeId n : layer1) EXPECT_EQ(cc.clusters[cc.rx_assignment.at(n)].layer, 2);
  for (int id : cc.tx_clusters[1 - 1]) EXPECT_TRUE(cc.rx_set(id).empty());
}

TEST(Clustering, LayerTooSmall) {
  const auto pl = eight_node_layout();
  const Bipartition bp{{1, 2, 1, 2, 2, 1, 2, 1}};
  EXPECT_EQ(code_of([&] { cluster_comp(pl, bp, 5); }), Errc::layer_too_small);
}

TEST(Clustering, GridReferenceGeometry) {
  const auto ref = make_grid_comp_reference(30, 100);
  EXPECT_EQ(ref.cluster.tx.size(), 9u);
  EXPECT_EQ(ref.cluster.rx.size(), 4u);
  EXPECT_EQ(ref.interferers.size(), 196u);
}

class Control : public ::testing::Test {
 protected:
  NodePlacement pl = make_regular_grid(12, 100);
  VoronoiPartition vor = voronoi(pl);
  Router router{vor};
  Bipartition bp = partition_nodes(pl, 100.5);
  SystemParams sp = [] {
    SystemParams s;
    s.F = 8 * 4096;
    s.L_S = 8 * 2048;
    s.B_C = 2 * s.F;
    return s;
  }();
  CacheLayout layout = build_cache_layout(pl, bp, {0.6, 0.12, 1.0}, zipf(3, 1), sp);
};

TEST_F(Control, ReqScopeIsTheRadiusBound) {
  const auto tr = simulate_control_plane(router, layout, {{66, 1}});
  const double r_RB = source_radius_bound(0.12, pl.r_max());
  std::vector<NodeId> want;
  for (NodeId v = 0; v < pl.size(); ++v)
    if (pl.distance(66, v) <= r_RB) want.push_back(v);
  ASSERT_EQ(tr.req_reached.size(), 1u);
  EXPECT_EQ(tr.req_reached[0], want);
  EXPECT_EQ(tr.count[1], want.size() - 1);  // one ACK per reached node
  EXPECT_EQ(tr.count[2], 8u);
  EXPECT_EQ(tr.unreached_sources, 0);
  EXPECT_EQ(tr.out_of_scope_relays, 0);
  for (const auto& m : tr.messages)
    if (m.type == MessageType::reqm) {
      EXPECT_EQ(m.path, router(66, m.to).nodes);
    }
}

TEST_F(Control, CompFileSendsNoReq) {
  const auto tr = simulate_control_plane(router, layout, {{30, 0}});
  EXPECT_EQ(tr.count[0], 0u);
  EXPECT_EQ(tr.count[3], 1u);
}

TEST_F(Control, FullyCachedFileIsSilent) {
  const auto tr = simulate_control_plane(router, layout, {{30, 2}});
  EXPECT_TRUE(tr.messages.empty());
}

TEST_F(Control, Replayable) {
  const auto prof = sample_profile(pl.size(), zipf(3, 1).p, 4);
  const auto a = simulate_control_plane(router, layout, prof);
  const auto b = simulate_control_plane(router, layout, prof);
  ASSERT_EQ(a.messages.size(), b.messages.size());
  for (size_t i = 0; i < a.messages.size(); ++i) {
    EXPECT_EQ(a.messages[i].type, b.messages[i].type);
    EXPECT_EQ(a.messages[i].from, b.messages[i].from);
    EXPECT_EQ(a.messages[i].to, b.messages[i].to);
    EXPECT_EQ(a.messages[i].path, b.messages[i].path);
  }
  EXPECT_EQ(a.radius_violations, 0);
}

TEST_F(Control, DeliveryDecodesEveryRequest) {
  const auto prof = sample_profile(pl.size(), zipf(3, 1).p, 5);
  DeliveryOptions o;
  o.verify_segments = 2;
  const auto rep = end_to_end_delivery(router, layout, prof, sp, o);
  EXPECT_EQ(rep.decode_failures, 0);
  EXPECT_EQ(rep.radius_violations, 0);
  EXPECT_EQ(rep.segments_verified, 2 * (pl.size() - std::count_if(prof.begin(), prof.end(),
                                                                 [](const Request& r) {
                                                                   return r.file == 2;
                                                                 })));
  for (const auto& r : rep.results) {
    if (r.file == 2) {
      EXPECT_EQ(r.bits, 0.0);
      EXPECT_EQ(r.completion_time, 0.0);
      EXPECT_EQ(r.bottleneck, "local");
    } else {
      EXPECT_GT(r.completion_time, 0.0);
      EXPECT_EQ(r.mode, r.file == 0 ? CacheMode::comp : CacheMode::multihop);
    }
  }
}

TEST_F(Control, MultihopBitsMatchShares) {
  const auto rep = end_to_end_delivery(router, layout, {{66, 1}}, sp);
  ASSERT_EQ(rep.results.size(), 1u);
  EXPECT_NEAR(rep.results[0].bits, 0.88 * sp.F, 1e-6);
  EXPECT_EQ(rep.results[0].hops, 2);
}

TEST(Delivery, CentreNodeOfSmallGridDecodes) {
  const auto pl = make_regular_grid(5, 100);
  const auto vor = voronoi(pl);
  const Router r(vor);
  SystemParams sp;
  sp.L_S = 8 * 4096;
  sp.F = 4 * sp.L_S;
  sp.B_C = sp.F;
  const auto lay = build_cache_layout(pl, partition_nodes(pl, 100.5), {0.12}, zipf(1, 0), sp);
  DeliveryOptions o;
  o.k = 64;
  o.verify_segments = 4;
  const auto rep = end_to_end_delivery(r, lay, {{12, 0}}, sp, o);
  EXPECT_EQ(rep.decode_failures, 0);
  EXPECT_EQ(rep.segments_verified, 4);
  EXPECT_NEAR(rep.results[0].bits, 0.88 * sp.F, 1e-6);
}

TEST(Delivery, RandomNetworkSoak) {
  const auto pl = make_constrained_random(256, 100, 50, 75, 1);
  const auto vor = voronoi(pl);
  const Router r(vor);
  SystemParams sp;
  sp.set_snr_db(10);
  sp.L_S = 8 * 2048;
  sp.F = 8 * sp.L_S;
  sp.B_C = 4 * sp.F;
  const auto pop = zipf(20, 1);
  const auto q = order_optimal_q(pop.p, 4, 256);
  const auto lay = build_cache_layout(pl, partition_nodes(pl, 2 * pl.r_max()), q, pop, sp);
  ContentStore store(3, sp.L_S, 32);
  int failures = 0, violations = 0;
  for (int s = 0; s < 5; ++s) {
    const auto rep = end_to_end_delivery(r, lay, sample_profile(256, pop.p, 100 + s), sp,
                                         {}, &store);
    failures += rep.decode_failures;
    violations += rep.radius_violations;
  }
  EXPECT_EQ(failures, 0);
  EXPECT_EQ(violations, 0);
}

}  // namespace
}  // namespace phycache
