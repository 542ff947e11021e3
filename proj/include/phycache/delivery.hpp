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

#ifndef PHYCACHE_DELIVERY_HPP_
#define PHYCACHE_DELIVERY_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "phycache/channel.hpp"
#include "phycache/coding.hpp"
#include "phycache/error.hpp"
#include "phycache/random.hpp"
#include "phycache/topology.hpp"

namespace phycache {

// ---------------------------------------------------------------------------
// Source selection

/// How candidate sources are ranked. `grid_hops` ranks by lattice hop count
/// and is only defined on regular grids.
enum class SourceMetric { euclidean, grid_hops };

inline const char* source_metric_name(SourceMetric m) {
  return m == SourceMetric::grid_hops ? "grid_hops" : "euclidean";
}

inline SourceMetric parse_source_metric(const std::string& s) {
  if (s == "euclidean") return SourceMetric::euclidean;
  if (s == "grid_hops") return SourceMetric::grid_hops;
  fail(Errc::parse_error, "unknown source metric '" + s + "'");
}

/// Upper bound on the source radius for a file with fraction q.
inline double source_radius_bound(double q, double r_max) {
  const double c = std::ceil(1.0 / q - 1e-9);
  return (2.0 * std::sqrt(c - 1.0) + 1.0) * r_max;
}

inline int replicas_needed(double q) {
  if (!(q > 0.0)) fail(Errc::insufficient_replicas, "file is not cached");
  return static_cast<int>(std::ceil(1.0 / q - 1e-9));
}

struct SourceShare {
  NodeId node = 0;
  double bits = 0.0;  // per segment
  bool inner = false;
};

struct SourceSet {
  NodeId requester = 0;
  int file = 0;
  double q = 0.0;
  double L_S = 0.0;
  double r_star = 0.0;  // farthest source, meters
  std::vector<NodeId> B_n;
  std::vector<NodeId> B_bar_n;
  std::vector<SourceShare> shares;

  double bits_from_others() const {
    double s = 0.0;
    for (const auto& x : shares) s += x.bits;
    return s;
  }
  double local_bits() const { return std::min(q, 1.0) * L_S; }
};

namespace detail {

inline double grid_hops(const NodePlacement& pl, NodeId a, NodeId b) {
  const int n = pl.grid_side();
  auto [ra, ca] = pl.grid_cell(a);
  auto [rb, cb] = pl.grid_cell(b);
  int dr = std::abs(ra - rb), dc = std::abs(ca - cb);
  if (pl.torus()) dr = std::min(dr, n - dr), dc = std::min(dc, n - dc);
  return dr + dc;
}

inline bool same_key(double a, double b) {
  return std::fabs(a - b) <= 1e-9 * std::max({1.0, std::fabs(a), std::fabs(b)});
}

}  // namespace detail

/// Nearest nodes jointly holding (1 - q) L_S further parity bits. Selected
/// nodes at the cut-off key share the remainder equally. Distance ties are
/// broken by node index; under hop ranking the whole cut-off ring is used.
inline SourceSet select_sources(const NodePlacement& pl, NodeId requester,
                                int file, double q, double L_S,
                                SourceMetric metric = SourceMetric::euclidean) {
  SourceSet s;
  s.requester = requester;
  s.file = file;
  s.q = q;
  s.L_S = L_S;
  const int need = replicas_needed(q);
  if (q >= 1.0) return s;
  if (need > pl.size())
    fail(Errc::insufficient_replicas,
         std::to_string(need) + " replicas needed, network has " +
             std::to_string(pl.size()));
  if (metric == SourceMetric::grid_hops && !pl.is_grid())
    fail(Errc::wrong_placement_kind, "hop ranking needs a regular grid");
  std::vector<std::pair<double, NodeId>> cand;
  cand.reserve(pl.size() - 1);
  for (NodeId j = 0; j < pl.size(); ++j) {
    if (j == requester) continue;
    const double key = metric == SourceMetric::grid_hops
                           ? detail::grid_hops(pl, requester, j)
                           : pl.distance(requester, j);
    cand.emplace_back(key, j);
  }
  std::sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) {
    if (!detail::same_key(a.first, b.first)) return a.first < b.first;
    return a.second < b.second;
  });
  const int others = need - 1;
  if (others == 0) return s;
  const double cut = cand[others - 1].first;
  // Hop ranking keeps the whole boundary ring; distance ranking truncates it.
  const bool whole_ring = metric == SourceMetric::grid_hops;
  for (size_t i = 0; i < cand.size(); ++i) {
    const auto& [key, j] = cand[i];
    if (static_cast<int>(i) >= others && !(whole_ring && detail::same_key(key, cut))) break;
    s.B_n.push_back(j);
    if (!detail::same_key(key, cut)) s.B_bar_n.push_back(j);
  }
  const double nb = static_cast<double>(s.B_bar_n.size());
  const double ring = static_cast<double>(s.B_n.size()) - nb;
  const double boundary = (1.0 - q - nb * q) * L_S / ring;
  for (NodeId j : s.B_n) {
    const bool inner = std::find(s.B_bar_n.begin(), s.B_bar_n.end(), j) !=
                       s.B_bar_n.end();
    s.shares.push_back({j, inner ? q * L_S : boundary, inner});
    s.r_star = std::max(s.r_star, pl.distance(requester, j));
  }
  std::sort(s.B_n.begin(), s.B_n.end());
  std::sort(s.B_bar_n.begin(), s.B_bar_n.end());
  return s;
}

// ---------------------------------------------------------------------------
// Routing

struct RoutingPath {
  std::vector<NodeId> nodes;  // source first, destination last

  int hops() const { return std::max(0, static_cast<int>(nodes.size()) - 1); }
};

/// Offset applied to both endpoints so that no segment passes exactly
/// through a cell vertex.
inline Point route_perturbation(const NodePlacement& pl) {
  const double eps = 1e-7 * (pl.r_min() > 0 ? pl.r_min() : pl.r_0());
  return {eps, eps * 0.6180339887498949};
}

/// Cells crossed by the segment from `from` to `to`, in order of entry.
inline RoutingPath route(const VoronoiPartition& vor, NodeId from, NodeId to) {
  RoutingPath path;
  path.nodes.push_back(from);
  if (from == to) return path;
  const NodePlacement& pl = vor.placement();
  const Point A = pl.position(from) + route_perturbation(pl);
  const Point D = pl.displacement(from, to);
  NodeId cur = from;
  Point pc = pl.position(from);
  double t_cur = 0.0;
  for (int step = 0; step <= pl.size(); ++step) {
    if (cur == to) return path;
    NodeId next = -1;
    Point pnext{};
    double t_best = std::numeric_limits<double>::infinity();
    for (NodeId k : vor.neighbors(cur)) {
      const Point e = pl.displacement(cur, k);
      const double den = dot(e, D);
      if (den <= 0.0) continue;
      const Point mid = pc + 0.5 * e;
      const double t = dot(mid - A, e) / den;
      if (t < t_cur - 1e-9) continue;
      if (t < t_best - 1e-12 || (std::fabs(t - t_best) <= 1e-12 && k < next)) {
        t_best = t;
        next = k;
        pnext = pc + e;
      }
    }
    if (next < 0) break;
    path.nodes.push_back(next);
    cur = next;
    pc = pnext;
    t_cur = t_best;
  }
  fail(Errc::domain_error, "routing walk from " + std::to_string(from) +
                               " did not reach " + std::to_string(to));
}

/// Route lookup with a translation cache on regular grids. One instance per
/// run context.
class Router {
 public:
  explicit Router(const VoronoiPartition& vor) : vor_(&vor) {}

  const VoronoiPartition& voronoi() const { return *vor_; }
  const NodePlacement& placement() const { return vor_->placement(); }

  RoutingPath operator()(NodeId from, NodeId to) const {
    const NodePlacement& pl = placement();
    if (!pl.is_grid() || from == to) return route(*vor_, from, to);
    const int n = pl.grid_side();
    const Point d = pl.displacement(from, to);
    const int dc = static_cast<int>(std::lround(d.x / pl.r_0()));
    const int dr = static_cast<int>(std::lround(d.y / pl.r_0()));
    const std::int64_t key = (static_cast<std::int64_t>(dr) << 32) ^
                             static_cast<std::uint32_t>(dc);
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      const auto p = route(*vor_, from, to);
      std::vector<std::pair<int, int>> offs;
      const auto [r0, c0] = pl.grid_cell(from);
      for (NodeId v : p.nodes) {
        const auto [r, c] = pl.grid_cell(v);
        int orow = r - r0, ocol = c - c0;
        if (pl.torus()) {
          orow = ((orow % n) + n) % n;
          ocol = ((ocol % n) + n) % n;
        }
        offs.emplace_back(orow, ocol);
      }
      it = cache_.emplace(key, std::move(offs)).first;
    }
    RoutingPath out;
    out.nodes.reserve(it->second.size());
    const auto [r0, c0] = pl.grid_cell(from);
    for (const auto& [orow, ocol] : it->second) {
      int r = r0 + orow, c = c0 + ocol;
      if (pl.torus()) r %= n, c %= n;
      out.nodes.push_back(r * n + c);
    }
    return out;
  }

 private:
  const VoronoiPartition* vor_;
  mutable std::unordered_map<std::int64_t, std::vector<std::pair<int, int>>>
      cache_;
};

// ---------------------------------------------------------------------------
// Link loads

struct LinkLoad {
  NodeId from = 0;
  NodeId to = 0;
  double load = 0.0;
};

/// Directed traffic on every Voronoi adjacency.
class LinkLoadMap {
 public:
  LinkLoadMap() = default;
  explicit LinkLoadMap(const VoronoiPartition& vor) {
    const int n = vor.placement().size();
    nbr_.resize(n);
    load_.resize(n);
    for (NodeId i = 0; i < n; ++i) {
      nbr_[i] = vor.neighbors(i);
      load_[i].assign(nbr_[i].size(), 0.0);
    }
  }

  int size() const { return static_cast<int>(nbr_.size()); }

  void add(NodeId u, NodeId v, double x) {
    load_[u][slot(u, v)] += x;
    injected_hops_ += x;
  }

  void add_path(const RoutingPath& p, double x) {
    for (size_t i = 0; i + 1 < p.nodes.size(); ++i)
      add(p.nodes[i], p.nodes[i + 1], x);
  }

  double directed(NodeId u, NodeId v) const { return load_[u][slot(u, v)]; }
  double undirected(NodeId u, NodeId v) const {
    return directed(u, v) + directed(v, u);
  }

  /// Everything node n transmits, relayed or originated.
  double relay_load(NodeId n) const {
    double s = 0.0;
    for (double x : load_[n]) s += x;
    return s;
  }

  double total() const { return injected_hops_; }

  LinkLoad max_undirected() const {
    LinkLoad best;
    for (NodeId u = 0; u < size(); ++u)
      for (size_t s = 0; s < nbr_[u].size(); ++s) {
        const NodeId v = nbr_[u][s];
        if (v < u) continue;
        const double x = load_[u][s] + directed(v, u);
        if (x > best.load) best = {u, v, x};
      }
    return best;
  }

  LinkLoad max_directed() const {
    LinkLoad best;
    for (NodeId u = 0; u < size(); ++u)
      for (size_t s = 0; s < nbr_[u].size(); ++s)
        if (load_[u][s] > best.load) best = {u, nbr_[u][s], load_[u][s]};
    return best;
  }

  double max_relay_load() const {
    double m = 0.0;
    for (NodeId u = 0; u < size(); ++u) m = std::max(m, relay_load(u));
    return m;
  }

  std::vector<LinkLoad> links() const {
    std::vector<LinkLoad> out;
    for (NodeId u = 0; u < size(); ++u)
      for (size_t s = 0; s < nbr_[u].size(); ++s)
        if (load_[u][s] != 0.0) out.push_back({u, nbr_[u][s], load_[u][s]});
    return out;
  }

  void scale(double a) {
    for (auto& v : load_)
      for (double& x : v) x *= a;
    injected_hops_ *= a;
  }

 private:
  size_t slot(NodeId u, NodeId v) const {
    const auto& nb = nbr_[u];
    for (size_t s = 0; s < nb.size(); ++s)
      if (nb[s] == v) return s;
    fail(Errc::invalid_argument, "nodes " + std::to_string(u) + " and " +
                                     std::to_string(v) + " are not adjacent");
  }

  std::vector<std::vector<NodeId>> nbr_;
  std::vector<std::vector<double>> load_;
  double injected_hops_ = 0.0;
};

struct LoadOptions {
  SourceMetric metric = SourceMetric::euclidean;
  int n_samples = 0;  // 0 for the exact expectation
  std::uint64_t seed = 1;
  bool comp_files_local = true;  // files with q >= 1/2 leave the multihop plane
};

struct LinkLoadReport {
  LinkLoadMap map;
  double injected = 0.0;  // sum over flows of rate x hops
  int flows = 0;
};

/// Expected multihop traffic when every node requests at rate R.
inline LinkLoadReport accumulate_link_load(const Router& router,
                                           const std::vector<double>& p,
                                           const std::vector<double>& q,
                                           double R,
                                           const LoadOptions& opt = {}) {
  if (p.size() != q.size()) fail(Errc::invalid_argument, "p and q lengths differ");
  const NodePlacement& pl = router.placement();
  LinkLoadReport rep{LinkLoadMap(router.voronoi()), 0.0, 0};
  auto serve = [&](NodeId n, int l, double rate) {
    if (q[l] >= 1.0 || (opt.comp_files_local && q[l] >= 0.5)) return;
    const auto src = select_sources(pl, n, l, q[l], 1.0, opt.metric);
    for (const auto& sh : src.shares) {
      const auto path = router(sh.node, n);
      rep.map.add_path(path, rate * sh.bits);
      rep.injected += rate * sh.bits * path.hops();
      ++rep.flows;
    }
  };
  if (opt.n_samples <= 0) {
    for (NodeId n = 0; n < pl.size(); ++n)
      for (int l = 0; l < static_cast<int>(p.size()); ++l)
        if (p[l] > 0.0) serve(n, l, p[l] * R);
    return rep;
  }
  std::vector<double> cdf(p.size());
  std::partial_sum(p.begin(), p.end(), cdf.begin());
  Rng g(opt.seed);
  for (int s = 0; s < opt.n_samples; ++s)
    for (NodeId n = 0; n < pl.size(); ++n) {
      const double u = uniform01(g) * cdf.back();
      const int l = static_cast<int>(
          std::min<std::ptrdiff_t>(std::upper_bound(cdf.begin(), cdf.end(), u) -
                                       cdf.begin(),
                                   static_cast<std::ptrdiff_t>(p.size()) - 1));
      serve(n, l, R);
    }
  rep.map.scale(1.0 / opt.n_samples);
  rep.injected /= opt.n_samples;
  return rep;
}

// ---------------------------------------------------------------------------
// CoMP clustering

struct CompCluster {
  int layer = 1;
  std::vector<NodeId> members;
  Point centroid{};
};

struct CompClustering {
  std::vector<CompCluster> clusters;
  std::array<std::vector<int>, 2> tx_clusters;  // cluster ids per layer
  std::vector<int> cluster_of_node;
  std::map<NodeId, int> rx_assignment;

  std::vector<NodeId> rx_set(int cluster) const {
    std::vector<NodeId> out;
    for (const auto& [n, c] : rx_assignment)
      if (c == cluster) out.push_back(n);
    return out;
  }
};

namespace detail {

inline Point centroid_of(const NodePlacement& pl, const std::vector<NodeId>& m) {
  Point c{};
  for (NodeId i : m) c = c + pl.position(i);
  return (1.0 / static_cast<double>(m.size())) * c;
}

}  // namespace detail

/// Square tiles of side sqrt(2 N_c) r_0 shifted by `offset`; each tile's
/// members of one layer form a cluster. Clusters below half size are merged
/// into the nearest cluster of the same layer.
inline CompClustering cluster_comp(const NodePlacement& pl,
                                   const Bipartition& bp, int N_c,
                                   Point offset = {0.0, 0.0}) {
  if (N_c < 1) fail(Errc::invalid_argument, "N_c must be positive");
  const double side = std::sqrt(2.0 * N_c) * pl.r_0();
  CompClustering out;
  std::array<std::vector<CompCluster>, 2> by_layer;
  for (int layer = 1; layer <= 2; ++layer) {
    const auto members = bp.members(layer);
    if (static_cast<int>(members.size()) < N_c)
      fail(Errc::layer_too_small, "layer " + std::to_string(layer) + " has " +
                                      std::to_string(members.size()) +
                                      " nodes");
    std::map<std::pair<long, long>, std::vector<NodeId>> tiles;
    for (NodeId i : members) {
      const Point x = pl.position(i) - offset;
      tiles[{std::lround(std::floor(x.y / side)),
             std::lround(std::floor(x.x / side))}]
          .push_back(i);
    }
    auto& cl = by_layer[layer - 1];
    for (auto& [key, m] : tiles) cl.push_back({layer, m, detail::centroid_of(pl, m)});
    const size_t min_size = static_cast<size_t>((N_c + 1) / 2);
    while (cl.size() > 1) {
      size_t small = cl.size();
      for (size_t c = 0; c < cl.size(); ++c)
        if (cl[c].members.size() < min_size &&
            (small == cl.size() || cl[c].members.size() < cl[small].members.size()))
          small = c;
      if (small == cl.size()) break;
      size_t into = cl.size();
      double best = std::numeric_limits<double>::infinity();
      for (size_t c = 0; c < cl.size(); ++c) {
        if (c == small) continue;
        const double d = pl.distance(cl[c].centroid, cl[small].centroid);
        if (d < best) best = d, into = c;
      }
      auto& dst = cl[into].members;
      dst.insert(dst.end(), cl[small].members.begin(), cl[small].members.end());
      cl[into].centroid = detail::centroid_of(pl, dst);
      cl.erase(cl.begin() + static_cast<std::ptrdiff_t>(small));
    }
    for (auto& c : cl) std::sort(c.members.begin(), c.members.end());
    std::sort(cl.begin(), cl.end(), [](const CompCluster& a, const CompCluster& b) {
      return a.members.front() < b.members.front();
    });
  }
  out.cluster_of_node.assign(pl.size(), -1);
  for (int layer = 0; layer < 2; ++layer)
    for (auto& c : by_layer[layer]) {
      const int id = static_cast<int>(out.clusters.size());
      for (NodeId i : c.members) out.cluster_of_node[i] = id;
      out.tx_clusters[layer].push_back(id);
      out.clusters.push_back(std::move(c));
    }
  return out;
}

/// Each requester registers with the nearest cluster of the opposite layer.
inline void assign_receivers(CompClustering& cc, const NodePlacement& pl,
                             const Bipartition& bp,
                             const std::vector<NodeId>& requesters) {
  for (NodeId n : requesters) {
    const int other = 3 - bp.layer[n];
    int best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (int id : cc.tx_clusters[other - 1]) {
      const double d = pl.distance(pl.position(n), cc.clusters[id].centroid);
      if (d < bd - 1e-12 * pl.r_0()) bd = d, best = id;
    }
    cc.rx_assignment[n] = best;
  }
}

/// A CoMP cluster embedded in a large regular grid, seen in the dual
/// network. In rotated lattice coordinates U = (a + b)/2, V = (a - b)/2 the
/// layer-1 nodes sit on integers and the layer-2 nodes on half-integers. The
/// transmit array is a 3 x 3 diamond of layer-1 nodes; the scheduled layer-2
/// nodes are the four interior ones. Every other diamond in the grid
/// schedules its own four, which act as interference.
struct GridCompReference {
  NodePlacement placement;
  TxCluster cluster;
  std::vector<NodeId> interferers;
};

inline GridCompReference make_grid_comp_reference(int n_side, double r_0) {
  if (n_side < 8) fail(Errc::invalid_argument, "grid too small for a reference");
  GridCompReference ref;
  ref.placement = make_regular_grid(n_side, r_0);
  const int c0 = n_side / 2;
  auto tile = [](double u) { return static_cast<long>(std::floor((u + 0.5) / 3.0)); };
  for (NodeId i = 0; i < ref.placement.size(); ++i) {
    const auto [r, c] = ref.placement.grid_cell(i);
    const int a = c - c0, b = r - c0;
    const double U = 0.5 * (a + b), V = 0.5 * (a - b);
    const long tu = tile(U), tv = tile(V);
    const bool home = tu == 0 && tv == 0;
    if ((a + b) % 2 == 0) {
      if (home) ref.cluster.tx.push_back(i);
      continue;
    }
    const double fu = U - 3.0 * tu, fv = V - 3.0 * tv;
    const bool interior = (fu == 0.5 || fu == 1.5) && (fv == 0.5 || fv == 1.5);
    if (!interior) continue;
    if (home)
      ref.cluster.rx.push_back(i);
    else
      ref.interferers.push_back(i);
  }
  return ref;
}

// ---------------------------------------------------------------------------
// Control plane

enum class MessageType { req, ack, reqm, comp_register };

inline const char* message_type_name(MessageType t) {
  switch (t) {
    case MessageType::req: return "REQ";
    case MessageType::ack: return "ACK";
    case MessageType::reqm: return "REQm";
    case MessageType::comp_register: return "COMP_REG";
  }
  return "?";
}

struct Message {
  std::uint64_t seq = 0;
  MessageType type = MessageType::req;
  NodeId from = 0;
  NodeId to = 0;  // -1 for a cluster-wide registration
  NodeId requester = 0;
  int file = 0;
  double bits = 0.0;  // per segment, REQm only
  int cluster = -1;
  std::vector<NodeId> path;  // REQm only
};

struct Request {
  NodeId node = 0;
  int file = 0;
};
using RequestProfile = std::vector<Request>;

/// Every node requests one file drawn from p.
inline RequestProfile sample_profile(int n_nodes, const std::vector<double>& p,
                                     std::uint64_t seed) {
  std::vector<double> cdf(p.size());
  std::partial_sum(p.begin(), p.end(), cdf.begin());
  Rng g(seed);
  RequestProfile out(n_nodes);
  for (NodeId n = 0; n < n_nodes; ++n) {
    const double u = uniform01(g) * cdf.back();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    out[n] = {n, static_cast<int>(std::min<std::ptrdiff_t>(
                     it - cdf.begin(), static_cast<std::ptrdiff_t>(p.size()) - 1))};
  }
  return out;
}

struct ControlOptions {
  SourceMetric metric = SourceMetric::euclidean;
  bool record = true;  // keep messages and source sets
  const CompClustering* clustering = nullptr;
};

struct ControlTrace {
  std::vector<Message> messages;
  std::vector<SourceSet> source_sets;
  std::array<std::uint64_t, 4> count{};  // by MessageType
  std::vector<std::vector<NodeId>> req_reached;  // per request, sorted
  int radius_violations = 0;
  int out_of_scope_relays = 0;  // REQ relays needed beyond r_RB
  int unreached_sources = 0;
};

/// Message-level replay of the request handshake for every request.
inline ControlTrace simulate_control_plane(const Router& router,
                                          const CacheLayout& layout,
                                          const RequestProfile& profile,
                                          const ControlOptions& opt = {}) {
  const NodePlacement& pl = router.placement();
  const VoronoiPartition& vor = router.voronoi();
  ControlTrace tr;
  std::uint64_t seq = 0;
  auto emit = [&](Message m) {
    ++tr.count[static_cast<int>(m.type)];
    if (!opt.record) return;
    m.seq = seq++;
    tr.messages.push_back(std::move(m));
  };
  std::vector<int> seen(pl.size(), -1);
  for (size_t ri = 0; ri < profile.size(); ++ri) {
    const auto [n, l] = profile[ri];
    const double q = layout.q.at(l);
    if (q >= 1.0) {
      if (opt.record) tr.req_reached.emplace_back();
      continue;
    }
    if (mode_of(q) == CacheMode::comp) {
      Message m;
      m.type = MessageType::comp_register;
      m.from = n;
      m.to = -1;
      m.requester = n;
      m.file = l;
      if (opt.clustering) {
        auto it = opt.clustering->rx_assignment.find(n);
        if (it != opt.clustering->rx_assignment.end()) m.cluster = it->second;
      }
      emit(std::move(m));
      if (opt.record) tr.req_reached.emplace_back();
      continue;
    }
    const double r_RB = source_radius_bound(q, pl.r_max());
    const double tol = r_RB * (1.0 + 1e-12);
    // REQ flood: receivers beyond r_RB discard it.
    std::vector<NodeId> reached{n};
    std::deque<NodeId> frontier{n};
    seen[n] = static_cast<int>(ri);
    while (!frontier.empty()) {
      const NodeId u = frontier.front();
      frontier.pop_front();
      for (NodeId v : vor.neighbors(u)) {
        if (seen[v] == static_cast<int>(ri) || pl.distance(n, v) > tol) continue;
        seen[v] = static_cast<int>(ri);
        emit({0, MessageType::req, u, v, n, l, 0.0, -1, {}});
        reached.push_back(v);
        frontier.push_back(v);
      }
    }
    vor.index().for_each_within(pl.position(n), r_RB, [&](int v, double) {
      if (seen[v] == static_cast<int>(ri)) return;
      seen[v] = static_cast<int>(ri);
      const auto p = router(n, v);
      for (size_t h = 0; h + 1 < p.nodes.size(); ++h) {
        if (pl.distance(n, p.nodes[h + 1]) > tol) ++tr.out_of_scope_relays;
        emit({0, MessageType::req, p.nodes[h], p.nodes[h + 1], n, l, 0.0, -1, {}});
      }
      reached.push_back(v);
    });
    std::sort(reached.begin(), reached.end());
    for (NodeId v : reached)
      if (v != n) emit({0, MessageType::ack, v, n, n, l, 0.0, -1, {}});
    auto src = select_sources(pl, n, l, q, layout.L_S, opt.metric);
    if (src.r_star > r_RB * (1.0 + 1e-9)) ++tr.radius_violations;
    for (const auto& sh : src.shares) {
      if (!std::binary_search(reached.begin(), reached.end(), sh.node))
        ++tr.unreached_sources;
      Message m{0, MessageType::reqm, n, sh.node, n, l, sh.bits, -1, {}};
      if (opt.record) m.path = router(n, sh.node).nodes;
      emit(std::move(m));
    }
    if (opt.record) {
      tr.req_reached.push_back(std::move(reached));
      tr.source_sets.push_back(std::move(src));
    }
  }
  return tr;
}

// ---------------------------------------------------------------------------
// Content and end-to-end delivery

/// Deterministic file content and lazily encoded parity blocks.
class ContentStore {
 public:
  ContentStore(std::uint64_t seed, double L_S, int k)
      : seed_(seed),
        cp_{k, static_cast<std::size_t>(std::llround(L_S / 8.0))} {}

  const CodeParams& code() const { return cp_; }

  std::vector<std::uint8_t> segment(int file, int seg) const {
    Rng g(derive_seed(seed_, {0xC0, static_cast<std::uint64_t>(file),
                              static_cast<std::uint64_t>(seg)}));
    std::vector<std::uint8_t> out(cp_.segment_bytes);
    for (auto& b : out) b = static_cast<std::uint8_t>(g() >> 56);
    return out;
  }

  const ParityBlock& multihop_block(int file, int seg, double q, NodeId node) {
    const Key key{file, seg, node};
    auto it = mh_.find(key);
    if (it != mh_.end()) return it->second;
    auto blk = encode_multihop_block(source(file, seg), cp_, q, node,
                                     block_seed(file, seg));
    blk.file = file;
    blk.segment = seg;
    return mh_.emplace(key, std::move(blk)).first->second;
  }

  const ParityBlock& comp_block(int file, int seg, double q, int layer) {
    const Key key{file, seg, -layer};
    auto it = mh_.find(key);
    if (it != mh_.end()) return it->second;
    auto [l1, l2] = encode_comp_blocks(source(file, seg), cp_, q,
                                       block_seed(file, seg));
    for (ParityBlock* b : {&l1, &l2}) b->file = file, b->segment = seg;
    mh_.emplace(Key{file, seg, -1}, std::move(l1));
    mh_.emplace(Key{file, seg, -2}, std::move(l2));
    return mh_.at(key);
  }

 private:
  using Key = std::array<int, 3>;

  const std::vector<std::uint8_t>& source(int file, int seg) {
    const std::pair<int, int> key{file, seg};
    auto it = src_.find(key);
    if (it == src_.end())
      it = src_.emplace(key, source_symbols(segment(file, seg), cp_.k)).first;
    return it->second;
  }

  std::uint64_t block_seed(int file, int seg) const {
    return derive_seed(seed_, {0xB1, static_cast<std::uint64_t>(file),
                               static_cast<std::uint64_t>(seg)});
  }

  std::uint64_t seed_;
  CodeParams cp_;
  std::map<std::pair<int, int>, std::vector<std::uint8_t>> src_;
  std::map<Key, ParityBlock> mh_;
};

struct DeliveryOptions {
  int k = 32;                 // source symbols per segment
  SourceMetric metric = SourceMetric::euclidean;
  std::uint64_t seed = 1;
  int verify_segments = 1;    // segments decoded per request, sampled
  double link_rate = 0.0;     // bits/s per link; 0 derives W_b R_m
  double comp_rate = 0.0;     // bits/s per CoMP receiver; 0 derives W_c R_c^L
  double W_c = -1.0;          // negative selects W/4
};

struct RequestResult {
  NodeId requester = 0;
  int file = 0;
  CacheMode mode = CacheMode::multihop;
  int hops = 0;
  double bits = 0.0;  // received over the whole file
  double completion_time = 0.0;
  std::string bottleneck;
  bool decoded = true;
  int top_ups = 0;
  double r_star = 0.0;
};

struct DeliveryReport {
  std::vector<RequestResult> results;
  int decode_failures = 0;
  int radius_violations = 0;
  int top_up_symbols = 0;
  int segments_verified = 0;
  double link_rate = 0.0;
  double comp_rate = 0.0;
};

namespace detail {

inline bool verify_multihop(ContentStore& store, const NodePlacement& pl,
                            const SourceSet& src, int seg, int* top_ups) {
  const auto& cp = store.code();
  const int k = cp.k;
  SegmentDecoder dec(k, cp.symbol_bytes());
  const int m = cp.symbols_for(src.q);
  auto feed = [&](const ParityBlock& b, int from, int to) {
    for (int t = from; t < to && t < b.n_symbols(); ++t) dec.add(b.symbols[t]);
  };
  feed(store.multihop_block(src.file, seg, src.q, src.requester), 0, m);
  std::vector<std::pair<NodeId, int>> sent;
  for (const auto& sh : src.shares) {
    const int take = std::min(
        m, static_cast<int>(std::ceil(sh.bits / src.L_S * k - 1e-9)));
    feed(store.multihop_block(src.file, seg, src.q, sh.node), 0, take);
    sent.emplace_back(sh.node, take);
  }
  // Top up one symbol at a time from the least used source, then from the
  // next nearest nodes.
  std::vector<NodeId> extra;
  size_t next_extra = 0;
  while (!dec.complete()) {
    bool fed = false;
    for (auto& [node, take] : sent) {
      if (take >= m) continue;
      feed(store.multihop_block(src.file, seg, src.q, node), take, take + 1);
      ++take;
      ++*top_ups;
      fed = true;
      break;
    }
    if (fed) continue;
    if (extra.empty()) {
      std::vector<std::pair<double, NodeId>> rest;
      for (NodeId j = 0; j < pl.size(); ++j)
        if (j != src.requester &&
            std::find(src.B_n.begin(), src.B_n.end(), j) == src.B_n.end())
          rest.emplace_back(pl.distance(src.requester, j), j);
      std::sort(rest.begin(), rest.end());
      for (auto& r : rest) extra.push_back(r.second);
    }
    if (next_extra >= extra.size()) return false;
    sent.emplace_back(extra[next_extra++], 0);
  }
  auto x = dec.solve();
  x.resize(cp.segment_bytes);
  return x == store.segment(src.file, seg);
}

inline bool verify_comp(ContentStore& store, int file, double q, int layer,
                        int seg, int* top_ups) {
  const auto& cp = store.code();
  const int k = cp.k;
  const int m = cp.symbols_for(q);
  SegmentDecoder dec(k, cp.symbol_bytes());
  const auto& own = store.comp_block(file, seg, q, layer);
  const auto& other = store.comp_block(file, seg, q, 3 - layer);
  for (const auto& s : own.symbols) dec.add(s);
  int t = 0;
  for (; t < k - m && t < other.n_symbols(); ++t) dec.add(other.symbols[t]);
  while (!dec.complete() && t < other.n_symbols()) {
    dec.add(other.symbols[t++]);
    ++*top_ups;
  }
  if (!dec.complete()) return false;
  auto x = dec.solve();
  x.resize(cp.segment_bytes);
  return x == store.segment(file, seg);
}

}  // namespace detail

/// Serves a request profile. Multihop flows sharing a link split its rate in
/// proportion to their volume, so every flow on a link finishes with it.
/// CoMP clusters serve up to N_c registered receivers per slot, round robin.
inline DeliveryReport end_to_end_delivery(const Router& router,
                                          const CacheLayout& layout,
                                          const RequestProfile& profile,
                                          const SystemParams& sp,
                                          const DeliveryOptions& opt = {},
                                          ContentStore* store = nullptr) {
  const NodePlacement& pl = router.placement();
  DeliveryReport rep;
  const double W_c = opt.W_c < 0.0 ? sp.W / 4.0 : opt.W_c;
  if (opt.link_rate > 0.0 && opt.comp_rate > 0.0) {
    rep.link_rate = opt.link_rate;
    rep.comp_rate = opt.comp_rate;
  } else {
    const auto c = compute_constants(sp);
    rep.link_rate = opt.link_rate > 0.0
                        ? opt.link_rate
                        : (sp.W - 2.0 * W_c) * link_rate_R_m(W_c, sp, c);
    rep.comp_rate = opt.comp_rate > 0.0
                        ? opt.comp_rate
                        : W_c * comp_rate_bounds(sp, c).lower;
  }
  std::unique_ptr<ContentStore> own;
  if (!store) {
    own = std::make_unique<ContentStore>(opt.seed, layout.L_S, opt.k);
    store = own.get();
  }
  const int segments =
      static_cast<int>(std::llround(std::ceil(layout.F / layout.L_S - 1e-9)));

  Bipartition bp{layout.layer_of_node};
  std::vector<NodeId> comp_requesters;
  for (const auto& r : profile) {
    const double q = layout.q.at(r.file);
    if (q < 1.0 && mode_of(q) == CacheMode::comp) comp_requesters.push_back(r.node);
  }
  std::optional<CompClustering> cc;
  std::map<int, int> rx_count;
  if (!comp_requesters.empty()) {
    cc = cluster_comp(pl, bp, sp.N_c);
    assign_receivers(*cc, pl, bp, comp_requesters);
    for (const auto& [n, c] : cc->rx_assignment) ++rx_count[c];
  }

  LinkLoadMap bits(router.voronoi());
  std::vector<std::vector<RoutingPath>> flows(profile.size());
  Rng pick(derive_seed(opt.seed, {0x5E}));
  for (size_t ri = 0; ri < profile.size(); ++ri) {
    const auto [n, l] = profile[ri];
    const double q = layout.q.at(l);
    RequestResult res;
    res.requester = n;
    res.file = l;
    res.mode = mode_of(q);
    if (q >= 1.0) {
      res.bottleneck = "local";
      rep.results.push_back(res);
      continue;
    }
    std::vector<int> segs;
    const int nv = std::min(std::max(opt.verify_segments, 0), segments);
    if (nv == segments) {
      for (int s = 0; s < segments; ++s) segs.push_back(s);
    } else {
      for (int s = 0; s < nv; ++s)
        segs.push_back(static_cast<int>(uniform_index(pick, segments)));
    }
    if (res.mode == CacheMode::comp) {
      const int c = cc->rx_assignment.at(n);
      res.hops = 1;
      res.bits = (1.0 - q) * layout.F;
      const int slots = (rx_count[c] + sp.N_c - 1) / sp.N_c;
      res.completion_time = slots * res.bits / rep.comp_rate;
      res.bottleneck = "comp:" + std::to_string(c);
      for (int s : segs) {
        if (!detail::verify_comp(*store, l, q, layout.layer_of_node[n], s,
                                 &res.top_ups))
          res.decoded = false;
        ++rep.segments_verified;
      }
    } else {
      const auto src = select_sources(pl, n, l, q, layout.L_S, opt.metric);
      res.r_star = src.r_star;
      if (src.r_star > source_radius_bound(q, pl.r_max()) * (1.0 + 1e-9))
        ++rep.radius_violations;
      for (const auto& sh : src.shares) {
        auto path = router(sh.node, n);
        const double b = sh.bits / layout.L_S * layout.F;
        bits.add_path(path, b);
        res.hops = std::max(res.hops, path.hops());
        res.bits += b;
        flows[ri].push_back(std::move(path));
      }
      for (int s : segs) {
        if (!detail::verify_multihop(*store, pl, src, s, &res.top_ups))
          res.decoded = false;
        ++rep.segments_verified;
      }
    }
    rep.top_up_symbols += res.top_ups;
    if (!res.decoded) ++rep.decode_failures;
    rep.results.push_back(std::move(res));
  }
  for (size_t ri = 0; ri < profile.size(); ++ri) {
    auto& res = rep.results[ri];
    if (res.mode != CacheMode::multihop || flows[ri].empty()) continue;
    double worst = 0.0;
    for (const auto& path : flows[ri])
      for (size_t h = 0; h + 1 < path.nodes.size(); ++h) {
        const NodeId a = path.nodes[h], b = path.nodes[h + 1];
        const double t = bits.undirected(a, b) / rep.link_rate;
        if (t > worst) {
          worst = t;
          res.bottleneck = "link:" + std::to_string(std::min(a, b)) + "-" +
                           std::to_string(std::max(a, b));
        }
      }
    res.completion_time = worst;
  }
  return rep;
}

}  // namespace phycache

#endif  // PHYCACHE_DELIVERY_HPP_
