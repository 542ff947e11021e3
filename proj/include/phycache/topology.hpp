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

#ifndef PHYCACHE_TOPOLOGY_HPP_
#define PHYCACHE_TOPOLOGY_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "phycache/error.hpp"
#include "phycache/random.hpp"

namespace phycache {

using NodeId = int;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double norm2(Point a) { return a.x * a.x + a.y * a.y; }

enum class PlacementKind { regular_grid, constrained_random, custom };

inline const char* placement_kind_name(PlacementKind k) {
  switch (k) {
    case PlacementKind::regular_grid: return "regular_grid";
    case PlacementKind::constrained_random: return "constrained_random";
    case PlacementKind::custom: return "custom";
  }
  return "custom";
}

inline PlacementKind parse_placement_kind(const std::string& s) {
  if (s == "regular_grid" || s == "grid") return PlacementKind::regular_grid;
  if (s == "constrained_random" || s == "random")
    return PlacementKind::constrained_random;
  if (s == "custom") return PlacementKind::custom;
  fail(Errc::parse_error, "unknown placement kind '" + s + "'");
}

/// Node coordinates on a rectangle [0, width] x [0, height] together with the
/// placement constraints they were generated under. Immutable once built.
class NodePlacement {
 public:
  NodePlacement() = default;
  NodePlacement(PlacementKind kind, std::vector<Point> positions, double width,
                double height, double r_0, double r_min, double r_max,
                bool torus = false, int grid_side = 0)
      : kind_(kind),
        positions_(std::move(positions)),
        width_(width),
        height_(height),
        r_0_(r_0),
        r_min_(r_min),
        r_max_(r_max),
        torus_(torus),
        grid_side_(grid_side) {}

  PlacementKind kind() const { return kind_; }
  const std::vector<Point>& positions() const { return positions_; }
  const Point& position(NodeId i) const { return positions_[i]; }
  int size() const { return static_cast<int>(positions_.size()); }
  double width() const { return width_; }
  double height() const { return height_; }
  double area_side() const { return width_; }
  double r_0() const { return r_0_; }
  double r_min() const { return r_min_; }
  double r_max() const { return r_max_; }
  bool torus() const { return torus_; }
  /// Lattice side for regular grids, zero otherwise.
  int grid_side() const { return grid_side_; }
  bool is_grid() const { return kind_ == PlacementKind::regular_grid; }

  NodePlacement with_torus(bool on) const {
    NodePlacement p = *this;
    p.torus_ = on;
    return p;
  }

  /// Vector from a to b; minimum image when wrapping is on.
  Point displacement(Point a, Point b) const {
    Point d = b - a;
    if (torus_) {
      d.x -= width_ * std::round(d.x / width_);
      d.y -= height_ * std::round(d.y / height_);
    }
    return d;
  }
  Point displacement(NodeId a, NodeId b) const {
    return displacement(positions_[a], positions_[b]);
  }
  double distance(Point a, Point b) const { return norm(displacement(a, b)); }
  double distance(NodeId a, NodeId b) const {
    return norm(displacement(a, b));
  }

  Point wrap(Point p) const {
    if (!torus_) return p;
    p.x -= width_ * std::floor(p.x / width_);
    p.y -= height_ * std::floor(p.y / height_);
    return p;
  }

  /// Row and column of a grid node (row follows y).
  std::pair<int, int> grid_cell(NodeId i) const {
    if (!is_grid()) fail(Errc::wrong_placement_kind, "not a regular grid");
    return {i / grid_side_, i % grid_side_};
  }

 private:
  PlacementKind kind_ = PlacementKind::custom;
  std::vector<Point> positions_;
  double width_ = 0.0;
  double height_ = 0.0;
  double r_0_ = 0.0;
  double r_min_ = 0.0;
  double r_max_ = 0.0;
  bool torus_ = false;
  int grid_side_ = 0;
};

/// Uniform bucket grid over the placement area answering radius and
/// nearest-node queries. Respects wraparound.
class SpatialIndex {
 public:
  SpatialIndex() = default;
  SpatialIndex(const NodePlacement& p, double cell)
      : w_(p.width()), h_(p.height()), torus_(p.torus()) {
    if (!(cell > 0.0)) cell = std::max(p.width(), p.height());
    nx_ = std::max(1, static_cast<int>(std::floor(w_ / cell)));
    ny_ = std::max(1, static_cast<int>(std::floor(h_ / cell)));
    cw_ = w_ / nx_;
    ch_ = h_ / ny_;
    buckets_.assign(static_cast<size_t>(nx_) * ny_, {});
    pts_ = p.positions();
    for (int i = 0; i < static_cast<int>(pts_.size()); ++i)
      buckets_[bucket_of(pts_[i])].push_back(i);
  }

  void move(NodeId i, Point to) {
    auto& from = buckets_[bucket_of(pts_[i])];
    from.erase(std::find(from.begin(), from.end(), i));
    pts_[i] = to;
    auto& dst = buckets_[bucket_of(to)];
    dst.insert(std::upper_bound(dst.begin(), dst.end(), i), i);
  }

  void insert(Point at) {
    pts_.push_back(at);
    buckets_[bucket_of(at)].push_back(static_cast<int>(pts_.size()) - 1);
  }

  const std::vector<Point>& points() const { return pts_; }

  Point disp(Point a, Point b) const {
    Point d = b - a;
    if (torus_) {
      d.x -= w_ * std::round(d.x / w_);
      d.y -= h_ * std::round(d.y / h_);
    }
    return d;
  }

  /// True when some node lies within radius of q.
  bool any_within(Point q, double radius) const {
    bool hit = false;
    visit_within(q, radius, [&](int, double) { hit = true; return true; });
    return hit;
  }

  /// Calls f(node, squared distance) for every node within radius of q.
  template <class F>
  void for_each_within(Point q, double radius, F&& f) const {
    visit_within(q, radius, [&](int i, double d2) { f(i, d2); return false; });
  }

 private:
  // Stops as soon as f returns true.
  template <class F>
  void visit_within(Point q, double radius, F&& f) const {
    const int rx = static_cast<int>(std::ceil(radius / cw_));
    const int ry = static_cast<int>(std::ceil(radius / ch_));
    const int cx = cell_x(q.x), cy = cell_y(q.y);
    const double r2 = radius * radius;
    int x0 = cx - rx, x1 = cx + rx, y0 = cy - ry, y1 = cy + ry;
    if (torus_) {
      if (x1 - x0 + 1 > nx_) x0 = 0, x1 = nx_ - 1;
      if (y1 - y0 + 1 > ny_) y0 = 0, y1 = ny_ - 1;
    } else {
      x0 = std::max(x0, 0), x1 = std::min(x1, nx_ - 1);
      y0 = std::max(y0, 0), y1 = std::min(y1, ny_ - 1);
    }
    for (int yy = y0; yy <= y1; ++yy) {
      const int by = torus_ ? ((yy % ny_) + ny_) % ny_ : yy;
      for (int xx = x0; xx <= x1; ++xx) {
        const int bx = torus_ ? ((xx % nx_) + nx_) % nx_ : xx;
        for (int i : buckets_[static_cast<size_t>(by) * nx_ + bx]) {
          const double d2 = norm2(disp(q, pts_[i]));
          if (d2 <= r2 && f(i, d2)) return;
        }
      }
    }
  }

 public:

  /// Nearest node; ties go to the lowest index.
  NodeId nearest(Point q, double* dist2 = nullptr) const {
    NodeId best = -1;
    double bd = std::numeric_limits<double>::infinity();
    const int cx = cell_x(q.x), cy = cell_y(q.y);
    const int kmax = std::max(nx_, ny_);
    for (int k = 0; k <= kmax; ++k) {
      for (int yy = cy - k; yy <= cy + k; ++yy) {
        for (int xx = cx - k; xx <= cx + k; ++xx) {
          if (std::max(std::abs(xx - cx), std::abs(yy - cy)) != k) continue;
          int bx = xx, by = yy;
          if (torus_) {
            bx = ((bx % nx_) + nx_) % nx_;
            by = ((by % ny_) + ny_) % ny_;
          } else if (bx < 0 || by < 0 || bx >= nx_ || by >= ny_) {
            continue;
          }
          for (int i : buckets_[static_cast<size_t>(by) * nx_ + bx]) {
            const double d2 = norm2(disp(q, pts_[i]));
            if (d2 < bd || (d2 == bd && i < best)) bd = d2, best = i;
          }
        }
      }
      const double reach = k * std::min(cw_, ch_);
      if (best >= 0 && bd < reach * reach) break;
    }
    if (dist2) *dist2 = bd;
    return best;
  }

 private:
  int cell_x(double x) const {
    int c = static_cast<int>(std::floor(x / cw_));
    return torus_ ? c : std::clamp(c, 0, nx_ - 1);
  }
  int cell_y(double y) const {
    int c = static_cast<int>(std::floor(y / ch_));
    return torus_ ? c : std::clamp(c, 0, ny_ - 1);
  }
  size_t bucket_of(Point p) const {
    int bx = cell_x(p.x), by = cell_y(p.y);
    if (torus_) {
      bx = ((bx % nx_) + nx_) % nx_;
      by = ((by % ny_) + ny_) % ny_;
    }
    return static_cast<size_t>(by) * nx_ + bx;
  }

  double w_ = 0, h_ = 0, cw_ = 1, ch_ = 1;
  int nx_ = 1, ny_ = 1;
  bool torus_ = false;
  std::vector<Point> pts_;
  std::vector<std::vector<int>> buckets_;
};

struct MinDistanceCheck {
  bool ok = true;
  double min_distance = std::numeric_limits<double>::infinity();
  NodeId a = -1, b = -1;
};

inline MinDistanceCheck check_min_distance(const NodePlacement& p,
                                           double rel_tol = 1e-9) {
  MinDistanceCheck out;
  if (p.size() < 2) return out;
  SpatialIndex idx(p, p.r_min() > 0 ? p.r_min() : p.r_0());
  const double probe = std::max(p.r_min(), p.r_0()) * 1.01;
  for (NodeId i = 0; i < p.size(); ++i) {
    idx.for_each_within(p.position(i), probe, [&](int j, double d2) {
      if (j <= i) return;
      const double d = std::sqrt(d2);
      if (d < out.min_distance) out.min_distance = d, out.a = i, out.b = j;
    });
  }
  if (out.a < 0) {
    // Nothing within the probe radius: fall back to an exact scan.
    for (NodeId i = 0; i < p.size(); ++i)
      for (NodeId j = i + 1; j < p.size(); ++j) {
        const double d = p.distance(i, j);
        if (d < out.min_distance) out.min_distance = d, out.a = i, out.b = j;
      }
  }
  out.ok = out.min_distance >= p.r_min() * (1.0 - rel_tol);
  return out;
}

/// Probe lattice used by the coverage check: spacing at most `spacing`,
/// including the area boundary.
struct ProbeGrid {
  int nx = 0, ny = 0;
  double dx = 0, dy = 0;

  ProbeGrid(double width, double height, double spacing) {
    nx = static_cast<int>(std::ceil(width / spacing)) + 1;
    ny = static_cast<int>(std::ceil(height / spacing)) + 1;
    dx = width / (nx - 1);
    dy = height / (ny - 1);
  }
  Point at(int ix, int iy) const { return {ix * dx, iy * dy}; }
};

struct CoverageCheck {
  bool ok = true;
  double worst_distance = 0.0;
  Point worst_point{};
};

inline CoverageCheck check_coverage(const NodePlacement& p,
                                    double spacing = 0.0,
                                    double rel_tol = 1e-9) {
  if (spacing <= 0) spacing = p.r_min() / 4.0;
  CoverageCheck out;
  if (p.size() == 0) {
    out.ok = false;
    out.worst_distance = std::numeric_limits<double>::infinity();
    return out;
  }
  SpatialIndex idx(p, std::max(p.r_max(), 1e-12));
  ProbeGrid g(p.width(), p.height(), spacing);
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) {
      const Point q = g.at(ix, iy);
      double d2;
      idx.nearest(q, &d2);
      const double d = std::sqrt(d2);
      if (d > out.worst_distance) out.worst_distance = d, out.worst_point = q;
    }
  out.ok = out.worst_distance <= p.r_max() * (1.0 + rel_tol);
  return out;
}

inline bool validate_placement(const NodePlacement& p) {
  return check_min_distance(p).ok && check_coverage(p).ok;
}

inline NodePlacement make_regular_grid(int n_side, double r_0,
                                       bool torus = false) {
  if (n_side < 1) fail(Errc::invalid_argument, "n_side must be positive");
  if (!(r_0 > 0)) fail(Errc::invalid_argument, "r_0 must be positive");
  std::vector<Point> pos;
  pos.reserve(static_cast<size_t>(n_side) * n_side);
  for (int r = 0; r < n_side; ++r)
    for (int c = 0; c < n_side; ++c)
      pos.push_back({(c + 0.5) * r_0, (r + 0.5) * r_0});
  const double side = n_side * r_0;
  const double r_max = r_0 * std::sqrt(2.0) / 2.0 * (1.0 + 1e-9);
  return NodePlacement(PlacementKind::regular_grid, std::move(pos), side, side,
                       r_0, r_0, r_max, torus, n_side);
}

inline NodePlacement make_custom_placement(std::vector<Point> positions,
                                           double width, double height,
                                           double r_0, double r_min,
                                           double r_max, bool torus = false) {
  return NodePlacement(PlacementKind::custom, std::move(positions), width,
                       height, r_0, r_min, r_max, torus);
}

namespace detail {

struct RandomLayoutState {
  double side;
  double r_min, r_max;
  bool torus;
  ProbeGrid probes;
};

inline bool min_distance_ok(const SpatialIndex& idx, Point q, NodeId self,
                            double r_min) {
  bool ok = true;
  idx.for_each_within(q, r_min, [&](int j, double d2) {
    if (j != self && d2 < r_min * r_min) ok = false;
  });
  return ok;
}

inline bool probe_covered(const SpatialIndex& idx, Point q, double r_max) {
  return idx.any_within(q, r_max);
}

// Every probe within r_max of `around` still has a node within r_max.
inline bool local_coverage_ok(const SpatialIndex& idx,
                              const RandomLayoutState& st, Point around) {
  const ProbeGrid& g = st.probes;
  const int rx = static_cast<int>(std::ceil(st.r_max / g.dx)) + 1;
  const int ry = static_cast<int>(std::ceil(st.r_max / g.dy)) + 1;
  const int cx = static_cast<int>(std::round(around.x / g.dx));
  const int cy = static_cast<int>(std::round(around.y / g.dy));
  // Under wraparound the last probe row and column coincide with the first.
  const int px = g.nx - 1, py = g.ny - 1;
  for (int jy = cy - ry; jy <= cy + ry; ++jy) {
    int iy = jy;
    if (st.torus) iy = ((jy % py) + py) % py;
    else if (iy < 0 || iy >= g.ny) continue;
    for (int jx = cx - rx; jx <= cx + rx; ++jx) {
      int ix = jx;
      if (st.torus) ix = ((jx % px) + px) % px;
      else if (ix < 0 || ix >= g.nx) continue;
      const Point q = g.at(ix, iy);
      if (norm2(idx.disp(around, q)) > st.r_max * st.r_max * 1.0001) continue;
      if (!probe_covered(idx, q, st.r_max)) return false;
    }
  }
  return true;
}

inline std::vector<Point> dart_and_repair(int n, const RandomLayoutState& st,
                                          const NodePlacement& shape,
                                          Rng& g, int target) {
  SpatialIndex idx(shape, st.r_max);
  const double side = st.side;
  auto add_darts = [&](int upto, long tries) {
    for (long t = 0; t < tries && static_cast<int>(idx.points().size()) < upto;
         ++t) {
      const Point c{uniform(g, 0, side), uniform(g, 0, side)};
      if (min_distance_ok(idx, c, -1, st.r_min)) idx.insert(c);
    }
  };
  add_darts(target, 60L * n);
  const ProbeGrid& pg = st.probes;
  std::vector<int> order(static_cast<size_t>(pg.nx) * pg.ny);
  std::iota(order.begin(), order.end(), 0);
  for (size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[uniform_index(g, i)]);
  for (int k : order) {
    const Point q = pg.at(k % pg.nx, k / pg.nx);
    if (!probe_covered(idx, q, st.r_max)) idx.insert(q);
  }
  add_darts(n, 200L * n);
  return idx.points();
}

}  // namespace detail

/// Random placement on a square of area n·r_0² with every pair at least r_min
/// apart and every probe point within r_max of a node.
///
/// A perfect-square n whose lattice already satisfies both constraints starts
/// from that lattice; other sizes start from rejection sampling followed by
/// coverage repair. The start is then randomized by a seeded chain of local
/// moves that each keep both constraints.
inline NodePlacement make_constrained_random(int n, double r_0, double r_min,
                                             double r_max, std::uint64_t seed,
                                             bool torus = false,
                                             int sweeps = 48) {
  if (n < 1) fail(Errc::invalid_argument, "n must be positive");
  if (!(r_min < r_max))
    fail(Errc::invalid_argument, "r_min must be smaller than r_max");
  const double side = std::sqrt(static_cast<double>(n)) * r_0;
  if (n == 1) {
    return NodePlacement(PlacementKind::constrained_random,
                         {{side / 2, side / 2}}, side, side, r_0, r_min, r_max,
                         torus);
  }
  const double pi = 3.14159265358979323846;
  if (n * pi * (r_min / 2) * (r_min / 2) > side * side)
    fail(Errc::generation_failed, "packing density exceeds the area");

  detail::RandomLayoutState st{side, r_min, r_max, torus,
                               ProbeGrid(side, side, r_min / 4.0)};
  const NodePlacement shape(PlacementKind::constrained_random, {}, side, side,
                            r_0, r_min, r_max, torus);
  Rng g(seed);

  std::vector<Point> pos;
  const int m = static_cast<int>(std::lround(std::sqrt(double(n))));
  if (m * m == n && r_min <= r_0 && r_0 * std::sqrt(0.5) <= r_max) {
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c)
        pos.push_back({(c + 0.5) * r_0, (r + 0.5) * r_0});
  } else {
    // Rows of near-equal length, each node centred in its own cell.
    const int rows = std::max(1, m);
    std::vector<Point> grid;
    for (int r = 0; r < rows; ++r) {
      const int k = n / rows + (r < n % rows ? 1 : 0);
      for (int c = 0; c < k; ++c)
        grid.push_back({(c + 0.5) * side / k, (r + 0.5) * side / rows});
    }
    const NodePlacement trial(PlacementKind::constrained_random, grid, side,
                              side, r_0, r_min, r_max, torus);
    if (validate_placement(trial)) pos = std::move(grid);
  }
  if (pos.empty()) {
    int target = n;
    for (int attempt = 0; attempt < 24 && pos.empty(); ++attempt) {
      auto cand = detail::dart_and_repair(n, st, shape, g, target);
      const int got = static_cast<int>(cand.size());
      if (got == n) {
        NodePlacement trial(PlacementKind::constrained_random, cand, side, side,
                            r_0, r_min, r_max, torus);
        if (check_coverage(trial).ok) pos = std::move(cand);
      } else if (got > n) {
        target = std::max(1, target - (got - n) - 1);
      } else {
        target = std::min(n, target + 1);
      }
    }
    if (pos.empty())
      fail(Errc::generation_failed,
           "no placement of " + std::to_string(n) +
               " nodes satisfies the distance and coverage constraints");
  }

  NodePlacement base(PlacementKind::constrained_random, pos, side, side, r_0,
                     r_min, r_max, torus);
  SpatialIndex idx(base, r_max);
  const double step = 0.25 * std::min(r_0, r_max);
  for (int s = 0; s < sweeps; ++s) {
    for (NodeId i = 0; i < n; ++i) {
      const Point old = idx.points()[i];
      Point cand{old.x + uniform(g, -step, step), old.y + uniform(g, -step, step)};
      if (torus) {
        cand.x -= side * std::floor(cand.x / side);
        cand.y -= side * std::floor(cand.y / side);
      } else if (cand.x < 0 || cand.y < 0 || cand.x > side || cand.y > side) {
        continue;
      }
      if (!detail::min_distance_ok(idx, cand, i, r_min)) continue;
      idx.move(i, cand);
      if (!detail::local_coverage_ok(idx, st, old)) idx.move(i, old);
    }
  }
  NodePlacement out(PlacementKind::constrained_random, idx.points(), side, side,
                    r_0, r_min, r_max, torus);
  if (!validate_placement(out))
    fail(Errc::generation_failed, "final placement failed validation");
  return out;
}

/// Nearest-node partition of the area with ties going to the lowest index,
/// plus the cell adjacency graph.
class VoronoiPartition {
 public:
  VoronoiPartition() = default;
  explicit VoronoiPartition(const NodePlacement& p)
      : placement_(p), index_(p, std::max(p.r_max(), p.r_0() / 2)) {
    const int n = p.size();
    neighbors_.assign(n, {});
    for (NodeId i = 0; i < n; ++i) {
      for (const auto& e : clip_cell(i).edges)
        if (e.from >= 0) neighbors_[i].push_back(e.from);
    }
    for (NodeId i = 0; i < n; ++i)
      for (NodeId j : neighbors_[i]) neighbors_[j].push_back(i);
    for (auto& v : neighbors_) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    }
  }

  NodeId owner(Point q) const { return index_.nearest(placement_.wrap(q)); }
  const std::vector<NodeId>& neighbors(NodeId i) const { return neighbors_[i]; }
  const NodePlacement& placement() const { return placement_; }
  const SpatialIndex& index() const { return index_; }

  struct Edge {
    Point a, b;
    NodeId from;  // node whose bisector bounds this edge, -1 for the border
  };
  struct Cell {
    std::vector<Point> vertices;  // counter-clockwise, in local image frame
    std::vector<Edge> edges;
  };

  /// Cell polygon of node i. Under wraparound the coordinates are those of
  /// the image centred on the node's stored position.
  Cell cell(NodeId i) const { return clip_cell(i); }

  double cell_area(NodeId i) const {
    const auto c = clip_cell(i);
    double a = 0;
    for (size_t k = 0; k < c.vertices.size(); ++k)
      a += cross(c.vertices[k], c.vertices[(k + 1) % c.vertices.size()]);
    return a / 2;
  }

  double cell_diameter(NodeId i) const {
    const auto c = clip_cell(i);
    double d = 0;
    for (const auto& u : c.vertices)
      for (const auto& v : c.vertices) d = std::max(d, norm(u - v));
    return d;
  }

 private:
  Cell clip_cell(NodeId i) const {
    const Point c = placement_.position(i);
    const double reach = 2.0 * std::max(placement_.r_max(), placement_.r_0());
    double x0 = c.x - reach, x1 = c.x + reach, y0 = c.y - reach,
           y1 = c.y + reach;
    if (!placement_.torus()) {
      x0 = std::max(x0, 0.0), y0 = std::max(y0, 0.0);
      x1 = std::min(x1, placement_.width()), y1 = std::min(y1, placement_.height());
    }
    struct V {
      Point p;
      NodeId edge_from;  // label of the edge leaving this vertex
    };
    std::vector<V> poly = {{{x0, y0}, -1}, {{x1, y0}, -1}, {{x1, y1}, -1},
                           {{x0, y1}, -1}};
    index_.for_each_within(c, 2.0 * reach, [&](int j, double) {
      if (j == i || poly.empty()) return;
      const Point e = placement_.displacement(i, j);
      if (norm2(e) == 0) return;
      const Point mid = c + 0.5 * e;
      // Keep points x with (x - mid)·e <= 0.
      std::vector<V> out;
      const size_t k = poly.size();
      for (size_t a = 0; a < k; ++a) {
        const V& u = poly[a];
        const V& v = poly[(a + 1) % k];
        const double su = dot(u.p - mid, e), sv = dot(v.p - mid, e);
        if (su <= 0) out.push_back(u);
        if ((su <= 0) != (sv <= 0)) {
          const double t = su / (su - sv);
          const Point x = u.p + t * (v.p - u.p);
          // Entering the kept side along the bisector or leaving it.
          out.push_back({x, su <= 0 ? j : u.edge_from});
        }
      }
      poly.swap(out);
    });
    Cell cell;
    const double tiny = 1e-9 * std::max(placement_.r_0(), placement_.r_min());
    for (size_t a = 0; a < poly.size(); ++a) {
      const V& u = poly[a];
      const V& v = poly[(a + 1) % poly.size()];
      cell.vertices.push_back(u.p);
      if (norm(v.p - u.p) > tiny) cell.edges.push_back({u.p, v.p, u.edge_from});
    }
    return cell;
  }

  NodePlacement placement_;
  SpatialIndex index_;
  std::vector<std::vector<NodeId>> neighbors_;
};

inline VoronoiPartition voronoi(const NodePlacement& p) {
  return VoronoiPartition(p);
}

}  // namespace phycache

#endif  // PHYCACHE_TOPOLOGY_HPP_
