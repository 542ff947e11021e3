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

#ifndef PHYCACHE_CODING_HPP_
#define PHYCACHE_CODING_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <deque>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "phycache/channel.hpp"
#include "phycache/error.hpp"
#include "phycache/gf256.hpp"
#include "phycache/random.hpp"
#include "phycache/topology.hpp"

namespace phycache {

// ---------------------------------------------------------------------------
// Popularity and replication

struct PopularityDist {
  std::vector<double> p;
  double tau = std::numeric_limits<double>::quiet_NaN();

  int L() const { return static_cast<int>(p.size()); }
  bool is_zipf() const { return !std::isnan(tau); }
};

inline PopularityDist zipf(int L, double tau) {
  if (L < 1) fail(Errc::invalid_argument, "L must be at least 1");
  if (!(tau >= 0)) fail(Errc::invalid_argument, "tau must be non-negative");
  PopularityDist d;
  d.tau = tau;
  d.p.resize(L);
  double z = 0.0;
  for (int l = L; l >= 1; --l) z += std::pow(static_cast<double>(l), -tau);
  for (int l = 1; l <= L; ++l)
    d.p[l - 1] = std::pow(static_cast<double>(l), -tau) / z;
  return d;
}

inline PopularityDist make_popularity(std::vector<double> p) {
  if (p.empty()) fail(Errc::invalid_argument, "empty popularity vector");
  double s = 0.0;
  for (double v : p) {
    if (!(v >= 0)) fail(Errc::invalid_argument, "negative popularity");
    s += v;
  }
  if (std::fabs(s - 1.0) > 1e-12)
    fail(Errc::invalid_argument, "popularity must sum to one");
  PopularityDist d;
  d.p = std::move(p);
  return d;
}

enum class CacheMode { multihop, comp };

inline const char* cache_mode_name(CacheMode m) {
  return m == CacheMode::comp ? "comp" : "multihop";
}

inline CacheMode mode_of(double q) {
  return q >= 0.5 ? CacheMode::comp : CacheMode::multihop;
}

struct ReplicationVector {
  std::vector<double> q;
  double file_size = 0.0;  // every file has F bits

  int L() const { return static_cast<int>(q.size()); }
  double stored_bits() const {
    return std::accumulate(q.begin(), q.end(), 0.0) * file_size;
  }
};

// ---------------------------------------------------------------------------
// Layer bipartition

struct Bipartition {
  std::vector<int> layer;  // 1 or 2 per node

  std::vector<NodeId> members(int which) const {
    std::vector<NodeId> out;
    for (NodeId i = 0; i < static_cast<NodeId>(layer.size()); ++i)
      if (layer[i] == which) out.push_back(i);
    return out;
  }
};

/// Distance below which a MARK broadcast exceeds the SINR threshold gamma_0
/// in a noise-limited channel.
inline double neighbor_radius_from_sinr(double P, double W, double alpha,
                                        double gamma_0) {
  return std::pow(P / (W * gamma_0), 1.0 / alpha);
}

/// MARK flood from `root`: each node takes the layer opposite to the first
/// MARK it hears and rebroadcasts. Links exist between nodes at most
/// `neighbor_radius` apart (default 1.5 r_max).
inline Bipartition partition_nodes(const NodePlacement& pl,
                                   double neighbor_radius = 0.0,
                                   NodeId root = 0) {
  const int n = pl.size();
  if (neighbor_radius <= 0.0) neighbor_radius = 1.5 * pl.r_max();
  Bipartition bp;
  bp.layer.assign(n, 0);
  if (n == 0) return bp;
  SpatialIndex idx(pl, neighbor_radius);
  std::deque<NodeId> frontier{root};
  bp.layer[root] = 1;
  std::vector<NodeId> heard;
  while (!frontier.empty()) {
    const NodeId u = frontier.front();
    frontier.pop_front();
    heard.clear();
    idx.for_each_within(pl.position(u), neighbor_radius,
                        [&](int v, double) { heard.push_back(v); });
    std::sort(heard.begin(), heard.end());
    for (NodeId v : heard) {
      if (v == u || bp.layer[v] != 0) continue;
      bp.layer[v] = 3 - bp.layer[u];
      frontier.push_back(v);
    }
  }
  for (NodeId i = 0; i < n; ++i)
    if (bp.layer[i] == 0)
      fail(Errc::disconnected_graph,
           "node " + std::to_string(i) + " never received a MARK");
  return bp;
}

// ---------------------------------------------------------------------------
// Random linear coding over GF(256)

struct CodedSymbol {
  std::vector<std::uint8_t> coeffs;   // k generator coefficients
  std::vector<std::uint8_t> payload;  // symbol_bytes coded bytes
};

struct ParityBlock {
  int file = 0;
  int segment = 0;
  int block_index = 0;  // node index (multihop) or layer 1/2 (CoMP)
  CacheMode mode = CacheMode::multihop;
  double length_bits = 0.0;  // exact q L_S
  std::vector<CodedSymbol> symbols;

  int n_symbols() const { return static_cast<int>(symbols.size()); }
};

/// Segment layout: k source symbols of symbol_bytes each, zero padded.
struct CodeParams {
  int k = 64;
  std::size_t segment_bytes = 0;

  std::size_t symbol_bytes() const {
    return (segment_bytes + static_cast<std::size_t>(k) - 1) / k;
  }
  /// Coded symbols in a block of fraction q, rounded up.
  int symbols_for(double q) const {
    const double m = std::ceil(q * k - 1e-9);
    return std::clamp(static_cast<int>(m), 1, k);
  }
};

/// Incremental Gaussian elimination over GF(256). With zero payload bytes it
/// only tracks the rank of the coefficient rows.
class SegmentDecoder {
 public:
  SegmentDecoder(int k, std::size_t symbol_bytes)
      : k_(k),
        sb_(symbol_bytes),
        pivot_(k, -1),
        coeffs_(static_cast<std::size_t>(k) * k),
        payload_(static_cast<std::size_t>(k) * symbol_bytes),
        wc_(k),
        wp_(symbol_bytes) {}

  /// Returns true when the symbol raised the rank.
  bool add(const std::uint8_t* coeffs, const std::uint8_t* payload) {
    ++received_;
    if (rank_ == k_) return false;
    std::memcpy(wc_.data(), coeffs, k_);
    if (sb_) std::memcpy(wp_.data(), payload, sb_);
    int lead = -1;
    for (int c = 0; c < k_; ++c) {
      const std::uint8_t a = wc_[c];
      if (a == 0) continue;
      if (pivot_[c] < 0) {
        lead = c;
        break;
      }
      const std::size_t r = static_cast<std::size_t>(pivot_[c]);
      gf256::axpy(a, &coeffs_[r * k_ + c], &wc_[c], k_ - c);
      if (sb_) gf256::axpy(a, &payload_[r * sb_], wp_.data(), sb_);
    }
    if (lead < 0) return false;
    const std::uint8_t s = gf256::inv(wc_[lead]);
    gf256::scale(s, &wc_[lead], k_ - lead);
    if (sb_) gf256::scale(s, wp_.data(), sb_);
    const std::size_t r = static_cast<std::size_t>(rank_);
    std::fill(&coeffs_[r * k_], &coeffs_[r * k_] + lead, 0);
    std::memcpy(&coeffs_[r * k_ + lead], &wc_[lead], k_ - lead);
    if (sb_) std::memcpy(&payload_[r * sb_], wp_.data(), sb_);
    pivot_[lead] = rank_++;
    return true;
  }

  bool add(const CodedSymbol& s) {
    return add(s.coeffs.data(), s.payload.empty() ? nullptr : s.payload.data());
  }

  int k() const { return k_; }
  int rank() const { return rank_; }
  int received() const { return received_; }
  bool complete() const { return rank_ == k_; }

  /// Source symbols concatenated; requires full rank.
  std::vector<std::uint8_t> solve() const {
    if (!complete()) fail(Errc::rank_deficient, "coefficient matrix rank " +
                                                    std::to_string(rank_) +
                                                    " < " + std::to_string(k_));
    std::vector<std::uint8_t> x(static_cast<std::size_t>(k_) * sb_);
    for (int c = k_ - 1; c >= 0; --c) {
      const std::size_t r = static_cast<std::size_t>(pivot_[c]);
      std::uint8_t* xc = &x[static_cast<std::size_t>(c) * sb_];
      std::memcpy(xc, &payload_[r * sb_], sb_);
      for (int j = c + 1; j < k_; ++j)
        gf256::axpy(coeffs_[r * k_ + j], &x[static_cast<std::size_t>(j) * sb_],
                    xc, sb_);
    }
    return x;
  }

 private:
  int k_;
  std::size_t sb_;
  int rank_ = 0;
  int received_ = 0;
  std::vector<int> pivot_;
  std::vector<std::uint8_t> coeffs_, payload_, wc_, wp_;
};

namespace detail {

inline std::vector<std::uint8_t> random_row(int k, std::uint64_t seed) {
  Rng g(seed);
  std::vector<std::uint8_t> row(k);
  for (int i = 0; i < k; i += 8) {
    std::uint64_t w = g();
    for (int b = 0; b < 8 && i + b < k; ++b, w >>= 8)
      row[i + b] = static_cast<std::uint8_t>(w);
  }
  return row;
}

inline CodedSymbol encode_row(std::vector<std::uint8_t> coeffs,
                              const std::vector<std::uint8_t>& source,
                              std::size_t sb) {
  CodedSymbol s;
  s.payload.assign(sb, 0);
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    gf256::axpy(coeffs[i], &source[i * sb], s.payload.data(), sb);
  s.coeffs = std::move(coeffs);
  return s;
}

// Draws coefficient rows until one is independent of every tracker.
template <class... Trackers>
std::vector<std::uint8_t> independent_row(int k, std::uint64_t seed,
                                          Trackers&... t) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    auto row = random_row(k, derive_seed(seed, {attempt}));
    bool ok = true;
    // Probe on copies so a rejected row leaves the trackers unchanged.
    ((ok = ok && [&] {
       SegmentDecoder probe = t;
       return probe.add(row.data(), nullptr);
     }()),
     ...);
    if (ok) {
      (t.add(row.data(), nullptr), ...);
      return row;
    }
    if (attempt > 256) fail(Errc::rank_deficient, "could not draw a row");
  }
}

}  // namespace detail

/// Source symbols of a segment: k rows of symbol_bytes, zero padded.
inline std::vector<std::uint8_t> source_symbols(
    const std::vector<std::uint8_t>& segment, int k) {
  const std::size_t sb = CodeParams{k, segment.size()}.symbol_bytes();
  std::vector<std::uint8_t> source(static_cast<std::size_t>(k) * sb, 0);
  std::copy(segment.begin(), segment.end(), source.begin());
  return source;
}

namespace detail {

inline void check_block_size(double q, std::size_t segment_bytes) {
  if (!(q > 0.0 && q <= 1.0))
    fail(Errc::domain_error, "replication fraction must lie in (0, 1]");
  if (q * static_cast<double>(segment_bytes) * 8.0 < 8.0)
    fail(Errc::block_too_small, "block shorter than one byte");
}

}  // namespace detail

/// Multihop parity block `index`: ceil(q k) coded symbols of full rank.
inline ParityBlock encode_multihop_block(const std::vector<std::uint8_t>& source,
                                         const CodeParams& cp, double q,
                                         int index, std::uint64_t seed) {
  detail::check_block_size(q, cp.segment_bytes);
  const int k = cp.k;
  const std::size_t sb = cp.symbol_bytes();
  const int m = cp.symbols_for(q);
  ParityBlock blk;
  blk.block_index = index;
  blk.mode = CacheMode::multihop;
  blk.length_bits = q * static_cast<double>(cp.segment_bytes) * 8.0;
  blk.symbols.reserve(m);
  SegmentDecoder own(k, 0);
  for (int t = 0; t < m; ++t) {
    auto row = detail::independent_row(
        k, derive_seed(seed, {1, static_cast<std::uint64_t>(index),
                              static_cast<std::uint64_t>(t)}),
        own);
    blk.symbols.push_back(detail::encode_row(std::move(row), source, sb));
  }
  return blk;
}

/// The two CoMP layer blocks. The second is drawn so that either layer block
/// together with the leading k - m symbols of the other has full rank.
inline std::pair<ParityBlock, ParityBlock> encode_comp_blocks(
    const std::vector<std::uint8_t>& source, const CodeParams& cp, double q,
    std::uint64_t seed) {
  detail::check_block_size(q, cp.segment_bytes);
  if (mode_of(q) != CacheMode::comp)
    fail(Errc::domain_error, "CoMP blocks need q >= 0.5");
  const int k = cp.k;
  const std::size_t sb = cp.symbol_bytes();
  const int m = cp.symbols_for(q);
  const int rest = k - m;
  ParityBlock l1, l2;
  for (ParityBlock* b : {&l1, &l2}) {
    b->mode = CacheMode::comp;
    b->length_bits = q * static_cast<double>(cp.segment_bytes) * 8.0;
    b->symbols.reserve(m);
  }
  l1.block_index = 1;
  l2.block_index = 2;
  SegmentDecoder all1(k, 0), head1(k, 0);
  for (int t = 0; t < m; ++t) {
    auto row = detail::independent_row(
        k, derive_seed(seed, {2, 1, static_cast<std::uint64_t>(t)}), all1);
    if (t < rest) head1.add(row.data(), nullptr);
    l1.symbols.push_back(detail::encode_row(std::move(row), source, sb));
  }
  for (int t = 0; t < m; ++t) {
    const std::uint64_t s =
        derive_seed(seed, {2, 2, static_cast<std::uint64_t>(t)});
    auto row = t < rest ? detail::independent_row(k, s, all1, head1)
                        : detail::independent_row(k, s, head1);
    l2.symbols.push_back(detail::encode_row(std::move(row), source, sb));
  }
  return {std::move(l1), std::move(l2)};
}

/// Parity blocks of one segment: n_blocks multihop blocks, or the two CoMP
/// layer blocks. Lengths are rounded up to whole GF(256) symbols.
inline std::vector<ParityBlock> encode_segment(
    const std::vector<std::uint8_t>& segment, double q, CacheMode mode,
    int n_blocks, std::uint64_t seed, int k = 64, int file = 0,
    int segment_id = 0) {
  detail::check_block_size(q, segment.size());
  const CodeParams cp{k, segment.size()};
  const auto source = source_symbols(segment, k);
  std::vector<ParityBlock> out;
  if (mode == CacheMode::multihop) {
    if (n_blocks < 1) fail(Errc::invalid_argument, "n_blocks must be positive");
    out.reserve(n_blocks);
    for (int b = 0; b < n_blocks; ++b)
      out.push_back(encode_multihop_block(source, cp, q, b, seed));
  } else {
    auto [l1, l2] = encode_comp_blocks(source, cp, q, seed);
    out.push_back(std::move(l1));
    out.push_back(std::move(l2));
  }
  for (auto& b : out) {
    b.file = file;
    b.segment = segment_id;
  }
  return out;
}

/// Leading `symbols` coded symbols of a block, as received by a requester.
struct Fragment {
  const ParityBlock* block = nullptr;
  int symbols = 0;
};

/// Recovers the segment bytes from received fragments.
inline std::vector<std::uint8_t> decode_segment(
    const std::vector<Fragment>& fragments, int k, std::size_t segment_bytes) {
  int total = 0;
  for (const auto& f : fragments) total += f.symbols;
  if (total < k)
    fail(Errc::insufficient_bits, std::to_string(total) + " of " +
                                      std::to_string(k) + " symbols received");
  const std::size_t sb = CodeParams{k, segment_bytes}.symbol_bytes();
  SegmentDecoder dec(k, sb);
  for (const auto& f : fragments) {
    const int take = std::min(f.symbols, f.block->n_symbols());
    for (int t = 0; t < take && !dec.complete(); ++t)
      dec.add(f.block->symbols[t]);
  }
  auto x = dec.solve();
  x.resize(segment_bytes);
  return x;
}

// ---------------------------------------------------------------------------
// Cache layout

struct BlockDescriptor {
  int file = 0;
  int block_index = 0;  // node index (multihop) or layer (CoMP)
  CacheMode mode = CacheMode::multihop;
  double bits_per_segment = 0.0;
  int segments = 0;

  double total_bits() const { return bits_per_segment * segments; }
};

struct CacheLayout {
  std::vector<int> layer_of_node;
  std::vector<CacheMode> mode_of_file;
  std::vector<std::vector<BlockDescriptor>> blocks_of_node;
  std::vector<double> q;
  double L_S = 0.0;
  double F = 0.0;

  double stored_bits(NodeId n) const {
    double s = 0.0;
    for (const auto& b : blocks_of_node[n]) s += b.total_bits();
    return s;
  }
};

inline CacheLayout build_cache_layout(const NodePlacement& pl,
                                      const Bipartition& bp,
                                      const std::vector<double>& q,
                                      const PopularityDist& pop,
                                      const SystemParams& sp) {
  if (static_cast<int>(q.size()) != pop.L())
    fail(Errc::invalid_argument, "q and popularity lengths differ");
  if (static_cast<int>(bp.layer.size()) != pl.size())
    fail(Errc::invalid_argument, "bipartition does not match placement");
  const int segments =
      static_cast<int>(std::llround(std::ceil(sp.F / sp.L_S - 1e-9)));
  CacheLayout lay;
  lay.layer_of_node = bp.layer;
  lay.q = q;
  lay.L_S = sp.L_S;
  lay.F = sp.F;
  lay.mode_of_file.resize(q.size());
  lay.blocks_of_node.assign(pl.size(), {});
  double per_node = 0.0;
  for (int l = 0; l < static_cast<int>(q.size()); ++l) {
    if (!(q[l] >= 0.0 && q[l] <= 1.0))
      fail(Errc::domain_error, "q out of [0, 1]");
    lay.mode_of_file[l] = mode_of(q[l]);
    per_node += q[l] * sp.F;
  }
  if (per_node > sp.B_C * (1.0 + 1e-12))
    fail(Errc::cache_overflow, "sum q_l F exceeds B_C");
  for (NodeId n = 0; n < pl.size(); ++n) {
    for (int l = 0; l < static_cast<int>(q.size()); ++l) {
      if (q[l] <= 0.0) continue;
      BlockDescriptor d;
      d.file = l;
      d.mode = lay.mode_of_file[l];
      d.block_index = d.mode == CacheMode::comp ? bp.layer[n] : n;
      d.bits_per_segment = q[l] * sp.L_S;
      d.segments = segments;
      lay.blocks_of_node[n].push_back(d);
    }
    if (lay.stored_bits(n) > sp.B_C * (1.0 + 1e-9))
      fail(Errc::cache_overflow, "node " + std::to_string(n) + " over budget");
  }
  return lay;
}

}  // namespace phycache

#endif  // PHYCACHE_CODING_HPP_
