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
#include <numeric>

#include "phycache/coding.hpp"
#include "phycache/random.hpp"

namespace phycache {
namespace {

std::vector<std::uint8_t> random_bytes(std::size_t n, std::uint64_t seed) {
  Rng g(seed);
  std::vector<std::uint8_t> v(n);
  for (auto& b : v) b = static_cast<std::uint8_t>(g());
  return v;
}

// Two rows of four unit-spaced nodes, numbered row by row from the top left.
NodePlacement eight_node_layout() {
  std::vector<Point> pts;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 4; ++c) pts.push_back({c + 0.5, 1.5 - r});
  return make_custom_placement(pts, 4, 2, 1, 1, 0.75);
}

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::invalid_argument;
}

// Decodes fragments; on a rank shortfall pulls one more symbol from the
// first fragment that still has spare symbols.
std::vector<std::uint8_t> decode_with_top_up(std::vector<Fragment> frags, int k,
                                             std::size_t bytes, int* top_ups) {
  for (;;) {
    try {
      return decode_segment(frags, k, bytes);
    } catch (const Error& e) {
      if (e.code() != Errc::rank_deficient) throw;
      auto it = std::find_if(frags.begin(), frags.end(), [](const Fragment& f) {
        return f.symbols < f.block->n_symbols();
      });
      if (it == frags.end()) throw;
      ++it->symbols;
      ++*top_ups;
    }
  }
}

TEST(Zipf, UniformWhenTauZero) {
  const auto d = zipf(4, 0);
  for (double v : d.p) EXPECT_DOUBLE_EQ(v, 0.25);
}

TEST(Zipf, HarmonicWeights) {
  const auto d = zipf(4, 1);
  const double want[] = {12.0 / 25, 6.0 / 25, 4.0 / 25, 3.0 / 25};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(d.p[i], want[i], 1e-15);
}

TEST(Zipf, NormalisedAndNonIncreasing) {
  for (double tau : {0.3, 1.0, 2.5})
    for (int L : {1, 7, 500}) {
      const auto d = zipf(L, tau);
      EXPECT_NEAR(std::accumulate(d.p.begin(), d.p.end(), 0.0), 1.0, 1e-12);
      EXPECT_TRUE(std::is_sorted(d.p.rbegin(), d.p.rend()));
    }
}

TEST(Zipf, RejectsBadArguments) {
  EXPECT_EQ(code_of([] { zipf(0, 1); }), Errc::invalid_argument);
  EXPECT_EQ(code_of([] { zipf(3, -0.1); }), Errc::invalid_argument);
  EXPECT_EQ(code_of([] { make_popularity({0.5, 0.4}); }), Errc::invalid_argument);
}

TEST(CacheModeRule, ThresholdIsExactlyOneHalf) {
  EXPECT_EQ(mode_of(0.5), CacheMode::comp);
  EXPECT_EQ(mode_of(std::nextafter(0.5, 0.0)), CacheMode::multihop);
  EXPECT_EQ(mode_of(1.0), CacheMode::comp);
}

TEST(Bipartition, EightNodeLayout) {
  const auto bp = partition_nodes(eight_node_layout());
  EXPECT_EQ(bp.members(1), (std::vector<NodeId>{0, 2, 5, 7}));
  EXPECT_EQ(bp.members(2), (std::vector<NodeId>{1, 3, 4, 6}));
}

TEST(Bipartition, TwoNodeLine) {
  const auto p = make_custom_placement({{0.5, 0.5}, {1.5, 0.5}}, 2, 1, 1, 1, 1);
  const auto bp = partition_nodes(p);
  EXPECT_EQ(bp.layer, (std::vector<int>{1, 2}));
}

TEST(Bipartition, GridIsCheckerboard) {
  const auto p = make_regular_grid(4, 100);
  const auto bp = partition_nodes(p, 100.5);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) EXPECT_EQ(bp.layer[r * 4 + c], (r + c) % 2 ? 2 : 1);
}

TEST(Bipartition, ProperColouringOnBipartiteGraph) {
  const auto p = make_regular_grid(9, 100);
  const auto bp = partition_nodes(p, 100.5);
  for (NodeId i = 0; i < p.size(); ++i)
    for (NodeId j = i + 1; j < p.size(); ++j)
      if (p.distance(i, j) <= 100.5) EXPECT_NE(bp.layer[i], bp.layer[j]);
}

TEST(Bipartition, DisconnectedGraphDetected) {
  const auto p = make_custom_placement({{1, 1}, {9, 9}}, 10, 10, 5, 1, 10);
  EXPECT_EQ(code_of([&] { partition_nodes(p, 2.0); }), Errc::disconnected_graph);
}

TEST(Encode, TwentyFiveMultihopBlocks) {
  const auto seg = random_bytes(125000, 1);  // 1 Mbit
  const auto blocks = encode_segment(seg, 0.12, CacheMode::multihop, 25, 7);
  ASSERT_EQ(blocks.size(), 25u);
  for (int b = 0; b < 25; ++b) {
    EXPECT_EQ(blocks[b].block_index, b);
    EXPECT_DOUBLE_EQ(blocks[b].length_bits, 120000.0);
    EXPECT_EQ(blocks[b].n_symbols(), 8);  // ceil(0.12 * 64)
  }
}

TEST(Encode, FullRateBlockDecodesAlone) {
  const auto seg = random_bytes(4096, 2);
  const auto blocks = encode_segment(seg, 1.0, CacheMode::multihop, 3, 5, 32);
  for (const auto& b : blocks)
    EXPECT_EQ(decode_segment({{&b, b.n_symbols()}}, 32, seg.size()), seg);
}

TEST(Encode, CompLayerBlocks) {
  const int k = 40;
  const auto seg = random_bytes(8000, 3);
  const auto blocks = encode_segment(seg, 0.6, CacheMode::comp, 0, 11, k);
  ASSERT_EQ(blocks.size(), 2u);
  EXPECT_EQ(blocks[0].block_index, 1);
  EXPECT_EQ(blocks[1].block_index, 2);
  for (const auto& b : blocks) {
    EXPECT_DOUBLE_EQ(b.length_bits, 0.6 * 64000);
    EXPECT_EQ(b.n_symbols(), 24);
  }
  // Either layer plus the head of the other decodes without top-up.
  EXPECT_EQ(decode_segment({{&blocks[0], 24}, {&blocks[1], 16}}, k, seg.size()), seg);
  EXPECT_EQ(decode_segment({{&blocks[1], 24}, {&blocks[0], 16}}, k, seg.size()), seg);
}

TEST(Encode, CompModeNeedsHalf) {
  const auto seg = random_bytes(1000, 4);
  EXPECT_EQ(code_of([&] { encode_segment(seg, 0.4, CacheMode::comp, 0, 1); }),
            Errc::domain_error);
}

TEST(Encode, BlockTooSmall) {
  const auto seg = random_bytes(10, 5);
  EXPECT_EQ(code_of([&] { encode_segment(seg, 0.05, CacheMode::multihop, 2, 1, 4); }),
            Errc::block_too_small);
}

TEST(Encode, Reproducible) {
  const auto seg = random_bytes(2048, 6);
  const auto a = encode_segment(seg, 0.25, CacheMode::multihop, 4, 9, 16);
  const auto b = encode_segment(seg, 0.25, CacheMode::multihop, 4, 9, 16);
  for (int i = 0; i < 4; ++i)
    for (int t = 0; t < a[i].n_symbols(); ++t) {
      EXPECT_EQ(a[i].symbols[t].coeffs, b[i].symbols[t].coeffs);
      EXPECT_EQ(a[i].symbols[t].payload, b[i].symbols[t].payload);
    }
}

TEST(Decode, LocalPlusReceivedShares) {
  const int k = 50;  // 0.12 of a segment is exactly six symbols
  const auto seg = random_bytes(50 * 160, 7);
  const auto blocks = encode_segment(seg, 0.12, CacheMode::multihop, 9, 13, k);
  std::vector<Fragment> frags{{&blocks[0], 6}};
  int got = 6;
  for (int b = 1; b < 9 && got < k; ++b) {
    const int take = std::min(6, k - got);
    frags.push_back({&blocks[b], take});
    got += take;
  }
  ASSERT_EQ(got, k);
  int top = 0;
  EXPECT_EQ(decode_with_top_up(frags, k, seg.size(), &top), seg);
  EXPECT_LE(top, 1);
}

TEST(Decode, BelowSegmentLengthFails) {
  const int k = 100;
  const auto seg = random_bytes(3000, 8);
  const auto blocks = encode_segment(seg, 0.33, CacheMode::multihop, 3, 1, k);
  std::vector<Fragment> frags{{&blocks[0], 34}, {&blocks[1], 34}, {&blocks[2], 31}};
  EXPECT_EQ(code_of([&] { decode_segment(frags, k, seg.size()); }),
            Errc::insufficient_bits);
}

TEST(Decode, RandomSubsetsAtOrAboveSegmentLength) {
  const int k = 32;
  Rng g(99);
  int decoded = 0, top_ups = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto seg = random_bytes(512 + trial, 1000 + trial);
    const auto blocks = encode_segment(seg, 0.15, CacheMode::multihop, 25, trial, k);
    std::vector<int> idx(25);
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = 24; i > 0; --i) std::swap(idx[i], idx[uniform_index(g, i + 1)]);
    std::vector<Fragment> frags;
    int total = 0;
    for (int i = 0; i < 10; ++i) {
      const int want = 1 + static_cast<int>(uniform_index(g, blocks[idx[i]].n_symbols()));
      frags.push_back({&blocks[idx[i]], want});
      total += want;
    }
    // Fill up to the segment length from the chosen blocks.
    for (auto& f : frags)
      while (total < k && f.symbols < f.block->n_symbols()) ++f.symbols, ++total;
    ASSERT_GE(total, k);
    if (decode_with_top_up(frags, k, seg.size(), &top_ups) == seg) ++decoded;
  }
  EXPECT_EQ(decoded, 100);
  EXPECT_LE(top_ups, 5);
}

TEST(Decode, AnyShortfallFails) {
  const int k = 16;
  const auto seg = random_bytes(256, 10);
  const auto blocks = encode_segment(seg, 0.5, CacheMode::multihop, 4, 3, k);
  for (int total = 1; total < k; ++total) {
    std::vector<Fragment> frags;
    int left = total;
    for (const auto& b : blocks) {
      const int take = std::min(left, b.n_symbols());
      if (take > 0) frags.push_back({&b, take});
      left -= take;
    }
    EXPECT_EQ(code_of([&] { decode_segment(frags, k, seg.size()); }),
              Errc::insufficient_bits);
  }
}

class Layout : public ::testing::Test {
 protected:
  NodePlacement pl = eight_node_layout();
  Bipartition bp = partition_nodes(pl);
  SystemParams sp = [] {
    SystemParams s;
    s.F = 2e6;
    s.B_C = 1.8e6;
    s.L_S = 5e5;
    return s;
  }();
};

TEST_F(Layout, TwoFileScenario) {
  const auto lay = build_cache_layout(pl, bp, {0.6, 0.3}, make_popularity({0.7, 0.3}), sp);
  EXPECT_EQ(lay.mode_of_file[0], CacheMode::comp);
  EXPECT_EQ(lay.mode_of_file[1], CacheMode::multihop);
  for (NodeId n = 0; n < pl.size(); ++n) {
    EXPECT_NEAR(lay.stored_bits(n), 1.8e6, 1e-6);
    ASSERT_EQ(lay.blocks_of_node[n].size(), 2u);
    EXPECT_EQ(lay.blocks_of_node[n][0].block_index, bp.layer[n]);
    EXPECT_EQ(lay.blocks_of_node[n][1].block_index, n);
    EXPECT_EQ(lay.blocks_of_node[n][0].segments, 4);
    EXPECT_DOUBLE_EQ(lay.blocks_of_node[n][1].bits_per_segment, 0.3 * 5e5);
  }
}

TEST_F(Layout, ZeroReplicationLeavesCachesEmpty) {
  const auto lay = build_cache_layout(pl, bp, {0, 0}, make_popularity({0.5, 0.5}), sp);
  for (NodeId n = 0; n < pl.size(); ++n) EXPECT_TRUE(lay.blocks_of_node[n].empty());
}

TEST_F(Layout, OverBudgetRejected) {
  EXPECT_EQ(code_of([&] {
              build_cache_layout(pl, bp, {0.7, 0.3}, make_popularity({0.5, 0.5}), sp);
            }),
            Errc::cache_overflow);
}

TEST_F(Layout, RandomReplicationWithinBudget) {
  Rng g(4);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> q(5);
    for (auto& v : q) v = uniform01(g);
    const double s = std::accumulate(q.begin(), q.end(), 0.0);
    const double scale = uniform(g, 0.1, 1.0) * sp.budget() / s;
    for (auto& v : q) v = std::min(1.0, v * scale);
    const auto lay = build_cache_layout(pl, bp, q, zipf(5, 1), sp);
    for (NodeId n = 0; n < pl.size(); ++n) {
      EXPECT_LE(lay.stored_bits(n), sp.B_C * (1 + 1e-12));
      for (int l = 0; l < 5; ++l) EXPECT_EQ(lay.mode_of_file[l] == CacheMode::comp, q[l] >= 0.5);
    }
  }
}

TEST_F(Layout, LengthMismatchRejected) {
  EXPECT_EQ(code_of([&] { build_cache_layout(pl, bp, {0.1}, zipf(2, 1), sp); }),
            Errc::invalid_argument);
}

}  // namespace
}  // namespace phycache
