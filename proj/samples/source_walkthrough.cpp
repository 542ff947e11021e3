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

// A 5x5 grid where every node caches 12% of one file. The centre node
// collects the rest from its eight nearest neighbours and decodes.

#include <cstdio>

#include "phycache/phycache.hpp"

using namespace phycache;

int main() {
  const auto pl = make_regular_grid(5, 100.0);
  const auto vor = voronoi(pl);
  const Router router(vor);
  const double q = 0.12;
  const double L_S = 8.0 * 4096;  // 4 KiB segments
  const NodeId me = 12;

  const auto src = select_sources(pl, me, 0, q, L_S);
  std::printf("requester %d, r* = %.1f m, bound %.1f m\n", me, src.r_star,
              source_radius_bound(q, pl.r_max()));
  for (const auto& s : src.shares) {
    const auto path = router(s.node, me);
    std::printf("  node %2d  %-8s %.3f L_S  %d hop%s\n", s.node,
                s.inner ? "inner" : "boundary", s.bits / L_S, path.hops(),
                path.hops() == 1 ? "" : "s");
  }
  std::printf("received %.2f L_S, local %.2f L_S\n", src.bits_from_others() / L_S,
              src.local_bits() / L_S);

  ContentStore store(2026, L_S, 64);
  const auto& cp = store.code();
  SegmentDecoder dec(cp.k, cp.symbol_bytes());
  for (const auto& s : store.multihop_block(0, 0, q, me).symbols) dec.add(s);
  for (const auto& s : src.shares) {
    const int take = static_cast<int>(std::ceil(s.bits / L_S * cp.k - 1e-9));
    const auto& blk = store.multihop_block(0, 0, q, s.node);
    for (int t = 0; t < take && t < blk.n_symbols(); ++t) dec.add(blk.symbols[t]);
  }
  std::printf("rank %d of %d after %d symbols\n", dec.rank(), cp.k, dec.received());
  if (!dec.complete()) return 1;
  auto bytes = dec.solve();
  bytes.resize(cp.segment_bytes);
  const bool ok = bytes == store.segment(0, 0);
  std::printf("decoded segment %s\n", ok ? "matches" : "DIFFERS");
  return ok ? 0 : 1;
}
