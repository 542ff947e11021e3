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

#ifndef PHYCACHE_ERROR_HPP_
#define PHYCACHE_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace phycache {

enum class Errc {
  degenerate_distance,
  divergent_sum,
  invalid_reuse_distance,
  invalid_bandwidth_split,
  domain_error,
  infeasible,
  infinite_throughput,
  not_applicable,
  generation_failed,
  disconnected_graph,
  block_too_small,
  insufficient_bits,
  rank_deficient,
  cache_overflow,
  wrong_placement_kind,
  insufficient_replicas,
  layer_too_small,
  decode_failure,
  invalid_argument,
  parse_error,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::degenerate_distance: return "DegenerateDistance";
    case Errc::divergent_sum: return "DivergentSum";
    case Errc::invalid_reuse_distance: return "InvalidReuseDistance";
    case Errc::invalid_bandwidth_split: return "InvalidBandwidthSplit";
    case Errc::domain_error: return "DomainError";
    case Errc::infeasible: return "Infeasible";
    case Errc::infinite_throughput: return "InfiniteThroughput";
    case Errc::not_applicable: return "NotApplicable";
    case Errc::generation_failed: return "GenerationFailed";
    case Errc::disconnected_graph: return "DisconnectedGraph";
    case Errc::block_too_small: return "BlockTooSmall";
    case Errc::insufficient_bits: return "InsufficientBits";
    case Errc::rank_deficient: return "RankDeficient";
    case Errc::cache_overflow: return "CacheOverflow";
    case Errc::wrong_placement_kind: return "WrongPlacementKind";
    case Errc::insufficient_replicas: return "InsufficientReplicas";
    case Errc::layer_too_small: return "LayerTooSmall";
    case Errc::decode_failure: return "DecodeFailure";
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::parse_error: return "ParseError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace phycache

#endif  // PHYCACHE_ERROR_HPP_
