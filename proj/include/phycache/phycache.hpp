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

#ifndef PHYCACHE_PHYCACHE_HPP_
#define PHYCACHE_PHYCACHE_HPP_

#include "phycache/channel.hpp"
#include "phycache/coding.hpp"
#include "phycache/delivery.hpp"
#include "phycache/error.hpp"
#include "phycache/experiments.hpp"
#include "phycache/freqplan.hpp"
#include "phycache/gf256.hpp"
#include "phycache/io.hpp"
#include "phycache/lattice.hpp"
#include "phycache/random.hpp"
#include "phycache/replication.hpp"
#include "phycache/throughput.hpp"
#include "phycache/topology.hpp"

#endif  // PHYCACHE_PHYCACHE_HPP_
