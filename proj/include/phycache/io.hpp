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

// JSON views of the library types. Every document carries
// "schema_version"; numbers that are not finite are written as null.

#ifndef PHYCACHE_IO_HPP_
#define PHYCACHE_IO_HPP_

#include <cmath>
#include <fstream>
#include <string>

#include "json.hpp"
#include "phycache/channel.hpp"
#include "phycache/coding.hpp"
#include "phycache/delivery.hpp"
#include "phycache/experiments.hpp"
#include "phycache/freqplan.hpp"
#include "phycache/replication.hpp"
#include "phycache/throughput.hpp"
#include "phycache/topology.hpp"

namespace phycache::io {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

inline Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json document(const char* kind) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["document"] = kind;
  return j;
}

inline Json to_json(const NodePlacement& p) {
  Json j = document("placement");
  j["kind"] = placement_kind_name(p.kind());
  j["r_0"] = p.r_0();
  j["r_min"] = p.r_min();
  j["r_max"] = p.r_max();
  j["area_side"] = p.area_side();
  j["torus"] = p.torus();
  Json pos = Json::array();
  for (const auto& x : p.positions()) pos.push_back({x.x, x.y});
  j["positions"] = std::move(pos);
  return j;
}

inline Json to_json(const InterferenceConstants& c) {
  Json j = document("constants");
  j["I_R"] = num(c.I_R);
  j["G_C"] = num(c.G_C);
  j["rho"] = num(c.rho);
  j["I_A"] = num(c.I_A);
  j["truncation_radius"] = c.truncation_radius;
  j["tail_bounds"] = {{"I_R", num(c.tail_bound_I_R)},
                      {"G_C", num(c.tail_bound_G_C)}};
  return j;
}

inline Json to_json(const FrequencyPlan& p) {
  Json j = document("frequency_plan");
  j["W_b"] = p.W_b;
  j["W_c"] = p.W_c;
  j["M"] = p.M;
  j["subband_of_node"] = p.subband_of_node;
  j["power_multihop"] = p.power_multihop;
  j["power_comp"] = p.power_comp;
  return j;
}

inline Json to_json(const CacheLayout& l) {
  Json j = document("cache_layout");
  j["L_S"] = l.L_S;
  j["F"] = l.F;
  j["q"] = l.q;
  j["layer_of_node"] = l.layer_of_node;
  Json modes = Json::array();
  for (auto m : l.mode_of_file) modes.push_back(cache_mode_name(m));
  j["mode_of_file"] = std::move(modes);
  Json nodes = Json::array();
  for (const auto& blocks : l.blocks_of_node) {
    Json b = Json::array();
    for (const auto& d : blocks)
      b.push_back({{"file", d.file},
                   {"block_index", d.block_index},
                   {"mode", cache_mode_name(d.mode)},
                   {"bits_per_segment", d.bits_per_segment},
                   {"segments", d.segments}});
    nodes.push_back(std::move(b));
  }
  j["blocks_of_node"] = std::move(nodes);
  return j;
}

inline Json to_json(const SourceSet& s) {
  Json j;
  j["requester"] = s.requester;
  j["file"] = s.file;
  j["q"] = s.q;
  j["r_star"] = s.r_star;
  j["B_n"] = s.B_n;
  j["B_bar_n"] = s.B_bar_n;
  Json sh = Json::array();
  for (const auto& x : s.shares) sh.push_back({{"node", x.node}, {"bits", x.bits}});
  j["bits_per_segment_from"] = std::move(sh);
  return j;
}

inline Json to_json(const ControlTrace& t) {
  Json j = document("message_trace");
  j["counts"] = {{"REQ", t.count[0]},
                 {"ACK", t.count[1]},
                 {"REQm", t.count[2]},
                 {"COMP_REG", t.count[3]}};
  j["radius_violations"] = t.radius_violations;
  j["out_of_scope_relays"] = t.out_of_scope_relays;
  j["unreached_sources"] = t.unreached_sources;
  Json msgs = Json::array();
  for (const auto& m : t.messages) {
    Json x = {{"seq", m.seq},
              {"type", message_type_name(m.type)},
              {"from", m.from},
              {"to", m.to},
              {"requester", m.requester},
              {"file", m.file}};
    if (m.type == MessageType::reqm) {
      x["bits"] = m.bits;
      x["path"] = m.path;
    }
    if (m.cluster >= 0) x["cluster"] = m.cluster;
    msgs.push_back(std::move(x));
  }
  j["messages"] = std::move(msgs);
  Json ss = Json::array();
  for (const auto& s : t.source_sets) ss.push_back(to_json(s));
  j["source_sets"] = std::move(ss);
  return j;
}

inline Json to_json(const LinkLoadMap& m) {
  Json j = document("link_loads");
  const auto top = m.max_undirected();
  j["max_undirected"] = {{"a", top.from}, {"b", top.to}, {"load", top.load}};
  j["max_relay_load"] = m.max_relay_load();
  Json links = Json::array();
  for (const auto& l : m.links())
    links.push_back({{"from", l.from}, {"to", l.to}, {"load", l.load}});
  j["links"] = std::move(links);
  Json relay = Json::array();
  for (NodeId n = 0; n < m.size(); ++n) relay.push_back(m.relay_load(n));
  j["relay_load"] = std::move(relay);
  return j;
}

inline Json to_json(const CompClustering& c) {
  Json j = document("comp_clustering");
  Json cl = Json::array();
  for (size_t i = 0; i < c.clusters.size(); ++i)
    cl.push_back({{"id", i},
                  {"layer", c.clusters[i].layer},
                  {"members", c.clusters[i].members},
                  {"rx", c.rx_set(static_cast<int>(i))}});
  j["clusters"] = std::move(cl);
  return j;
}

inline Json to_json(const ThroughputReport& r) {
  Json j = document("throughput_report");
  j["gamma_B"] = num(r.gamma_B);
  j["gamma_A"] = num(r.gamma_A);
  j["gamma_A_L"] = num(r.gamma_A_lower);
  j["gamma_A_U"] = num(r.gamma_A_upper);
  j["W_c_star"] = num(r.W_c_star);
  j["residual"] = num(r.residual);
  j["delta_gamma_L"] = num(r.delta_gamma_lower);
  j["delta_gamma_U"] = num(r.delta_gamma_upper);
  j["delta_gamma_bar"] = r.delta_gamma_highsnr ? num(*r.delta_gamma_highsnr) : Json(nullptr);
  j["gamma_A_limit"] = r.gamma_A_limit ? num(*r.gamma_A_limit) : Json(nullptr);
  j["Q_multihop"] = r.Q_multihop;
  j["Q_comp"] = r.Q_comp;
  j["R_b"] = num(r.R_b);
  j["R_m"] = num(r.R_m);
  j["R_c"] = num(r.R_c);
  j["rc_source"] = rc_source_name(r.rc_source);
  if (r.general)
    j["general"] = {{"rate", num(r.general->rate)},
                    {"M", r.general->M},
                    {"I_A", num(r.general->I_A)},
                    {"C_B", num(r.general->C_B)}};
  return j;
}

inline Json to_json(const SweepTable& t) {
  Json j = document("sweep");
  j["axis"] = axis_name(t.config.axis);
  j["config"] = serialize_config(t.config);
  Json rows = Json::array();
  for (const auto& r : t.rows) {
    Json x = {{"param", num(r.param)},
              {"gamma_B", num(r.gamma_B)},
              {"gamma_A", num(r.gamma_A)},
              {"gamma_A_L", num(r.gamma_A_L)},
              {"gamma_A_U", num(r.gamma_A_U)},
              {"W_c_star", num(r.W_c_star)},
              {"delta_gamma_bar", num(r.delta_gamma_bar)},
              {"rc_source", rc_source_name(r.rc_source)},
              {"gamma_classical", num(r.gamma_classical)},
              {"gamma_B_sim", num(r.gamma_B_sim)},
              {"comp_files", r.comp_files}};
    if (!r.error.empty()) x["error"] = r.error;
    rows.push_back(std::move(x));
  }
  j["rows"] = std::move(rows);
  return j;
}

inline Json to_json(const DeliveryReport& r) {
  Json j = document("delivery_report");
  j["decode_failures"] = r.decode_failures;
  j["radius_violations"] = r.radius_violations;
  j["top_up_symbols"] = r.top_up_symbols;
  j["segments_verified"] = r.segments_verified;
  j["link_rate"] = r.link_rate;
  j["comp_rate"] = r.comp_rate;
  return j;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(Errc::invalid_argument, "cannot write '" + path + "'");
  f << text;
}

inline void write_json(const std::string& path, const Json& j) {
  write_text(path, j.dump(2) + "\n");
}

}  // namespace phycache::io

#endif  // PHYCACHE_IO_HPP_
