// SPDX-License-Identifier: Apache-2.0
//
// cfran-sim: system-level simulator for EDU-partitioned cell-free massive MIMO
// Copyright (C) 2026 The cfran-sim authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "cfran/scenario.hpp"

#include "cfran/deployment.hpp"
#include "cfran/rng.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cfran {

namespace {

struct SchemeInfo {
  Scheme scheme;
  std::string_view tag;
  Processing processing;
  bool mmse;
  bool dcc;
};

constexpr SchemeInfo kSchemes[] = {
    {Scheme::joint_mmse, "joint-mmse", Processing::centralized, true, false},
    {Scheme::joint_mrc, "joint-mrc", Processing::centralized, false, false},
    {Scheme::l_mmse, "l-mmse", Processing::local, true, false},
    {Scheme::p_mmse, "p-mmse", Processing::centralized, true, true},
    {Scheme::lp_mmse, "lp-mmse", Processing::local, true, true},
    {Scheme::lp_mrc, "lp-mrc", Processing::local, false, true},
    {Scheme::edu_mmse, "edu-mmse", Processing::edu, true, false},
    {Scheme::edu_pmmse, "edu-pmmse", Processing::edu, true, true},
};

const SchemeInfo& info(Scheme s) {
  for (const auto& i : kSchemes)
    if (i.scheme == s) return i;
  throw Error("unknown scheme");
}

} // namespace

const std::vector<Scheme>& all_schemes() {
  static const std::vector<Scheme> v = [] {
    std::vector<Scheme> out;
    for (const auto& i : kSchemes) out.push_back(i.scheme);
    return out;
  }();
  return v;
}

std::string_view to_string(Scheme s) { return info(s).tag; }

std::optional<Scheme> parse_scheme(std::string_view tag) {
  for (const auto& i : kSchemes)
    if (i.tag == tag) return i.scheme;
  return std::nullopt;
}

std::vector<Scheme> parse_scheme_list(std::string_view list) {
  std::vector<Scheme> out;
  std::size_t pos = 0;
  while (pos <= list.size()) {
    const auto comma = std::min(list.find(',', pos), list.size());
    auto tag = list.substr(pos, comma - pos);
    while (!tag.empty() && tag.front() == ' ') tag.remove_prefix(1);
    while (!tag.empty() && tag.back() == ' ') tag.remove_suffix(1);
    if (!tag.empty()) {
      const auto s = parse_scheme(tag);
      if (!s) {
        std::ostringstream msg;
        msg << "unknown scheme '" << tag << "'; valid tags:";
        for (const auto& i : kSchemes) msg << ' ' << i.tag;
        throw Error(msg.str());
      }
      if (std::find(out.begin(), out.end(), *s) == out.end()) out.push_back(*s);
    }
    pos = comma + 1;
  }
  if (out.empty()) throw Error("empty scheme list");
  return out;
}

Processing processing_of(Scheme s) { return info(s).processing; }
bool is_mmse(Scheme s) { return info(s).mmse; }
bool uses_dcc(Scheme s) { return info(s).dcc; }

double ScenarioConfig::noise_power_mw() const {
  return std::pow(10.0, (noise_psd_dbm_hz + 10.0 * std::log10(bandwidth_hz)) / 10.0);
}

std::vector<std::string> validate_config(const ScenarioConfig& c) {
  std::vector<std::string> errors;
  auto check = [&](bool ok, const std::string& msg) {
    if (!ok) errors.push_back(msg);
  };
  check(c.area_side_m > 0, "area_side_m must be positive");
  check(c.num_oru >= 1, "num_oru must be >= 1");
  check(c.antennas_per_oru >= 1, "antennas_per_oru must be >= 1");
  check(c.num_ue >= 1, "num_ue must be >= 1");
  check(c.num_edu >= 1, "num_edu must be >= 1");
  check(c.num_edu <= c.num_oru, "num_edu must not exceed num_oru (L >= M)");
  check(c.num_ue <= c.pilot_count,
        "pilot shortage: num_ue exceeds pilot_count (orthogonal pilots required)");
  check(c.carrier_hz > 0, "carrier_hz must be positive");
  check(c.bandwidth_hz > 0, "bandwidth_hz must be positive");
  check(std::isfinite(c.noise_psd_dbm_hz), "noise_psd_dbm_hz must be finite");
  check(c.ul_power_mw > 0, "ul_power_mw must be positive");
  check(c.dl_pmax_mw > 0, "dl_pmax_mw must be positive");
  check(c.pathloss_exponent > 0, "pathloss_exponent must be positive");
  check(c.shadow_sigma_db >= 0, "shadow_sigma_db must be non-negative");
  check(c.asd_azimuth_deg >= 0 && c.asd_elevation_deg >= 0, "angular spreads must be non-negative");
  check(c.antenna_height_m >= 0, "antenna_height_m must be non-negative");
  check(c.pilot_count >= 1, "pilot_count must be >= 1");
  check(!c.quantizer_bits || *c.quantizer_bits >= 1, "quantizer_bits must be >= 1 or infinite");
  check(c.fronthaul_ue_cap >= 0, "fronthaul_ue_cap must be non-negative");
  check(c.mc_drops >= 1, "mc_drops must be >= 1");
  check(c.mc_realizations >= 1, "mc_realizations must be >= 1");
  check(!c.schemes.empty(), "schemes must not be empty");
  return errors;
}

void to_json(nlohmann::json& j, const ScenarioConfig& c) {
  std::vector<std::string> schemes;
  for (auto s : c.schemes) schemes.emplace_back(to_string(s));
  j = nlohmann::json{
      {"area_side_m", c.area_side_m},
      {"num_oru", c.num_oru},
      {"antennas_per_oru", c.antennas_per_oru},
      {"num_ue", c.num_ue},
      {"num_edu", c.num_edu},
      {"carrier_hz", c.carrier_hz},
      {"bandwidth_hz", c.bandwidth_hz},
      {"noise_psd_dbm_hz", c.noise_psd_dbm_hz},
      {"ul_power_mw", c.ul_power_mw},
      {"dl_pmax_mw", c.dl_pmax_mw},
      {"pathloss_model", c.pathloss_model == PathlossModel::urban_2ghz ? "urban-2ghz" : "power-law"},
      {"pathloss_exponent", c.pathloss_exponent},
      {"shadow_sigma_db", c.shadow_sigma_db},
      {"asd_azimuth_deg", c.asd_azimuth_deg},
      {"asd_elevation_deg", c.asd_elevation_deg},
      {"antenna_height_m", c.antenna_height_m},
      {"pilot_count", c.pilot_count},
      {"fronthaul_ue_cap", c.fronthaul_ue_cap},
      {"mc_drops", c.mc_drops},
      {"mc_realizations", c.mc_realizations},
      {"master_seed", c.master_seed},
      {"schemes", schemes},
  };
  if (c.quantizer_bits)
    j["quantizer_bits"] = *c.quantizer_bits;
  else
    j["quantizer_bits"] = "infinite";
}

void from_json(const nlohmann::json& j, ScenarioConfig& c) {
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  get("area_side_m", c.area_side_m);
  get("num_oru", c.num_oru);
  get("antennas_per_oru", c.antennas_per_oru);
  get("num_ue", c.num_ue);
  get("num_edu", c.num_edu);
  get("carrier_hz", c.carrier_hz);
  get("bandwidth_hz", c.bandwidth_hz);
  get("noise_psd_dbm_hz", c.noise_psd_dbm_hz);
  get("ul_power_mw", c.ul_power_mw);
  get("dl_pmax_mw", c.dl_pmax_mw);
  get("pathloss_exponent", c.pathloss_exponent);
  get("shadow_sigma_db", c.shadow_sigma_db);
  get("asd_azimuth_deg", c.asd_azimuth_deg);
  get("asd_elevation_deg", c.asd_elevation_deg);
  get("antenna_height_m", c.antenna_height_m);
  get("pilot_count", c.pilot_count);
  get("fronthaul_ue_cap", c.fronthaul_ue_cap);
  get("mc_drops", c.mc_drops);
  get("mc_realizations", c.mc_realizations);
  get("master_seed", c.master_seed);
  if (j.contains("pathloss_model")) {
    const auto m = j.at("pathloss_model").get<std::string>();
    if (m == "urban-2ghz")
      c.pathloss_model = PathlossModel::urban_2ghz;
    else if (m == "power-law")
      c.pathloss_model = PathlossModel::power_law;
    else
      throw Error("pathloss_model must be 'urban-2ghz' or 'power-law', got '" + m + "'");
  }
  if (j.contains("quantizer_bits")) {
    const auto& q = j.at("quantizer_bits");
    if (q.is_string()) {
      if (q.get<std::string>() != "infinite")
        throw Error("quantizer_bits must be an integer or \"infinite\"");
      c.quantizer_bits.reset();
    } else {
      c.quantizer_bits = q.get<int>();
    }
  }
  if (j.contains("schemes")) {
    const auto& s = j.at("schemes");
    if (s.is_string()) {
      c.schemes = parse_scheme_list(s.get<std::string>());
    } else {
      std::string joined;
      for (const auto& tag : s) joined += tag.get<std::string>() + ",";
      c.schemes = parse_scheme_list(joined);
    }
  }
}

std::optional<std::pair<int, int>> grid_shape(int num_oru) {
  if (num_oru < 1) return std::nullopt;
  int rows = static_cast<int>(std::floor(std::sqrt(static_cast<double>(num_oru))));
  while (rows > 1 && num_oru % rows != 0) --rows;
  const int cols = num_oru / rows;
  if (cols > 2 * rows) return std::nullopt;
  return std::make_pair(rows, cols);
}

std::vector<Point3> place_orus(const ScenarioConfig& config, std::uint64_t drop_index,
                               bool* random_fallback) {
  const double side = config.area_side_m;
  const double h = config.antenna_height_m;
  std::vector<Point3> out;
  out.reserve(static_cast<std::size_t>(config.num_oru));
  if (const auto shape = grid_shape(config.num_oru)) {
    const auto [rows, cols] = *shape;
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c)
        out.emplace_back((c + 0.5) * side / cols, (r + 0.5) * side / rows, h);
    if (random_fallback) *random_fallback = false;
    return out;
  }
  auto rng = make_rng(config.master_seed, drop_index, Stream::oru_positions);
  std::uniform_real_distribution<double> u(0.0, side);
  for (int l = 0; l < config.num_oru; ++l) {
    const double x = u(rng);
    const double y = u(rng);
    out.emplace_back(x, y, h);
  }
  if (random_fallback) *random_fallback = true;
  return out;
}

void update_distances(Topology& topo) {
  const int K = topo.num_ue();
  const int L = topo.num_oru();
  topo.ue_oru_distance.resize(K, L);
  for (int k = 0; k < K; ++k)
    for (int l = 0; l < L; ++l)
      topo.ue_oru_distance(k, l) = (topo.ue_positions[k] - topo.oru_positions[l]).norm();
  topo.oru_distance.resize(L, L);
  for (int p = 0; p < L; ++p)
    for (int q = 0; q < L; ++q)
      topo.oru_distance(p, q) = (topo.oru_positions[p] - topo.oru_positions[q]).norm();
}

Topology build_topology(const ScenarioConfig& config, std::uint64_t drop_index) {
  if (const auto errors = validate_config(config); !errors.empty())
    throw Error("invalid scenario config: " + errors.front());
  Topology topo;
  topo.oru_positions = place_orus(config, drop_index, &topo.random_oru_placement);

  auto rng = make_rng(config.master_seed, drop_index, Stream::ue_positions);
  std::uniform_real_distribution<double> u(0.0, config.area_side_m);
  topo.ue_positions.reserve(static_cast<std::size_t>(config.num_ue));
  for (int k = 0; k < config.num_ue; ++k) {
    const double x = u(rng);
    const double y = u(rng);
    topo.ue_positions.emplace_back(x, y, 0.0);
  }
  update_distances(topo);

  // A grid layout is the same in every drop, and so is its partition.
  const std::uint64_t layout_drop = topo.random_oru_placement ? drop_index : 0;
  auto cluster_rng = make_rng(config.master_seed, layout_drop, Stream::clustering);
  topo.edu_partition = clustered_baseline(topo.oru_positions, config.num_edu, cluster_rng).genome;
  return topo;
}

} // namespace cfran
