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

#ifndef CFRAN_SCENARIO_HPP
#define CFRAN_SCENARIO_HPP

#include "cfran/types.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cfran {

/// Transceiver schemes. Tags are the lowercase hyphenated abbreviations.
enum class Scheme {
  joint_mmse,
  joint_mrc,
  l_mmse,
  p_mmse,
  lp_mmse,
  lp_mrc,
  edu_mmse,
  edu_pmmse,
};

/// Where the combining/precoding vectors are computed.
enum class Processing { centralized, local, edu };

const std::vector<Scheme>& all_schemes();
std::string_view to_string(Scheme s);
std::optional<Scheme> parse_scheme(std::string_view tag);
/// Comma-separated tag list; throws Error listing the valid tags on a bad entry.
std::vector<Scheme> parse_scheme_list(std::string_view list);

Processing processing_of(Scheme s);
bool is_mmse(Scheme s);
/// True for the schemes that use the dynamic (partial) association.
bool uses_dcc(Scheme s);

enum class PathlossModel {
  urban_2ghz, // -30.5 - 36.7 log10(d) dB
  power_law,  // d^-exponent
};

struct ScenarioConfig {
  double area_side_m = 200.0;
  int num_oru = 100;
  int antennas_per_oru = 4;
  int num_ue = 24;
  int num_edu = 8;
  double carrier_hz = 2e9;
  double bandwidth_hz = 20e6;
  double noise_psd_dbm_hz = -174.0;
  double ul_power_mw = 200.0;
  // Not given by the reference parameter table; 200 mW per O-RU.
  double dl_pmax_mw = 200.0;
  PathlossModel pathloss_model = PathlossModel::urban_2ghz;
  double pathloss_exponent = 3.67;
  double shadow_sigma_db = 4.0;
  double asd_azimuth_deg = 15.0;
  double asd_elevation_deg = 15.0;
  double antenna_height_m = 10.0;
  int pilot_count = 24;
  std::optional<int> quantizer_bits; // nullopt = infinite resolution
  int fronthaul_ue_cap = 24;
  int mc_drops = 50;
  int mc_realizations = 100;
  std::uint64_t master_seed = 1;
  std::vector<Scheme> schemes = all_schemes();

  /// Receiver noise power N0 * B in mW (used for both links).
  double noise_power_mw() const;
  int total_antennas() const { return num_oru * antennas_per_oru; }
};

/// Every violated invariant, one message each. Empty means valid.
std::vector<std::string> validate_config(const ScenarioConfig& config);

void to_json(nlohmann::json& j, const ScenarioConfig& c);
/// Reads the known fields, keeping defaults for absent ones. Unknown keys are ignored.
void from_json(const nlohmann::json& j, ScenarioConfig& c);

struct Topology {
  std::vector<Point3> oru_positions;
  std::vector<Point3> ue_positions;
  Eigen::MatrixXd ue_oru_distance; // K x L, 3-D
  Eigen::MatrixXd oru_distance;    // L x L
  std::vector<int> edu_partition;  // O-RU -> EDU
  bool random_oru_placement = false;

  int num_oru() const { return static_cast<int>(oru_positions.size()); }
  int num_ue() const { return static_cast<int>(ue_positions.size()); }
};

/// Rows x columns of the most-square grid holding num_oru points, or nullopt
/// when the factorisation is too elongated (columns > 2 * rows).
std::optional<std::pair<int, int>> grid_shape(int num_oru);

/// O-RU positions at antenna height: centred grid when possible, otherwise
/// uniform over the area from the (master_seed, drop) O-RU stream.
std::vector<Point3> place_orus(const ScenarioConfig& config, std::uint64_t drop_index,
                               bool* random_fallback = nullptr);

Topology build_topology(const ScenarioConfig& config, std::uint64_t drop_index);

/// Recomputes both distance matrices from the positions.
void update_distances(Topology& topo);

} // namespace cfran

#endif // CFRAN_SCENARIO_HPP
