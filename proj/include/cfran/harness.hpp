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

#ifndef CFRAN_HARNESS_HPP
#define CFRAN_HARNESS_HPP

#include "cfran/association.hpp"
#include "cfran/deployment.hpp"
#include "cfran/power.hpp"
#include "cfran/scenario.hpp"
#include "cfran/transceiver.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cfran {

enum class DeploymentMode { ga, clustered, file };
enum class AssociationMode { all, ql, file };
enum class LinkSelection { uplink, downlink, both };

struct CampaignConfig {
  ScenarioConfig scenario;
  GaConfig ga;
  QlConfig ql;
  DeploymentMode deployment = DeploymentMode::ga;
  AssociationMode association = AssociationMode::all;
  std::string deployment_file;  // CSV oru_index,edu_index
  std::string association_file; // CSV ue_index,edu_index,served
  double phase_drift_deg = 0.0;  // applied to downlink CSI only
  LinkSelection links = LinkSelection::both;
  int threads = 0;               // 0 = hardware concurrency

  bool uplink() const { return links != LinkSelection::downlink; }
  bool downlink() const { return links != LinkSelection::uplink; }
};

std::vector<std::string> validate_campaign(const CampaignConfig& c);

void to_json(nlohmann::json& j, const CampaignConfig& c);
void from_json(const nlohmann::json& j, CampaignConfig& c);
CampaignConfig load_campaign_config(const std::filesystem::path& path);

DeploymentMode parse_deployment_mode(std::string_view s);
AssociationMode parse_association_mode(std::string_view s);
LinkSelection parse_links(std::string_view s);

std::vector<int> read_partition_csv(std::istream& is, int num_oru, int num_edu);
EduAssociation read_association_csv(std::istream& is, int num_ue, int num_edu);
void write_partition_csv(std::ostream& os, std::span<const int> genome);
void write_association_csv(std::ostream& os, const EduAssociation& a);

struct SchemeOutcome {
  Scheme scheme;
  std::optional<SinrReport> uplink;
  std::optional<SinrReport> downlink;
  PowerAllocation power;
};

struct DropResult {
  std::uint64_t drop_index = 0;
  std::vector<SchemeOutcome> schemes;
  Partition partition;
  EduAssociation edu_association;
  double association_r_sum = 0.0; // statistical sum SE of the DCC association
  SolverDiagnostics diagnostics;
  bool random_oru_placement = false;
  std::string error; // non-empty when the drop failed
};

/// The O-RU -> EDU partition a campaign uses. Depends only on the O-RU layout,
/// so on a grid it is identical for every drop.
Partition resolve_partition(const CampaignConfig& config, const Topology& topo,
                            std::uint64_t drop_index);

/// One drop: topology, large-scale statistics, partition, association, then
/// mc_realizations of channels and the SINR of every enabled scheme.
DropResult run_drop(const CampaignConfig& config, std::uint64_t drop_index,
                    const Partition* partition = nullptr);

struct Cdf {
  std::vector<double> x; // sorted samples
  std::vector<double> p; // (i + 1) / n
};

Cdf empirical_cdf(std::vector<double> samples);
/// Linear-interpolated percentile, q in [0, 100].
double percentile(std::vector<double> samples, double q);

struct SchemeSummary {
  Scheme scheme;
  std::string link;
  std::vector<double> sum_se; // one per successful drop, drop order
  double median = 0.0, mean = 0.0, p5 = 0.0, p95 = 0.0;
  std::optional<double> ratio_to_joint_mmse;
};

struct CampaignResult {
  CampaignConfig config;
  std::vector<DropResult> drops; // sorted by drop index
  std::vector<SchemeSummary> summary;
  double elapsed_s = 0.0;

  const SchemeSummary* find(Scheme s, std::string_view link) const;
};

CampaignResult run_campaign(const CampaignConfig& config);

/// raw.csv, power.csv and summary.json under `dir`.
void write_campaign(const CampaignResult& result, const std::filesystem::path& dir);
void write_raw_csv(std::ostream& os, const CampaignResult& result);
nlohmann::json summary_json(const CampaignResult& result);

} // namespace cfran

#endif // CFRAN_HARNESS_HPP
