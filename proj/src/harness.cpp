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

#include "cfran/harness.hpp"

#include "cfran/channel.hpp"
#include "cfran/rng.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

namespace cfran {

namespace {

template <typename Enum, std::size_t Size>
Enum parse_named(std::string_view s, const std::array<std::pair<std::string_view, Enum>, Size>& names,
                 const char* what) {
  for (const auto& [name, value] : names)
    if (name == s) return value;
  std::string msg = std::string(what) + " must be one of:";
  for (const auto& [name, value] : names) msg += " " + std::string(name);
  throw Error(msg + "; got '" + std::string(s) + "'");
}

template <typename Enum, std::size_t Size>
std::string_view name_of(Enum e, const std::array<std::pair<std::string_view, Enum>, Size>& names) {
  for (const auto& [name, value] : names)
    if (value == e) return name;
  return "?";
}

constexpr std::array<std::pair<std::string_view, DeploymentMode>, 3> kDeployment{{
    {"ga", DeploymentMode::ga}, {"clustered", DeploymentMode::clustered}, {"file", DeploymentMode::file}}};
constexpr std::array<std::pair<std::string_view, AssociationMode>, 3> kAssociation{{
    {"all", AssociationMode::all}, {"ql", AssociationMode::ql}, {"file", AssociationMode::file}}};
constexpr std::array<std::pair<std::string_view, LinkSelection>, 3> kLinks{{
    {"uplink", LinkSelection::uplink}, {"downlink", LinkSelection::downlink}, {"both", LinkSelection::both}}};

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(cell);
  }
  return out;
}

int to_int(const std::string& s, const char* what) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw Error(std::string(what) + ": not an integer: '" + s + "'");
  return v;
}

} // namespace

DeploymentMode parse_deployment_mode(std::string_view s) { return parse_named(s, kDeployment, "deployment"); }
AssociationMode parse_association_mode(std::string_view s) { return parse_named(s, kAssociation, "association"); }
LinkSelection parse_links(std::string_view s) { return parse_named(s, kLinks, "links"); }

std::vector<std::string> validate_campaign(const CampaignConfig& c) {
  auto errors = validate_config(c.scenario);
  for (auto& e : validate_ga_config(c.ga)) errors.push_back("ga: " + e);
  for (auto& e : validate_ql_config(c.ql)) errors.push_back("ql: " + e);
  if (c.deployment == DeploymentMode::file && c.deployment_file.empty())
    errors.emplace_back("deployment 'file' needs deployment_file");
  if (c.association == AssociationMode::file && c.association_file.empty())
    errors.emplace_back("association 'file' needs association_file");
  if (c.association == AssociationMode::ql && c.scenario.num_ue > 64)
    errors.emplace_back("association 'ql' supports at most 64 UEs");
  if (!(c.phase_drift_deg >= 0.0) || !std::isfinite(c.phase_drift_deg))
    errors.emplace_back("phase_drift_deg must be finite and non-negative");
  if (c.threads < 0) errors.emplace_back("threads must be non-negative");
  if (c.scenario.mc_realizations < 2) errors.emplace_back("mc_realizations must be >= 2");
  return errors;
}

void to_json(nlohmann::json& j, const CampaignConfig& c) {
  j = nlohmann::json{
      {"scenario", c.scenario},
      {"ga",
       {{"crossover_rate", c.ga.crossover_rate},
        {"mutation_rate", c.ga.mutation_rate},
        {"population_size", c.ga.population_size},
        {"generations", c.ga.generations},
        {"fitness_mode", to_string(c.ga.fitness_mode)}}},
      {"ql",
       {{"learning_rate", c.ql.learning_rate},
        {"discount", c.ql.discount},
        {"epsilon_init", c.ql.epsilon_init},
        {"attenuation", c.ql.attenuation},
        {"episodes", c.ql.episodes},
        {"horizon", c.ql.horizon}}},
      {"deployment", name_of(c.deployment, kDeployment)},
      {"association", name_of(c.association, kAssociation)},
      {"deployment_file", c.deployment_file},
      {"association_file", c.association_file},
      {"phase_drift_deg", c.phase_drift_deg},
      {"links", name_of(c.links, kLinks)},
  };
}

void from_json(const nlohmann::json& j, CampaignConfig& c) {
  if (!j.is_object()) throw Error("config must be a JSON object");
  // Scenario keys may sit under "scenario" or at the top level.
  if (j.contains("scenario"))
    j.at("scenario").get_to(c.scenario);
  else
    j.get_to(c.scenario);
  auto get = [](const nlohmann::json& o, const char* key, auto& field) {
    if (o.contains(key)) o.at(key).get_to(field);
  };
  if (j.contains("ga")) {
    const auto& g = j.at("ga");
    get(g, "crossover_rate", c.ga.crossover_rate);
    get(g, "mutation_rate", c.ga.mutation_rate);
    get(g, "population_size", c.ga.population_size);
    get(g, "generations", c.ga.generations);
    if (g.contains("fitness_mode")) c.ga.fitness_mode = parse_fitness_mode(g.at("fitness_mode").get<std::string>());
  }
  if (j.contains("ql")) {
    const auto& q = j.at("ql");
    get(q, "learning_rate", c.ql.learning_rate);
    get(q, "discount", c.ql.discount);
    get(q, "epsilon_init", c.ql.epsilon_init);
    get(q, "attenuation", c.ql.attenuation);
    get(q, "episodes", c.ql.episodes);
    get(q, "horizon", c.ql.horizon);
  }
  if (j.contains("deployment")) c.deployment = parse_deployment_mode(j.at("deployment").get<std::string>());
  if (j.contains("association")) c.association = parse_association_mode(j.at("association").get<std::string>());
  get(j, "deployment_file", c.deployment_file);
  get(j, "association_file", c.association_file);
  get(j, "phase_drift_deg", c.phase_drift_deg);
  if (j.contains("links")) c.links = parse_links(j.at("links").get<std::string>());
  get(j, "threads", c.threads);
}

CampaignConfig load_campaign_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open config '" + path.string() + "'");
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("config '" + path.string() + "': " + e.what());
  }
  CampaignConfig c;
  try {
    j.get_to(c);
  } catch (const nlohmann::json::exception& e) {
    throw Error("config '" + path.string() + "': " + e.what());
  }
  return c;
}

// --- CSV artefacts ---------------------------------------------------------

std::vector<int> read_partition_csv(std::istream& is, int num_oru, int num_edu) {
  std::vector<int> genome(static_cast<std::size_t>(num_oru), -1);
  std::string line;
  bool header = true;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split_csv_line(line);
    if (header) {
      header = false;
      if (cells.size() >= 2 && cells[0] == "oru_index") continue;
    }
    if (cells.size() < 2) throw Error("partition CSV: expected oru_index,edu_index");
    const int l = to_int(cells[0], "partition CSV");
    const int m = to_int(cells[1], "partition CSV");
    if (l < 0 || l >= num_oru) throw Error("partition CSV: O-RU index out of range");
    if (m < 0 || m >= num_edu) throw Error("partition CSV: EDU index out of range");
    genome[static_cast<std::size_t>(l)] = m;
  }
  if (std::find(genome.begin(), genome.end(), -1) != genome.end())
    throw Error("partition CSV: every O-RU needs an EDU");
  if (!satisfies_constraints(genome, num_edu))
    throw Error("partition CSV: every EDU needs at least one O-RU");
  return genome;
}

EduAssociation read_association_csv(std::istream& is, int num_ue, int num_edu) {
  EduAssociation a = EduAssociation::Zero(num_ue, num_edu);
  std::string line;
  bool header = true;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split_csv_line(line);
    if (header) {
      header = false;
      if (cells.size() >= 3 && cells[0] == "ue_index") continue;
    }
    if (cells.size() < 3) throw Error("association CSV: expected ue_index,edu_index,served");
    const int k = to_int(cells[0], "association CSV");
    const int m = to_int(cells[1], "association CSV");
    const int s = to_int(cells[2], "association CSV");
    if (k < 0 || k >= num_ue || m < 0 || m >= num_edu) throw Error("association CSV: index out of range");
    if (s != 0 && s != 1) throw Error("association CSV: served must be 0 or 1");
    a(k, m) = static_cast<std::uint8_t>(s);
  }
  return a;
}

void write_partition_csv(std::ostream& os, std::span<const int> genome) {
  os << "oru_index,edu_index\n";
  for (std::size_t l = 0; l < genome.size(); ++l) os << l << ',' << genome[l] << '\n';
}

void write_association_csv(std::ostream& os, const EduAssociation& a) {
  os << "ue_index,edu_index,served\n";
  for (Eigen::Index k = 0; k < a.rows(); ++k)
    for (Eigen::Index m = 0; m < a.cols(); ++m) os << k << ',' << m << ',' << int(a(k, m)) << '\n';
}

// --- one drop --------------------------------------------------------------

Partition resolve_partition(const CampaignConfig& config, const Topology& topo,
                            std::uint64_t drop_index) {
  const int M = config.scenario.num_edu;
  const std::uint64_t layout_drop = topo.random_oru_placement ? drop_index : 0;
  Partition p;
  switch (config.deployment) {
  case DeploymentMode::ga: {
    auto rng = make_rng(config.scenario.master_seed, layout_drop, Stream::genetic);
    p = ga_optimize(topo.oru_distance, M, config.ga, rng).best;
    break;
  }
  case DeploymentMode::clustered:
    p.genome = topo.edu_partition;
    p.num_groups = M;
    p.fitness = fitness(p.genome, M, topo.oru_distance, FitnessMode::pairwise_surrogate);
    break;
  case DeploymentMode::file: {
    std::ifstream is(config.deployment_file);
    if (!is) throw Error("cannot open deployment file '" + config.deployment_file + "'");
    p.genome = read_partition_csv(is, topo.num_oru(), M);
    p.num_groups = M;
    p.fitness = fitness(p.genome, M, topo.oru_distance, FitnessMode::pairwise_surrogate);
    break;
  }
  }
  return p;
}

DropResult run_drop(const CampaignConfig& config, std::uint64_t drop_index,
                    const Partition* partition) {
  const auto& sc = config.scenario;
  if (const auto errors = validate_campaign(config); !errors.empty())
    throw Error("invalid config: " + errors.front());

  DropResult out;
  out.drop_index = drop_index;
  const auto topo = build_topology(sc, drop_index);
  out.random_oru_placement = topo.random_oru_placement;

  auto shadow_rng = make_rng(sc.master_seed, drop_index, Stream::shadowing);
  const auto large_scale = sample_large_scale(sc, topo, shadow_rng);
  const auto stats = channel_statistics(sc, topo, large_scale);

  const int K = sc.num_ue;
  const int L = sc.num_oru;
  const int N = sc.antennas_per_oru;
  const int M = sc.num_edu;
  const double noise = sc.noise_power_mw();
  const Eigen::VectorXd ul_powers = uplink_power(K, sc.ul_power_mw);

  out.partition = partition ? *partition : resolve_partition(config, topo, drop_index);
  const auto edu_layout = EduLayout::from_partition(out.partition.genome, M);

  const bool needs_dcc = std::any_of(sc.schemes.begin(), sc.schemes.end(), uses_dcc);
  const StatisticalSeEvaluator evaluator(stats, out.partition.genome, M, ul_powers, noise);
  switch (config.association) {
  case AssociationMode::all:
    out.edu_association = EduAssociation::Ones(K, M);
    break;
  case AssociationMode::ql:
    if (needs_dcc) {
      auto rng = make_rng(sc.master_seed, drop_index, Stream::qlearning);
      out.edu_association = ql_associate(std::cref(evaluator), K, M, sc.fronthaul_ue_cap, config.ql, rng).best;
    } else {
      out.edu_association = EduAssociation::Ones(K, M);
    }
    break;
  case AssociationMode::file: {
    std::ifstream is(config.association_file);
    if (!is) throw Error("cannot open association file '" + config.association_file + "'");
    out.edu_association = read_association_csv(is, K, M);
    break;
  }
  }
  out.association_r_sum = evaluator(out.edu_association);
  const Association dcc = to_oru_association(out.edu_association, out.partition.genome);
  const Association full = Association::all_serve(K, L);

  struct Lane {
    Scheme scheme;
    const Association* assoc;
    EduLayout layout;
    std::optional<UplinkAccumulator> ul;
    std::optional<DownlinkAccumulator> dl;
  };
  std::vector<Lane> lanes;
  for (Scheme s : sc.schemes) {
    Lane lane{s, uses_dcc(s) ? &dcc : &full, scheme_layout(s, L, edu_layout), {}, {}};
    if (config.uplink()) lane.ul.emplace(K, lane.layout.num_groups());
    if (config.downlink()) lane.dl.emplace(K, L, N);
    lanes.push_back(std::move(lane));
  }

  auto fading_rng = make_rng(sc.master_seed, drop_index, Stream::small_scale);
  auto pilot_rng = make_rng(sc.master_seed, drop_index, Stream::pilot_noise);
  auto drift_rng = make_rng(sc.master_seed, drop_index, Stream::phase_drift);
  const bool drift = config.downlink() && config.phase_drift_deg > 0.0;

  for (int t = 0; t < sc.mc_realizations; ++t) {
    const auto r = draw_realization(stats, fading_rng, pilot_rng);
    CMatrix drifted;
    if (drift) {
      drifted = r.hhat;
      apply_phase_drift(drifted, N, config.phase_drift_deg, drift_rng);
    }
    for (auto& lane : lanes) {
      const bool central = processing_of(lane.scheme) == Processing::centralized;
      const CMatrix v = scheme_combiners(lane.scheme, r.hhat, stats, *lane.assoc, edu_layout,
                                         ul_powers, noise, &out.diagnostics);
      if (lane.ul) {
        if (central)
          lane.ul->add_centralized(v, r.h, *lane.assoc, N, ul_powers, noise);
        else
          lane.ul->add_edu(v, r.h, lane.layout, N, ul_powers, noise);
      }
      if (lane.dl) {
        const CMatrix w = drift ? scheme_combiners(lane.scheme, drifted, stats, *lane.assoc, edu_layout,
                                                   ul_powers, noise, &out.diagnostics)
                                : v;
        if (central)
          lane.dl->add_centralized(w, r.h, *lane.assoc);
        else
          lane.dl->add_edu(w, r.h, lane.layout);
      }
    }
  }

  for (auto& lane : lanes) {
    SchemeOutcome o;
    o.scheme = lane.scheme;
    o.power.uplink = ul_powers;
    if (lane.ul) o.uplink = lane.ul->finish(ul_powers, noise, sc.quantizer_bits);
    if (lane.dl) {
      auto dl = finish_downlink(*lane.dl, stats, *lane.assoc, sc.dl_pmax_mw, noise);
      o.downlink = std::move(dl.report);
      o.power.downlink = std::move(dl.powers);
      o.power.oru_radiated = std::move(dl.oru_radiated);
    }
    out.schemes.push_back(std::move(o));
  }
  return out;
}

// --- statistics ------------------------------------------------------------

double percentile(std::vector<double> samples, double q) {
  if (samples.empty()) throw Error("percentile: no samples");
  if (!(q >= 0.0 && q <= 100.0)) throw Error("percentile: q must lie in [0, 100]");
  std::sort(samples.begin(), samples.end());
  const double pos = q / 100.0 * static_cast<double>(samples.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, samples.size() - 1);
  return samples[lo] + (pos - static_cast<double>(lo)) * (samples[hi] - samples[lo]);
}

Cdf empirical_cdf(std::vector<double> samples) {
  Cdf c;
  std::sort(samples.begin(), samples.end());
  c.x = std::move(samples);
  const double n = static_cast<double>(c.x.size());
  for (std::size_t i = 0; i < c.x.size(); ++i) c.p.push_back(static_cast<double>(i + 1) / n);
  return c;
}

const SchemeSummary* CampaignResult::find(Scheme s, std::string_view link) const {
  for (const auto& e : summary)
    if (e.scheme == s && e.link == link) return &e;
  return nullptr;
}

namespace {

void summarise(CampaignResult& result) {
  const auto& sc = result.config.scenario;
  std::vector<std::string> links;
  if (result.config.uplink()) links.emplace_back("uplink");
  if (result.config.downlink()) links.emplace_back("downlink");
  for (const auto& link : links)
    for (std::size_t si = 0; si < sc.schemes.size(); ++si) {
      SchemeSummary s;
      s.scheme = sc.schemes[si];
      s.link = link;
      for (const auto& d : result.drops) {
        if (!d.error.empty()) continue;
        const auto& o = d.schemes[si];
        s.sum_se.push_back(link == "uplink" ? o.uplink->sum_se() : o.downlink->sum_se());
      }
      if (!s.sum_se.empty()) {
        s.median = percentile(s.sum_se, 50.0);
        s.mean = std::accumulate(s.sum_se.begin(), s.sum_se.end(), 0.0) / static_cast<double>(s.sum_se.size());
        s.p5 = percentile(s.sum_se, 5.0);
        s.p95 = percentile(s.sum_se, 95.0);
      }
      result.summary.push_back(std::move(s));
    }
  for (auto& s : result.summary) {
    const auto* ref = result.find(Scheme::joint_mmse, s.link);
    if (ref && !ref->sum_se.empty() && !s.sum_se.empty() && ref->median > 0.0)
      s.ratio_to_joint_mmse = s.median / ref->median;
  }
}

} // namespace

CampaignResult run_campaign(const CampaignConfig& config) {
  if (const auto errors = validate_campaign(config); !errors.empty())
    throw Error("invalid config: " + errors.front());
  const auto start = std::chrono::steady_clock::now();
  const auto& sc = config.scenario;

  CampaignResult result;
  result.config = config;
  result.drops.resize(static_cast<std::size_t>(sc.mc_drops));

  // A grid layout fixes the partition for every drop.
  std::optional<Partition> shared;
  // If that fails, every drop retries and records the error itself.
  if (grid_shape(sc.num_oru)) {
    try {
      shared = resolve_partition(config, build_topology(sc, 0), 0);
    } catch (const std::exception&) {
      shared.reset();
    }
  }

  int threads = config.threads > 0 ? config.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, sc.mc_drops);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int d = next++; d < sc.mc_drops; d = next++) {
      auto& slot = result.drops[static_cast<std::size_t>(d)];
      try {
        slot = run_drop(config, static_cast<std::uint64_t>(d), shared ? &*shared : nullptr);
      } catch (const std::exception& e) {
        slot = DropResult{};
        slot.drop_index = static_cast<std::uint64_t>(d);
        slot.error = "drop " + std::to_string(d) + ": " + e.what();
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  summarise(result);
  result.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

// --- output ----------------------------------------------------------------

namespace {

std::string number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

} // namespace

void write_raw_csv(std::ostream& os, const CampaignResult& result) {
  nlohmann::json echo = result.config;
  os << "# config: " << echo.dump() << '\n';
  os << "drop,scheme,ue,link,sinr_db,se_bpshz\n";
  for (const auto& d : result.drops) {
    if (!d.error.empty()) continue;
    for (const auto& o : d.schemes)
      for (const auto& [link, report] : {std::pair{"uplink", &o.uplink}, std::pair{"downlink", &o.downlink}}) {
        if (!*report) continue;
        const auto& r = **report;
        for (Eigen::Index k = 0; k < r.sinr.size(); ++k)
          os << d.drop_index << ',' << to_string(o.scheme) << ',' << k << ',' << link << ','
             << number(10.0 * std::log10(r.sinr(k))) << ',' << number(r.se(k)) << '\n';
        os << d.drop_index << ',' << to_string(o.scheme) << ",sum," << link << ",," << number(r.sum_se())
           << '\n';
      }
  }
}

nlohmann::json summary_json(const CampaignResult& result) {
  nlohmann::json j;
  j["config"] = result.config;
  j["elapsed_s"] = result.elapsed_s;
  SolverDiagnostics diag;
  int ok = 0;
  bool random_layout = false;
  nlohmann::json failed = nlohmann::json::array();
  for (const auto& d : result.drops) {
    if (!d.error.empty()) {
      failed.push_back({{"drop", d.drop_index}, {"error", d.error}});
      continue;
    }
    ++ok;
    diag.solves += d.diagnostics.solves;
    diag.ill_conditioned += d.diagnostics.ill_conditioned;
    diag.jittered += d.diagnostics.jittered;
    random_layout = random_layout || d.random_oru_placement;
  }
  j["drops_completed"] = ok;
  j["failed_drops"] = failed;
  j["random_oru_placement"] = random_layout;
  j["solver"] = {{"solves", diag.solves}, {"ill_conditioned", diag.ill_conditioned}, {"jittered", diag.jittered}};
  nlohmann::json schemes = nlohmann::json::array();
  for (const auto& s : result.summary) {
    nlohmann::json e{{"scheme", to_string(s.scheme)}, {"link", s.link}, {"drops", s.sum_se.size()}};
    if (!s.sum_se.empty()) {
      e["median"] = s.median;
      e["mean"] = s.mean;
      e["p5"] = s.p5;
      e["p95"] = s.p95;
      const auto cdf = empirical_cdf(s.sum_se);
      e["cdf"] = {{"sum_se", cdf.x}, {"probability", cdf.p}};
    }
    e["ratio_to_joint_mmse"] = s.ratio_to_joint_mmse ? nlohmann::json(*s.ratio_to_joint_mmse) : nlohmann::json();
    schemes.push_back(std::move(e));
  }
  j["schemes"] = std::move(schemes);
  return j;
}

void write_campaign(const CampaignResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream os(dir / name);
    if (!os) throw Error("cannot write '" + (dir / name).string() + "'");
    return os;
  };
  {
    auto os = open("raw.csv");
    write_raw_csv(os, result);
  }
  {
    auto os = open("power.csv");
    os << "drop,scheme,ue_index,ul_mw,dl_mw\n";
    for (const auto& d : result.drops)
      for (const auto& o : d.schemes)
        for (Eigen::Index k = 0; k < o.power.uplink.size(); ++k)
          os << d.drop_index << ',' << to_string(o.scheme) << ',' << k << ',' << number(o.power.uplink(k))
             << ',' << (o.power.downlink.size() ? number(o.power.downlink(k)) : std::string()) << '\n';
  }
  {
    auto os = open("summary.json");
    os << summary_json(result).dump(2) << '\n';
  }
}

} // namespace cfran
