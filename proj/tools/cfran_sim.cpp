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

// Command-line driver: simulate, deploy-ga, associate-ql, sweep.

#include "cfran/association.hpp"
#include "cfran/channel.hpp"
#include "cfran/deployment.hpp"
#include "cfran/harness.hpp"
#include "cfran/rng.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Bad input from the user; exit code 2.
struct UsageError : cfran::Error {
  using cfran::Error::Error;
};

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> drops;
  std::optional<int> realizations;
  std::string schemes;
  std::string out = "out";
  std::string deployment;
  std::string association;
  std::string deployment_file;
  std::string association_file;
  std::optional<double> phase_drift_deg;
  std::string quant_bits;
  std::string links;
  std::optional<int> threads;
  bool dump_channels = false;
  // deploy-ga
  std::string fitness_mode;
  // associate-ql
  std::uint64_t drop = 0;
  // sweep
  std::string param;
  std::string values;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "Scenario JSON")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "Master seed");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--deployment", o.deployment, "ga | clustered | file")
      ->check(CLI::IsMember({"ga", "clustered", "file"}));
  cmd->add_option("--deployment-file", o.deployment_file, "CSV oru_index,edu_index");
  cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
}

void add_campaign(CLI::App* cmd, Options& o) {
  cmd->add_option("--drops", o.drops, "Monte Carlo drops");
  cmd->add_option("--realizations", o.realizations, "Channel realisations per drop");
  cmd->add_option("--schemes", o.schemes, "Comma-separated scheme tags");
  cmd->add_option("--association", o.association, "all | ql | file")
      ->check(CLI::IsMember({"all", "ql", "file"}));
  cmd->add_option("--association-file", o.association_file, "CSV ue_index,edu_index,served");
  cmd->add_option("--phase-drift-deg", o.phase_drift_deg, "Max downlink CSI phase drift per O-RU");
  cmd->add_option("--quant-bits", o.quant_bits, "Fronthaul quantiser bits, or 'inf'");
  cmd->add_option("--links", o.links, "uplink | downlink | both")
      ->check(CLI::IsMember({"uplink", "downlink", "both"}));
  cmd->add_flag("--dump-channels", o.dump_channels, "Write beta and correlation CSVs for drop 0");
}

cfran::CampaignConfig load(const Options& o) {
  cfran::CampaignConfig c;
  try {
    c = cfran::load_campaign_config(o.config);
    auto& sc = c.scenario;
    if (o.seed) sc.master_seed = *o.seed;
    if (o.drops) sc.mc_drops = *o.drops;
    if (o.realizations) sc.mc_realizations = *o.realizations;
    if (!o.schemes.empty()) sc.schemes = cfran::parse_scheme_list(o.schemes);
    if (!o.deployment.empty()) c.deployment = cfran::parse_deployment_mode(o.deployment);
    if (!o.association.empty()) c.association = cfran::parse_association_mode(o.association);
    if (!o.deployment_file.empty()) c.deployment_file = o.deployment_file;
    if (!o.association_file.empty()) c.association_file = o.association_file;
    if (o.phase_drift_deg) c.phase_drift_deg = *o.phase_drift_deg;
    if (!o.links.empty()) c.links = cfran::parse_links(o.links);
    if (o.threads) c.threads = *o.threads;
    if (o.quant_bits == "inf" || o.quant_bits == "infinite") {
      sc.quantizer_bits.reset();
    } else if (!o.quant_bits.empty()) {
      std::size_t used = 0;
      int b = 0;
      try {
        b = std::stoi(o.quant_bits, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != o.quant_bits.size()) throw cfran::Error("--quant-bits must be an integer or 'inf'");
      sc.quantizer_bits = b;
    }
  } catch (const cfran::Error& e) {
    throw UsageError(e.what());
  }
  if (const auto errors = cfran::validate_campaign(c); !errors.empty()) {
    std::string msg = "invalid config:";
    for (const auto& e : errors) msg += " " + e + ";";
    throw UsageError(msg);
  }
  return c;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw cfran::Error("cannot write '" + path.string() + "'");
  return os;
}

void dump_channels(const cfran::CampaignConfig& c, const fs::path& out) {
  const auto& sc = c.scenario;
  const auto topo = cfran::build_topology(sc, 0);
  auto rng = cfran::make_rng(sc.master_seed, 0, cfran::Stream::shadowing);
  const auto stats = cfran::channel_statistics(sc, topo, cfran::sample_large_scale(sc, topo, rng));
  auto beta = open_out(out / "beta.csv");
  cfran::write_beta_csv(beta, stats);
  auto corr = open_out(out / "correlation.csv");
  cfran::write_correlation_csv(corr, stats);
}

void print_summary(const cfran::CampaignResult& r) {
  std::cout << "scheme        link      median    mean      p5        p95       ratio\n";
  for (const auto& s : r.summary) {
    std::cout << std::left << std::setw(14) << cfran::to_string(s.scheme) << std::setw(10) << s.link
              << std::fixed << std::setprecision(3) << std::setw(10) << s.median << std::setw(10) << s.mean
              << std::setw(10) << s.p5 << std::setw(10) << s.p95;
    if (s.ratio_to_joint_mmse) std::cout << *s.ratio_to_joint_mmse;
    std::cout << '\n';
  }
  std::cout << "elapsed " << r.elapsed_s << " s\n";
}

int cmd_simulate(const Options& o) {
  const auto c = load(o);
  const fs::path out = o.out;
  fs::create_directories(out);
  if (o.dump_channels) dump_channels(c, out);
  const auto r = cfran::run_campaign(c);
  cfran::write_campaign(r, out);
  print_summary(r);
  int failed = 0;
  for (const auto& d : r.drops)
    if (!d.error.empty()) {
      std::cerr << "drop " << d.drop_index << " failed: " << d.error << '\n';
      ++failed;
    }
  if (failed == static_cast<int>(r.drops.size()))
    throw cfran::Error("every drop failed; first: " + r.drops.front().error);
  return 0;
}

int cmd_deploy_ga(const Options& o) {
  auto c = load(o);
  if (!o.fitness_mode.empty()) {
    try {
      c.ga.fitness_mode = cfran::parse_fitness_mode(o.fitness_mode);
    } catch (const cfran::Error& e) {
      throw UsageError(e.what());
    }
  }
  const auto& sc = c.scenario;
  const auto topo = cfran::build_topology(sc, 0);
  auto rng = cfran::make_rng(sc.master_seed, 0, cfran::Stream::genetic);
  const auto ga = cfran::ga_optimize(topo.oru_distance, sc.num_edu, c.ga, rng);

  const fs::path out = o.out;
  fs::create_directories(out);
  {
    auto os = open_out(out / "partition.csv");
    cfran::write_partition_csv(os, ga.best.genome);
  }
  {
    auto os = open_out(out / "fitness_trajectory.csv");
    os << "generation,best_fitness\n";
    os.precision(12);
    for (std::size_t g = 0; g < ga.best_fitness.size(); ++g) os << g << ',' << ga.best_fitness[g] << '\n';
  }
  json j{{"config", c},
         {"fitness_mode", cfran::to_string(c.ga.fitness_mode)},
         {"fitness", ga.best.fitness},
         {"genome", ga.best.genome},
         {"groups", ga.best.groups()}};
  auto os = open_out(out / "partition.json");
  os << j.dump(2) << '\n';
  std::cout << "fitness " << ga.best.fitness << '\n';
  return 0;
}

int cmd_associate_ql(const Options& o) {
  const auto c = load(o);
  const auto& sc = c.scenario;
  const auto topo = cfran::build_topology(sc, o.drop);
  auto shadow = cfran::make_rng(sc.master_seed, o.drop, cfran::Stream::shadowing);
  const auto stats = cfran::channel_statistics(sc, topo, cfran::sample_large_scale(sc, topo, shadow));
  const auto partition = cfran::resolve_partition(c, topo, o.drop);
  const auto powers = cfran::uplink_power(sc.num_ue, sc.ul_power_mw);
  const cfran::StatisticalSeEvaluator eval(stats, partition.genome, sc.num_edu, powers, sc.noise_power_mw());
  auto rng = cfran::make_rng(sc.master_seed, o.drop, cfran::Stream::qlearning);
  const auto r = cfran::ql_associate(std::cref(eval), sc.num_ue, sc.num_edu, sc.fronthaul_ue_cap, c.ql, rng);

  const fs::path out = o.out;
  fs::create_directories(out);
  {
    auto os = open_out(out / "association.csv");
    cfran::write_association_csv(os, r.best);
  }
  {
    auto os = open_out(out / "reward_trajectory.csv");
    os << "episode,reward,best_sum_se\n";
    os.precision(12);
    for (std::size_t e = 0; e < r.episode_reward.size(); ++e)
      os << e << ',' << r.episode_reward[e] << ',' << r.episode_best[e] << '\n';
  }
  json agents = json::array();
  for (std::size_t m = 0; m < r.tables.size(); ++m) {
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (const auto& [state, q] : r.tables[m].entries())
      for (double v : q) {
        lo = first ? v : std::min(lo, v);
        hi = first ? v : std::max(hi, v);
        first = false;
      }
    agents.push_back({{"edu", m}, {"states", r.tables[m].states()}, {"q_min", lo}, {"q_max", hi}});
  }
  json j{{"config", c},
         {"drop", o.drop},
         {"partition", partition.genome},
         {"best_sum_se", r.best_r_sum},
         {"all_serve_sum_se", r.r_sum_all},
         {"evaluations", r.evaluations},
         {"agents", agents}};
  auto os = open_out(out / "qtable_summary.json");
  os << j.dump(2) << '\n';
  std::cout << "sum SE " << r.best_r_sum << " (all-serve " << r.r_sum_all << ")\n";
  return 0;
}

int cmd_sweep(const Options& o) {
  const auto base = load(o);
  std::vector<std::string> values;
  {
    std::stringstream ss(o.values);
    std::string v;
    while (std::getline(ss, v, ','))
      if (!v.empty()) values.push_back(v);
  }
  if (values.empty()) throw UsageError("--values must list at least one value");

  const fs::path out = o.out;
  fs::create_directories(out);
  json summary{{"param", o.param}, {"runs", json::array()}};
  for (const auto& v : values) {
    json cj = base;
    json value = json::parse(v, nullptr, false);
    if (value.is_discarded()) value = v;
    // Top-level campaign keys first, then scenario keys.
    if (cj.contains(o.param) && o.param != "scenario")
      cj[o.param] = value;
    else if (cj["scenario"].contains(o.param))
      cj["scenario"][o.param] = value;
    else
      throw UsageError("unknown sweep parameter '" + o.param + "'");
    cfran::CampaignConfig c;
    try {
      cj.get_to(c);
    } catch (const std::exception& e) {
      throw UsageError(std::string("sweep value '") + v + "': " + e.what());
    }
    if (const auto errors = cfran::validate_campaign(c); !errors.empty())
      throw UsageError("sweep value '" + v + "': " + errors.front());
    const auto r = cfran::run_campaign(c);
    const fs::path dir = out / (o.param + "=" + v);
    cfran::write_campaign(r, dir);
    std::cout << o.param << " = " << v << '\n';
    print_summary(r);
    json run{{"value", value}, {"dir", dir.filename().string()}, {"schemes", cfran::summary_json(r)["schemes"]}};
    for (auto& s : run["schemes"]) s.erase("cdf");
    summary["runs"].push_back(std::move(run));
  }
  auto os = open_out(out / "sweep_summary.json");
  os << summary.dump(2) << '\n';
  return 0;
}

int report_error(const char* kind, const std::string& message, const std::string& out_dir) {
  const json record{{"error", {{"kind", kind}, {"message", message}}}};
  std::cerr << record.dump() << '\n';
  if (!out_dir.empty()) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    std::ofstream os(fs::path(out_dir) / "error.json");
    if (os) os << record.dump(2) << '\n';
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cell-free O-RAN uplink/downlink simulator"};
  app.require_subcommand(1);
  Options o;

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo campaign over drops and schemes");
  add_common(simulate, o);
  add_campaign(simulate, o);

  auto* deploy = app.add_subcommand("deploy-ga", "Partition O-RUs into EDUs with the genetic algorithm");
  add_common(deploy, o);
  deploy->add_option("--fitness", o.fitness_mode, "exact | pairwise-surrogate");

  auto* associate = app.add_subcommand("associate-ql", "UE-EDU association by Q-learning for one drop");
  add_common(associate, o);
  associate->add_option("--drop", o.drop, "Drop index");

  auto* sweep = app.add_subcommand("sweep", "Repeat a campaign over values of one parameter");
  add_common(sweep, o);
  add_campaign(sweep, o);
  sweep->add_option("--param", o.param, "Config key, e.g. num_edu or phase_drift_deg")->required();
  sweep->add_option("--values", o.values, "Comma-separated values")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n";
    const auto subs = app.get_subcommands();
    std::cerr << (subs.empty() ? app.help() : subs.front()->help());
    report_error("usage", e.what(), "");
    return 2;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(o);
    if (deploy->parsed()) return cmd_deploy_ga(o);
    if (associate->parsed()) return cmd_associate_ql(o);
    if (sweep->parsed()) return cmd_sweep(o);
  } catch (const UsageError& e) {
    report_error("config", e.what(), o.out);
    return 2;
  } catch (const std::exception& e) {
    report_error("runtime", e.what(), o.out);
    return 1;
  }
  return 2;
}
