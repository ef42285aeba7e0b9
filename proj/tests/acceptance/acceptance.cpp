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

// Acceptance checks. Prints one PASS/FAIL line per criterion.

#include "cfran/association.hpp"
#include "cfran/channel.hpp"
#include "cfran/deployment.hpp"
#include "cfran/harness.hpp"
#include "cfran/power.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

using namespace cfran;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

CampaignConfig load(const std::string& name) {
  return load_campaign_config(std::string(CFRAN_CONFIG_DIR) + "/" + name);
}

CampaignConfig desk(int drops, int realizations) {
  auto c = load("desk.json");
  c.scenario.mc_drops = drops;
  c.scenario.mc_realizations = realizations;
  return c;
}

std::string fmt(double x, int digits = 4) {
  std::ostringstream os;
  os << std::setprecision(digits) << x;
  return os.str();
}

double median_of(const CampaignResult& r, Scheme s, const char* link) {
  const auto* sum = r.find(s, link);
  if (!sum || sum->sum_se.empty()) throw Error(std::string("no results for ") + std::string(to_string(s)));
  if (!r.drops.empty())
    for (const auto& d : r.drops)
      if (!d.error.empty()) throw Error("drop failed: " + d.error);
  return percentile(sum->sum_se, 50.0);
}

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

// Largest relative per-UE SINR difference between two schemes of the same drop.
double worst_pair(const DropResult& d, std::size_t a, std::size_t b) {
  double worst = 0.0;
  for (const auto link : {&SchemeOutcome::uplink, &SchemeOutcome::downlink}) {
    const auto& x = *(d.schemes[a].*link);
    const auto& y = *(d.schemes[b].*link);
    for (Eigen::Index k = 0; k < x.sinr.size(); ++k) worst = std::max(worst, rel(x.sinr(k), y.sinr(k)));
  }
  return worst;
}

Verdict special_cases() {
  double worst = 0.0;
  int checked = 0;
  for (const char* name : {"desk.json", "smoke.json", "table1.json"}) {
    auto c = load(name);
    const bool big = c.scenario.num_oru > 50;
    c.scenario.mc_realizations = big ? 5 : 20;
    c.ga.generations = big ? 20 : c.ga.generations;
    c.association = AssociationMode::all;
    const int drops = big ? 1 : 3;
    for (int m : {1, c.scenario.num_oru}) {
      c.scenario.num_edu = m;
      c.scenario.schemes = {m == 1 ? Scheme::joint_mmse : Scheme::l_mmse, Scheme::edu_mmse};
      for (int d = 0; d < drops; ++d) {
        const auto r = run_drop(c, static_cast<std::uint64_t>(d));
        if (!r.error.empty()) return {false, r.error};
        worst = std::max(worst, worst_pair(r, 0, 1));
        ++checked;
      }
    }
  }
  return {worst <= 1e-10, "max relative SINR gap " + fmt(worst) + " over " + std::to_string(checked) + " drops"};
}

Verdict monotone_in_m() {
  std::vector<double> med;
  std::string detail = "median uplink sum SE";
  for (int m : {1, 2, 4, 16}) {
    auto c = desk(200, 100);
    c.scenario.num_edu = m;
    c.scenario.schemes = {Scheme::edu_mmse};
    c.links = LinkSelection::uplink;
    med.push_back(median_of(run_campaign(c), Scheme::edu_mmse, "uplink"));
    detail += " M=" + std::to_string(m) + ":" + fmt(med.back());
  }
  bool ok = true;
  for (std::size_t i = 1; i < med.size(); ++i) ok = ok && med[i] <= med[i - 1] * 1.02;
  return {ok, detail};
}

Verdict ratio_at_full_scale() {
  auto c = load("table1.json");
  c.scenario.mc_drops = 50;
  c.scenario.mc_realizations = 50;
  c.scenario.schemes = {Scheme::joint_mmse, Scheme::edu_mmse};
  c.deployment = DeploymentMode::ga;
  c.association = AssociationMode::all;
  c.links = LinkSelection::uplink;
  const auto r = run_campaign(c);
  const double joint = median_of(r, Scheme::joint_mmse, "uplink");
  const double edu = median_of(r, Scheme::edu_mmse, "uplink");
  const double ratio = edu / joint;
  return {ratio >= 0.65 && ratio <= 0.90,
          "edu-mmse/joint-mmse = " + fmt(edu) + "/" + fmt(joint) + " = " + fmt(ratio) + " (" +
              fmt(r.elapsed_s, 3) + " s)"};
}

Verdict ga_beats_clustered() {
  bool ok = true;
  std::string detail;
  for (int m : {2, 4}) {
    double med[2][2];
    for (int mode = 0; mode < 2; ++mode) {
      auto c = desk(200, 100);
      c.scenario.num_edu = m;
      c.scenario.schemes = {Scheme::edu_mmse};
      c.deployment = mode == 0 ? DeploymentMode::ga : DeploymentMode::clustered;
      const auto r = run_campaign(c);
      med[mode][0] = median_of(r, Scheme::edu_mmse, "uplink");
      med[mode][1] = median_of(r, Scheme::edu_mmse, "downlink");
    }
    ok = ok && med[0][0] >= med[1][0] && med[0][1] >= med[1][1];
    detail += "M=" + std::to_string(m) + " UL " + fmt(med[0][0]) + " vs " + fmt(med[1][0]) + ", DL " +
              fmt(med[0][1]) + " vs " + fmt(med[1][1]) + "; ";
  }
  return {ok, detail + "(GA vs clustered)"};
}

// Cross-EDU distance sum for two groups, enumerated pair by pair.
double two_group_cost(const std::vector<int>& g, const Eigen::MatrixXd& d) {
  double cost = 0.0;
  for (std::size_t a = 0; a < g.size(); ++a)
    for (std::size_t b = 0; b < g.size(); ++b)
      if (g[a] == 0 && g[b] == 1) cost += d(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  return cost;
}

bool balanced_cover(const std::vector<int>& g, std::size_t L, int M) {
  if (g.size() != L) return false;
  std::vector<int> count(static_cast<std::size_t>(M), 0);
  for (int x : g) {
    if (x < 0 || x >= M) return false;
    ++count[static_cast<std::size_t>(x)];
  }
  const auto [lo, hi] = std::minmax_element(count.begin(), count.end());
  return *lo >= 1 && *hi - *lo <= 1;
}

Verdict ga_line_optimum() {
  GaConfig ga;
  ga.generations = 100;
  ga.fitness_mode = FitnessMode::exact;
  auto jitter = make_rng(5, 0, Stream::test);
  std::uniform_real_distribution<double> gap(2.0, 30.0);
  int runs = 0, optimal = 0, valid = 0;
  for (int spacing = 0; spacing < 2; ++spacing)
    for (int L = 2; L <= 8; ++L) {
      std::vector<double> xs{0.0};
      for (int l = 1; l < L; ++l) xs.push_back(xs.back() + (spacing == 0 ? 10.0 : gap(jitter)));
      Eigen::MatrixXd d(L, L);
      for (int i = 0; i < L; ++i)
        for (int j = 0; j < L; ++j) d(i, j) = std::abs(xs[static_cast<std::size_t>(i)] - xs[static_cast<std::size_t>(j)]);
      double best = std::numeric_limits<double>::infinity();
      for (unsigned code = 0; code < (1u << L); ++code) {
        std::vector<int> g;
        for (int l = 0; l < L; ++l) g.push_back(static_cast<int>((code >> l) & 1u));
        if (balanced_cover(g, static_cast<std::size_t>(L), 2)) best = std::min(best, two_group_cost(g, d));
      }
      for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto rng = make_rng(seed, static_cast<std::uint64_t>(L), Stream::genetic);
        const auto r = ga_optimize(d, 2, ga, rng);
        ++runs;
        if (balanced_cover(r.best.genome, static_cast<std::size_t>(L), 2)) ++valid;
        if (two_group_cost(r.best.genome, d) <= best * (1.0 + 1e-9)) ++optimal;
      }
    }
  return {optimal >= 0.9 * runs && valid == runs,
          std::to_string(optimal) + "/" + std::to_string(runs) + " optimal, " + std::to_string(valid) + "/" +
              std::to_string(runs) + " valid"};
}

Verdict ql_against_oracle() {
  const int K = 4, M = 2, cap = 2;
  auto rng = make_rng(3, 0, Stream::test);
  ChannelStatistics s(K, 4, 2);
  s.noise_mw = 1e-10;
  s.pilot_amplitude = std::sqrt(200.0 * 24);
  std::uniform_real_distribution<double> ang(-1.4, 1.4), spread(0.05, 0.4), gain(0.05, 1.0);
  for (int k = 0; k < K; ++k)
    for (int l = 0; l < 4; ++l) {
      s.beta(k, l) = 1e-8 * gain(rng);
      s.R(k, l) = spatial_correlation({ang(rng), ang(rng) / 2, spread(rng), spread(rng)}, 2, s.beta(k, l));
      s.sqrt_R(k, l) = hermitian_sqrt(s.R(k, l));
      const auto est = mmse_estimator(s.R(k, l), 200.0, 24, 1e-10);
      s.estimator_gain(k, l) = est.gain;
      s.error_cov(k, l) = est.error_cov;
    }
  const std::vector<int> genome{0, 1, 0, 1};
  const StatisticalSeEvaluator eval(s, genome, M, uplink_power(K, 200.0), 1e-10);

  double optimum = 0.0;
  for (unsigned code = 0; code < (1u << (K * M)); ++code) {
    EduAssociation a(K, M);
    bool fits = true;
    for (int m = 0; m < M; ++m) {
      int load = 0;
      for (int k = 0; k < K; ++k) load += a(k, m) = (code >> (m * K + k)) & 1u;
      fits = fits && load <= cap;
    }
    if (fits) optimum = std::max(optimum, eval(a));
  }

  QlConfig q;
  q.episodes = 500;
  int hits = 0;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto r = make_rng(seed, 0, Stream::qlearning);
    const auto out = ql_associate(std::cref(eval), K, M, cap, q, r);
    const double got = eval(out.best);
    const bool fits = (out.best.cast<int>().colwise().sum().array() <= cap).all();
    if (fits && got >= 0.95 * optimum) ++hits;
    detail += fmt(got / optimum, 3) + " ";
  }
  return {hits >= 9, std::to_string(hits) + "/10 seeds reach 0.95 of " + fmt(optimum) + " (" + detail + ")"};
}

Verdict mrc_closed_form() {
  auto c = desk(1, 1000).scenario;
  c.num_ue = 1;
  const int N = c.antennas_per_oru, L = c.num_oru;
  const double noise = c.noise_power_mw(), p = c.ul_power_mw;
  double worst_sample = 0.0, worst_mean = 0.0, worst_inst = 0.0;
  for (std::uint64_t drop = 0; drop < 5; ++drop) {
    const auto topo = build_topology(c, drop);
    auto shadow = make_rng(c.master_seed, drop, Stream::shadowing);
    auto stats = channel_statistics(c, topo, sample_large_scale(c, topo, shadow));
    for (int l = 0; l < L; ++l) stats.error_cov(0, l).setZero();
    auto fading = make_rng(c.master_seed, drop, Stream::small_scale);
    std::vector<ChannelRealization> batch;
    double mean_norm = 0.0, trace = 0.0;
    for (int t = 0; t < 1000; ++t) {
      CMatrix h(L * N, 1);
      for (int l = 0; l < L; ++l) h.block(l * N, 0, N, 1) = sample_channel(stats.sqrt_R(0, l), fading);
      mean_norm += h.squaredNorm() / 1000.0;
      batch.push_back({h, h});
      const double inst = instantaneous_uplink_sinr(h.col(0), 0, h, stats, uplink_power(1, p), noise);
      worst_inst = std::max(worst_inst, rel(inst, p * h.squaredNorm() / noise));
    }
    for (int l = 0; l < L; ++l) trace += stats.R(0, l).trace().real();
    const auto all = Association::all_serve(1, L);
    const auto layout = EduLayout::centralized(L);
    const auto r = uplink_sinr({Scheme::joint_mrc, &stats, &all, &layout, uplink_power(1, p), noise, std::nullopt}, batch);
    worst_sample = std::max(worst_sample, rel(r.sinr(0), p * mean_norm / noise));
    worst_mean = std::max(worst_mean, rel(r.sinr(0), p * trace / noise));
  }
  // The gap to p tr(R)/noise is sampling error of the channel energy and is only reported.
  return {worst_sample <= 0.02 && worst_inst <= 1e-10,
          "max deviation " + fmt(worst_sample) + " from mean p||h||^2/noise, " + fmt(worst_inst) +
              " per realisation; " + fmt(worst_mean) + " from p tr(R)/noise"};
}

Verdict power_audit() {
  const auto cfg = desk(1, 200);
  auto c = cfg.scenario;
  const int N = c.antennas_per_oru, L = c.num_oru, K = c.num_ue;
  const double noise = c.noise_power_mw();
  const Eigen::VectorXd p = uplink_power(K, c.ul_power_mw);
  auto pick = make_rng(8, 0, Stream::test);
  std::bernoulli_distribution keep(0.4);
  double worst = 0.0, mismatch = 0.0;
  for (std::uint64_t drop = 0; drop < 20; ++drop) {
    const auto topo = build_topology(c, drop);
    auto shadow = make_rng(c.master_seed, drop, Stream::shadowing);
    const auto stats = channel_statistics(c, topo, sample_large_scale(c, topo, shadow));
    auto fading = make_rng(c.master_seed, drop, Stream::small_scale);
    auto pilot = make_rng(c.master_seed, drop, Stream::pilot_noise);
    std::vector<ChannelRealization> batch;
    for (int t = 0; t < c.mc_realizations; ++t) batch.push_back(draw_realization(stats, fading, pilot));
    Association a{Mask::Zero(K, L)};
    if (drop % 2 == 0) {
      a = Association::all_serve(K, L);
    } else {
      for (int k = 0; k < K; ++k) {
        for (int l = 0; l < L; ++l) a.delta(k, l) = keep(pick);
        a.delta(k, static_cast<int>(drop) % L) = 1;
      }
    }
    const auto layout = EduLayout::from_partition(topo.edu_partition, c.num_edu);
    for (Scheme sch : all_schemes()) {
      const auto out = downlink_sinr({sch, &stats, &a, &layout, p, noise, c.dl_pmax_mw, noise}, batch);
      std::vector<CMatrix> w;
      for (const auto& r : batch) w.push_back(scheme_combiners(sch, r.hhat, stats, a, layout, p, noise));
      Eigen::VectorXd norm = Eigen::VectorXd::Zero(K);
      for (const auto& x : w)
        for (int k = 0; k < K; ++k)
          for (int l = 0; l < L; ++l)
            if (a.serves(k, l)) norm(k) += x.block(l * N, k, N, 1).squaredNorm() / static_cast<double>(w.size());
      Eigen::VectorXd radiated = Eigen::VectorXd::Zero(L);
      for (const auto& x : w)
        for (int k = 0; k < K; ++k)
          for (int l = 0; l < L; ++l)
            if (a.serves(k, l) && norm(k) > 0.0)
              radiated(l) += out.powers(k) * x.block(l * N, k, N, 1).squaredNorm() / norm(k) / static_cast<double>(w.size());
      worst = std::max(worst, radiated.maxCoeff() / c.dl_pmax_mw);
      mismatch = std::max(mismatch, (radiated - out.oru_radiated).cwiseAbs().maxCoeff() / c.dl_pmax_mw);
    }
  }
  return {worst <= 1.01 && mismatch <= 1e-9,
          "max O-RU power " + fmt(worst) + " x p_max over 20 instances x 8 schemes, bookkeeping gap " + fmt(mismatch)};
}

Verdict channel_statistics_check() {
  auto c = desk(1, 1).scenario;
  const int N = c.antennas_per_oru;
  auto pick = make_rng(9, 0, Stream::test);
  int pairs = 0, bad_corr = 0, bad_orth = 0, orth_tests = 0;
  double worst_orth = 0.0;
  std::vector<double> shadows;
  for (std::uint64_t drop = 0; drop < 1000; ++drop) {
    const auto topo = build_topology(c, drop);
    auto shadow = make_rng(c.master_seed, drop, Stream::shadowing);
    const auto ls = sample_large_scale(c, topo, shadow);
    for (Eigen::Index i = 0; i < ls.shadow_db.size(); ++i) shadows.push_back(ls.shadow_db.data()[i]);
    const auto stats = channel_statistics(c, topo, ls);
    std::uniform_int_distribution<int> k_of(0, c.num_ue - 1), l_of(0, c.num_oru - 1);
    const int k = k_of(pick), l = l_of(pick);
    const CMatrix& R = stats.R(k, l);
    const double tr = R.trace().real();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(R);
    const bool herm = (R - R.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * tr;
    const bool psd = es.eigenvalues().minCoeff() >= -1e-12 * tr;
    const bool trace = std::abs(tr - N * stats.beta(k, l)) <= 1e-12 * tr;
    if (!(herm && psd && trace)) ++bad_corr;
    ++pairs;

    // Orthogonality of estimate and error, on every 50th drop.
    if (drop % 50 == 0) {
      const int T = 4000;
      CMatrix mean = CMatrix::Zero(N, N);
      Eigen::MatrixXd second = Eigen::MatrixXd::Zero(N, N);
      auto fading = make_rng(c.master_seed, drop, Stream::small_scale);
      auto noise = make_rng(c.master_seed, drop, Stream::pilot_noise);
      for (int t = 0; t < T; ++t) {
        const CVector h = sample_channel(stats.sqrt_R(k, l), fading);
        const auto est = mmse_estimate(h, R, c.ul_power_mw, c.pilot_count, c.noise_power_mw(), noise);
        const CMatrix x = est.hhat * (h - est.hhat).adjoint();
        mean += x / static_cast<double>(T);
        second += x.cwiseAbs2() / static_cast<double>(T);
      }
      const double se = std::sqrt((second - mean.cwiseAbs2()).sum() / T);
      const double z = mean.norm() / se;
      worst_orth = std::max(worst_orth, z);
      ++orth_tests;
      if (z > 3.0) ++bad_orth;
    }
  }
  double sum = 0.0, sum2 = 0.0;
  for (double f : shadows) sum += f;
  const double mean = sum / static_cast<double>(shadows.size());
  for (double f : shadows) sum2 += (f - mean) * (f - mean);
  const double sd = std::sqrt(sum2 / static_cast<double>(shadows.size() - 1));
  const bool moments = std::abs(mean) <= 0.05 && std::abs(sd - c.shadow_sigma_db) <= 0.1;
  return {bad_corr == 0 && bad_orth == 0 && moments,
          std::to_string(pairs - bad_corr) + "/" + std::to_string(pairs) + " correlation matrices ok, " +
              std::to_string(orth_tests - bad_orth) + "/" + std::to_string(orth_tests) +
              " orthogonality tests within 3 se (worst " + fmt(worst_orth, 3) + "), shadowing mean " +
              fmt(mean, 3) + " dB sd " + fmt(sd, 3) + " dB over " + std::to_string(shadows.size())};
}

Verdict drift_hurts() {
  auto c = desk(200, 100);
  c.links = LinkSelection::downlink;
  const auto clean = run_campaign(c);
  c.phase_drift_deg = 30.0;
  const auto drifted = run_campaign(c);
  bool ok = true;
  std::string detail = "median DL sum SE without/with drift:";
  for (Scheme s : c.scenario.schemes) {
    const double a = median_of(clean, s, "downlink");
    const double b = median_of(drifted, s, "downlink");
    ok = ok && b < a;
    detail += " " + std::string(to_string(s)) + " " + fmt(a) + "/" + fmt(b);
    if (s == Scheme::edu_mmse) detail += " (loss " + fmt(100.0 * (1.0 - b / a), 3) + "%)";
  }
  return {ok, detail};
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"cfran acceptance checks"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-10); 0 runs all")->check(CLI::Range(0, 10));
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::function<Verdict()>> checks{
      special_cases,      monotone_in_m,   ratio_at_full_scale, ga_beats_clustered,       ga_line_optimum,
      ql_against_oracle,  mrc_closed_form, power_audit,         channel_statistics_check, drift_hurts,
  };
  bool all = true;
  for (int i = 1; i <= 10; ++i) {
    if (only != 0 && only != i) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = checks[static_cast<std::size_t>(i - 1)]();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << "criterion " << i << ": " << (v.pass ? "PASS" : "FAIL") << "  " << v.detail << "  [" << fmt(s, 3)
              << " s]" << std::endl;
    all = all && v.pass;
  }
  return all ? 0 : 1;
}
