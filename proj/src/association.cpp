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

#include "cfran/association.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cfran {

std::vector<std::string> validate_ql_config(const QlConfig& c) {
  std::vector<std::string> errors;
  if (!(c.learning_rate > 0.0 && c.learning_rate <= 1.0)) errors.emplace_back("learning_rate must lie in (0, 1]");
  if (!(c.discount >= 0.0 && c.discount < 1.0)) errors.emplace_back("discount must lie in [0, 1)");
  if (!(c.epsilon_init > 0.0 && c.epsilon_init < 1.0)) errors.emplace_back("epsilon_init must lie in (0, 1)");
  if (!(c.attenuation > 0.0)) errors.emplace_back("attenuation must be positive");
  if (c.episodes < 1) errors.emplace_back("episodes must be >= 1");
  if (c.horizon < 0) errors.emplace_back("horizon must be >= 0");
  return errors;
}

Association to_oru_association(const EduAssociation& edu_assoc, std::span<const int> genome) {
  const auto K = edu_assoc.rows();
  const auto L = static_cast<Eigen::Index>(genome.size());
  Association a{Mask::Zero(K, L)};
  for (Eigen::Index k = 0; k < K; ++k)
    for (Eigen::Index l = 0; l < L; ++l) a.delta(k, l) = edu_assoc(k, genome[static_cast<std::size_t>(l)]);
  return a;
}

double epsilon_schedule(int episode, double epsilon_init, double attenuation, int action_count) {
  const double exponent = episode / (attenuation * action_count);
  return epsilon_init * std::pow(1.0 - epsilon_init, exponent);
}

double q_update(double q, double reward, double max_next, double alpha, double discount) {
  return (1.0 - alpha) * q + alpha * (reward + discount * max_next);
}

bool fronthaul_ok(const EduAssociation& edu_assoc, int cap) {
  for (Eigen::Index m = 0; m < edu_assoc.cols(); ++m)
    if (edu_assoc.col(m).cast<int>().sum() > cap) return false;
  return true;
}

double reward(bool chi, double r_sum, double r_sum_all) {
  if (!chi) return 0.0;
  if (r_sum >= r_sum_all - 1e-9) return kRewardCap;
  return r_sum / (r_sum_all - r_sum);
}

// --- statistical evaluator -------------------------------------------------

StatisticalSeEvaluator::StatisticalSeEvaluator(const ChannelStatistics& stats,
                                               std::span<const int> genome, int num_groups,
                                               const Eigen::VectorXd& powers, double noise)
    : powers_(powers), noise_(noise) {
  const int K = stats.num_ue();
  const int L = stats.num_oru();
  const int N = stats.antennas();
  if (static_cast<int>(genome.size()) != L) throw Error("StatisticalSeEvaluator: partition size mismatch");
  signal_ = Eigen::MatrixXd::Zero(K, num_groups);
  noise_gain_ = Eigen::MatrixXd::Zero(K, num_groups);
  interference_.assign(static_cast<std::size_t>(num_groups), Eigen::MatrixXd::Zero(K, K));

  // The EDU system matrix is block diagonal over its O-RUs, so every term
  // decomposes into per-O-RU traces.
  for (int l = 0; l < L; ++l) {
    const int m = genome[static_cast<std::size_t>(l)];
    CMatrix Q = noise * CMatrix::Identity(N, N);
    for (int i = 0; i < K; ++i) Q += powers(i) * stats.R(i, l);
    const CMatrix Qinv = Q.llt().solve(CMatrix::Identity(N, N));
    std::vector<CMatrix> QRQ(static_cast<std::size_t>(K));
    for (int i = 0; i < K; ++i) QRQ[static_cast<std::size_t>(i)] = Qinv * stats.R(i, l) * Qinv;
    for (int k = 0; k < K; ++k) {
      const CMatrix B = stats.estimate_cov(k, l);
      signal_(k, m) += (Qinv * B).trace().real();
      noise_gain_(k, m) += (Qinv * B * Qinv).trace().real();
      for (int i = 0; i < K; ++i)
        if (i != k) interference_[static_cast<std::size_t>(m)](k, i) += (QRQ[static_cast<std::size_t>(i)] * B).trace().real();
    }
  }
}

Eigen::VectorXd StatisticalSeEvaluator::per_ue_se(const EduAssociation& a) const {
  const int K = num_ue();
  const int M = num_groups();
  Eigen::VectorXd se = Eigen::VectorXd::Zero(K);
  for (int k = 0; k < K; ++k) {
    double sig = 0.0, interf = 0.0, nz = 0.0;
    for (int m = 0; m < M; ++m) {
      if (!a(k, m)) continue;
      sig += signal_(k, m);
      nz += noise_gain_(k, m);
      interf += powers_.dot(interference_[static_cast<std::size_t>(m)].row(k).transpose());
    }
    if (nz <= 0.0) continue;
    se(k) = std::log2(1.0 + powers_(k) * sig * sig / (interf + noise_ * nz));
  }
  return se;
}

// --- Q-table ---------------------------------------------------------------

double QTable::get(std::uint64_t state, int action) const {
  const auto it = table_.find(state);
  return it == table_.end() ? 0.0 : it->second[static_cast<std::size_t>(action)];
}

void QTable::set(std::uint64_t state, int action, double value) {
  auto [it, inserted] = table_.try_emplace(state, static_cast<std::size_t>(actions_), 0.0);
  it->second[static_cast<std::size_t>(action)] = value;
}

double QTable::max(std::uint64_t state) const {
  const auto it = table_.find(state);
  if (it == table_.end()) return 0.0;
  return *std::max_element(it->second.begin(), it->second.end());
}

int QTable::greedy(std::uint64_t state, Rng& rng) const {
  const auto it = table_.find(state);
  std::vector<int> ties;
  if (it == table_.end()) {
    for (int a = 0; a < actions_; ++a) ties.push_back(a);
  } else {
    const double best = *std::max_element(it->second.begin(), it->second.end());
    for (int a = 0; a < actions_; ++a)
      if (it->second[static_cast<std::size_t>(a)] == best) ties.push_back(a);
  }
  std::uniform_int_distribution<std::size_t> pick(0, ties.size() - 1);
  return ties[pick(rng)];
}

// --- learning loop ---------------------------------------------------------

namespace {

std::uint64_t agent_state(const EduAssociation& a, int m) {
  std::uint64_t s = 0;
  for (Eigen::Index k = 0; k < a.rows(); ++k)
    if (a(k, m)) s |= std::uint64_t{1} << k;
  return s;
}

std::uint64_t joint_key(const EduAssociation& a) {
  std::uint64_t s = 0;
  int bit = 0;
  for (Eigen::Index m = 0; m < a.cols(); ++m)
    for (Eigen::Index k = 0; k < a.rows(); ++k, ++bit)
      if (a(k, m)) s |= std::uint64_t{1} << bit;
  return s;
}

void apply_action(EduAssociation& a, int m, int action) {
  const auto K = static_cast<int>(a.rows());
  if (action < K)
    a(action, m) = 1;
  else if (action < 2 * K)
    a(action - K, m) = 0;
}

} // namespace

QlResult ql_associate(const SeEvaluator& evaluate, int num_ue, int num_groups, int fronthaul_cap,
                      const QlConfig& config, Rng& rng) {
  if (const auto errors = validate_ql_config(config); !errors.empty())
    throw Error("ql_associate: " + errors.front());
  if (num_ue < 1 || num_ue > 64) throw Error("ql_associate: need 1 <= num_ue <= 64");
  if (num_groups < 1) throw Error("ql_associate: need at least one EDU");

  const int K = num_ue;
  const int M = num_groups;
  const int actions = 2 * K + 1;
  const int horizon = config.horizon > 0 ? config.horizon : 4 * K * M;
  const bool memoize = K * M <= 64;

  QlResult out;
  out.tables.assign(static_cast<std::size_t>(M), QTable(actions));
  std::unordered_map<std::uint64_t, double> cache;
  auto score = [&](const EduAssociation& a) {
    if (memoize) {
      const auto key = joint_key(a);
      if (const auto it = cache.find(key); it != cache.end()) return it->second;
      const double v = evaluate(a);
      ++out.evaluations;
      cache.emplace(key, v);
      return v;
    }
    ++out.evaluations;
    return evaluate(a);
  };

  out.r_sum_all = score(EduAssociation::Ones(K, M));
  out.best = EduAssociation::Zero(K, M);
  out.best_r_sum = score(out.best);

  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> random_action(0, actions - 1);

  auto step = [&](EduAssociation& a, int t, double eps, bool learn) {
    const int m = t % M;
    auto& q = out.tables[static_cast<std::size_t>(m)];
    const auto s = agent_state(a, m);
    const int action = u(rng) < eps ? random_action(rng) : q.greedy(s, rng);
    apply_action(a, m, action);
    const bool chi = fronthaul_ok(a, fronthaul_cap);
    const double r_sum = score(a);
    const double r = reward(chi, r_sum, out.r_sum_all);
    if (learn) {
      const auto next = agent_state(a, m);
      q.set(s, action, q_update(q.get(s, action), r, q.max(next), config.learning_rate, config.discount));
    }
    if (chi && r_sum > out.best_r_sum) {
      out.best_r_sum = r_sum;
      out.best = a;
    }
    return r;
  };

  // The environment starts empty once and carries over between episodes;
  // the Q-tables restart every episode.
  EduAssociation a = EduAssociation::Zero(K, M);
  for (int e = 0; e < config.episodes; ++e) {
    const double eps = epsilon_schedule(e, config.epsilon_init, config.attenuation, actions);
    for (auto& q : out.tables) q = QTable(actions);
    double total = 0.0;
    for (int t = 0; t < horizon; ++t) total += step(a, t, eps, true);
    out.episode_reward.push_back(total);
    out.episode_best.push_back(out.best_r_sum);
  }

  // Greedy rollout of the learned policy.
  for (int t = 0; t < horizon; ++t) step(a, t, 0.0, false);
  return out;
}

OracleResult exhaustive_oracle(const SeEvaluator& evaluate, int num_ue, int num_groups,
                               int fronthaul_cap) {
  const int bits = num_ue * num_groups;
  if (bits > 62 || std::ldexp(1.0, bits) > kMaxOracleStates)
    throw Error("exhaustive_oracle: state space too large to enumerate");
  OracleResult out;
  out.best = EduAssociation::Zero(num_ue, num_groups);
  out.r_sum = -std::numeric_limits<double>::infinity();
  const std::uint64_t total = std::uint64_t{1} << bits;
  EduAssociation a(num_ue, num_groups);
  for (std::uint64_t code = 0; code < total; ++code) {
    int bit = 0;
    for (int m = 0; m < num_groups; ++m)
      for (int k = 0; k < num_ue; ++k, ++bit) a(k, m) = (code >> bit) & 1u;
    if (!fronthaul_ok(a, fronthaul_cap)) continue;
    const double r = evaluate(a);
    ++out.evaluated;
    if (r > out.r_sum) {
      out.r_sum = r;
      out.best = a;
    }
  }
  if (out.evaluated == 0) out.r_sum = 0.0;
  return out;
}

} // namespace cfran
