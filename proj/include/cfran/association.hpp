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

#ifndef CFRAN_ASSOCIATION_HPP
#define CFRAN_ASSOCIATION_HPP

#include "cfran/channel.hpp"
#include "cfran/rng.hpp"
#include "cfran/transceiver.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

namespace cfran {

struct QlConfig {
  double learning_rate = 0.1;
  double discount = 0.9;
  double epsilon_init = 0.9;
  double attenuation = 10.0;
  int episodes = 300;
  int horizon = 0; // steps per episode; 0 = 4 K M
};

std::vector<std::string> validate_ql_config(const QlConfig& c);

/// UE x EDU service indicators; row k is the association of UE k.
using EduAssociation = Mask;

/// UE k is served by every O-RU of each EDU it is associated with.
Association to_oru_association(const EduAssociation& edu_assoc, std::span<const int> genome);

/// eps(e) = eps_init (1 - eps_init)^(e / (attenuation * action_count)).
double epsilon_schedule(int episode, double epsilon_init, double attenuation, int action_count);

/// (1 - alpha) q + alpha (reward + discount * max_next).
double q_update(double q, double reward, double max_next, double alpha, double discount);

/// True when no EDU serves more than `cap` UEs.
bool fronthaul_ok(const EduAssociation& edu_assoc, int cap);

inline constexpr double kRewardCap = 1e6;

/// chi * r_sum / (r_sum_all - r_sum); chi * kRewardCap once r_sum reaches r_sum_all.
double reward(bool chi, double r_sum, double r_sum_all);

/// Sum SE of a candidate association.
using SeEvaluator = std::function<double(const EduAssociation&)>;

/// Large-scale-only uplink SE of EDU MMSE with partial association. Each EDU
/// combines with p_k (sum_i p_i R_i + noise I)^-1 hhat_k, so every expectation
/// has a closed form in the correlation and estimate covariances.
class StatisticalSeEvaluator {
public:
  StatisticalSeEvaluator(const ChannelStatistics& stats, std::span<const int> genome,
                         int num_groups, const Eigen::VectorXd& powers, double noise);

  Eigen::VectorXd per_ue_se(const EduAssociation& edu_assoc) const;
  double sum_se(const EduAssociation& edu_assoc) const { return per_ue_se(edu_assoc).sum(); }
  double operator()(const EduAssociation& edu_assoc) const { return sum_se(edu_assoc); }

  int num_ue() const { return static_cast<int>(signal_.rows()); }
  int num_groups() const { return static_cast<int>(signal_.cols()); }

private:
  Eigen::VectorXd powers_;
  double noise_;
  Eigen::MatrixXd signal_;                     // (k, m): tr(Q^-1 B_k)
  Eigen::MatrixXd noise_gain_;                 // (k, m): tr(Q^-1 B_k Q^-1)
  std::vector<Eigen::MatrixXd> interference_;  // [m](k, i): tr(Q^-1 R_i Q^-1 B_k)
};

/// Per-agent Q-table keyed by the agent's K-bit association state.
class QTable {
public:
  explicit QTable(int action_count) : actions_(action_count) {}

  double get(std::uint64_t state, int action) const;
  void set(std::uint64_t state, int action, double value);
  double max(std::uint64_t state) const;
  /// Argmax with uniform random tie-breaking.
  int greedy(std::uint64_t state, Rng& rng) const;

  std::size_t states() const { return table_.size(); }
  int action_count() const { return actions_; }
  const std::unordered_map<std::uint64_t, std::vector<double>>& entries() const { return table_; }

private:
  int actions_;
  std::unordered_map<std::uint64_t, std::vector<double>> table_;
};

struct QlResult {
  EduAssociation best;
  double best_r_sum = 0.0;
  double r_sum_all = 0.0;
  std::vector<double> episode_reward;  // summed reward per episode
  std::vector<double> episode_best;    // best feasible sum SE so far
  std::vector<QTable> tables;          // one per EDU agent
  long evaluations = 0;
};

/// Multi-agent Q-learning association: one agent per EDU, agents act in
/// round-robin; actions are associate UE k, release UE k, or no-op.
QlResult ql_associate(const SeEvaluator& evaluate, int num_ue, int num_groups, int fronthaul_cap,
                      const QlConfig& config, Rng& rng);

struct OracleResult {
  EduAssociation best;
  double r_sum = 0.0;
  long evaluated = 0;
};

inline constexpr double kMaxOracleStates = 1e5;

/// Brute force over all 2^(K M) associations that meet the fronthaul cap.
OracleResult exhaustive_oracle(const SeEvaluator& evaluate, int num_ue, int num_groups,
                               int fronthaul_cap);

} // namespace cfran

#endif // CFRAN_ASSOCIATION_HPP
