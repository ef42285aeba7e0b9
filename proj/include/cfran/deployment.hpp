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

#ifndef CFRAN_DEPLOYMENT_HPP
#define CFRAN_DEPLOYMENT_HPP

#include "cfran/rng.hpp"
#include "cfran/types.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace cfran {

enum class FitnessMode {
  exact,              // sum over one-O-RU-per-EDU tuples
  pairwise_surrogate, // sum over cross-EDU O-RU pairs
};

std::string_view to_string(FitnessMode m);
FitnessMode parse_fitness_mode(std::string_view s);

struct GaConfig {
  double crossover_rate = 0.8;
  double mutation_rate = 0.05;
  int population_size = 50;
  int generations = 200;
  FitnessMode fitness_mode = FitnessMode::pairwise_surrogate;
};

std::vector<std::string> validate_ga_config(const GaConfig& c);

/// O-RU -> EDU assignment. genome[l] is the EDU index of O-RU l.
struct Partition {
  std::vector<int> genome;
  int num_groups = 0;
  double fitness = 0.0;

  std::vector<std::vector<int>> groups() const;
};

/// Groups cover every O-RU exactly once, none is empty, sizes differ by at most one.
bool satisfies_constraints(std::span<const int> genome, int num_groups);

std::vector<std::vector<int>> groups_of(std::span<const int> genome, int num_groups);

/// Relabels groups in order of first appearance so equal partitions compare equal.
std::vector<int> canonical_labels(std::span<const int> genome);

/// Number of one-per-group tuples the exact fitness enumerates.
double tuple_count(std::span<const int> genome, int num_groups);

inline constexpr double kMaxExactTuples = 1e7;

/// Reciprocal interleaving cost. Exact mode: sum over every tuple holding one
/// O-RU per EDU of sqrt(sum of squared pairwise distances in the tuple).
/// Surrogate: sum of distances over all O-RU pairs in different EDUs.
/// Returns +inf when the cost is zero; throws when exact mode would
/// enumerate more than kMaxExactTuples tuples.
double fitness(std::span<const int> genome, int num_groups, const Eigen::MatrixXd& oru_distance,
               FitnessMode mode);

struct GaResult {
  Partition best;
  std::vector<double> best_fitness; // after each generation, index 0 = initial population
};

/// Genetic interleaving search over balanced partitions.
GaResult ga_optimize(const Eigen::MatrixXd& oru_distance, int num_groups, const GaConfig& config,
                     Rng& rng);

/// Balanced k-means on the horizontal O-RU coordinates (contiguous clusters).
Partition clustered_baseline(const std::vector<Point3>& oru_positions, int num_groups, Rng& rng);

} // namespace cfran

#endif // CFRAN_DEPLOYMENT_HPP
