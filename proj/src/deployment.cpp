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

#include "cfran/deployment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace cfran {

std::string_view to_string(FitnessMode m) {
  return m == FitnessMode::exact ? "exact" : "pairwise-surrogate";
}

FitnessMode parse_fitness_mode(std::string_view s) {
  if (s == "exact") return FitnessMode::exact;
  if (s == "pairwise-surrogate") return FitnessMode::pairwise_surrogate;
  throw Error("fitness_mode must be 'exact' or 'pairwise-surrogate'");
}

std::vector<std::string> validate_ga_config(const GaConfig& c) {
  std::vector<std::string> errors;
  if (!(c.crossover_rate >= 0.0 && c.crossover_rate <= 1.0))
    errors.emplace_back("crossover_rate must lie in [0, 1]");
  if (!(c.mutation_rate >= 0.0 && c.mutation_rate <= 1.0))
    errors.emplace_back("mutation_rate must lie in [0, 1]");
  if (c.population_size < 2 || c.population_size % 2 != 0)
    errors.emplace_back("population_size must be even and >= 2");
  if (c.generations < 1) errors.emplace_back("generations must be >= 1");
  return errors;
}

std::vector<std::vector<int>> Partition::groups() const { return groups_of(genome, num_groups); }

std::vector<std::vector<int>> groups_of(std::span<const int> genome, int num_groups) {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(num_groups));
  for (std::size_t l = 0; l < genome.size(); ++l) {
    const int g = genome[l];
    if (g < 0 || g >= num_groups) throw Error("partition label out of range");
    out[static_cast<std::size_t>(g)].push_back(static_cast<int>(l));
  }
  return out;
}

bool satisfies_constraints(std::span<const int> genome, int num_groups) {
  if (num_groups < 1 || genome.size() < static_cast<std::size_t>(num_groups)) return false;
  std::vector<int> size(static_cast<std::size_t>(num_groups), 0);
  for (int g : genome) {
    if (g < 0 || g >= num_groups) return false;
    ++size[static_cast<std::size_t>(g)];
  }
  const auto [lo, hi] = std::minmax_element(size.begin(), size.end());
  return *lo >= 1 && *hi - *lo <= 1;
}

std::vector<int> canonical_labels(std::span<const int> genome) {
  std::vector<int> map;
  std::vector<int> out(genome.size());
  for (std::size_t l = 0; l < genome.size(); ++l) {
    const int g = genome[l];
    if (g >= static_cast<int>(map.size())) map.resize(static_cast<std::size_t>(g) + 1, -1);
    if (map[static_cast<std::size_t>(g)] < 0) {
      map[static_cast<std::size_t>(g)] =
          static_cast<int>(std::count_if(map.begin(), map.end(), [](int v) { return v >= 0; }));
    }
    out[l] = map[static_cast<std::size_t>(g)];
  }
  return out;
}

double tuple_count(std::span<const int> genome, int num_groups) {
  double n = 1.0;
  for (const auto& g : groups_of(genome, num_groups)) n *= static_cast<double>(g.size());
  return n;
}

namespace {

double exact_cost(const std::vector<std::vector<int>>& groups, const Eigen::MatrixXd& d) {
  const std::size_t M = groups.size();
  std::vector<int> chosen(M);
  double total = 0.0;
  // Depth-first over one O-RU per group, carrying the partial squared sum.
  auto recurse = [&](auto&& self, std::size_t depth, double partial) -> void {
    if (depth == M) {
      total += std::sqrt(partial);
      return;
    }
    for (int o : groups[depth]) {
      double add = 0.0;
      for (std::size_t prev = 0; prev < depth; ++prev) {
        const double dd = d(chosen[prev], o);
        add += dd * dd;
      }
      chosen[depth] = o;
      self(self, depth + 1, partial + add);
    }
  };
  recurse(recurse, 0, 0.0);
  return total;
}

double surrogate_cost(std::span<const int> genome, const Eigen::MatrixXd& d) {
  double total = 0.0;
  const auto L = static_cast<Eigen::Index>(genome.size());
  for (Eigen::Index p = 0; p < L; ++p)
    for (Eigen::Index q = p + 1; q < L; ++q)
      if (genome[p] != genome[q]) total += d(p, q);
  return total;
}

} // namespace

double fitness(std::span<const int> genome, int num_groups, const Eigen::MatrixXd& oru_distance,
               FitnessMode mode) {
  double cost = 0.0;
  if (mode == FitnessMode::exact) {
    if (tuple_count(genome, num_groups) > kMaxExactTuples)
      throw Error("exact fitness would enumerate more than 1e7 tuples; use pairwise-surrogate");
    cost = exact_cost(groups_of(genome, num_groups), oru_distance);
  } else {
    cost = surrogate_cost(genome, oru_distance);
  }
  if (cost <= 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / cost;
}

namespace {

struct Individual {
  std::vector<int> genome;
  double score = 0.0;
};

std::vector<int> random_balanced(int L, int M, Rng& rng) {
  std::vector<int> g(static_cast<std::size_t>(L));
  for (int l = 0; l < L; ++l) g[static_cast<std::size_t>(l)] = l % M;
  std::shuffle(g.begin(), g.end(), rng);
  return g;
}

std::size_t roulette(const std::vector<double>& weights, double total, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, total);
  const double target = u(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (target < acc) return i;
  }
  return weights.size() - 1;
}

// Swap with a gene of another group; keeps group sizes intact.
void mutate(std::vector<int>& g, double rate, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (u(rng) >= rate) continue;
    for (int attempt = 0; attempt < 64; ++attempt) {
      const std::size_t j = pick(rng);
      if (g[j] != g[i]) {
        std::swap(g[i], g[j]);
        break;
      }
    }
  }
}

bool better(const Individual& a, const Individual& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.genome < b.genome;
}

} // namespace

GaResult ga_optimize(const Eigen::MatrixXd& oru_distance, int num_groups, const GaConfig& config,
                     Rng& rng) {
  const int L = static_cast<int>(oru_distance.rows());
  if (num_groups < 1 || L < num_groups)
    throw Error("ga_optimize: infeasible constraint, need 1 <= num_edu <= num_oru");
  if (const auto errors = validate_ga_config(config); !errors.empty())
    throw Error("ga_optimize: " + errors.front());

  auto score = [&](const std::vector<int>& g) {
    return fitness(g, num_groups, oru_distance, config.fitness_mode);
  };

  GaResult result;
  if (num_groups == 1) {
    result.best.genome.assign(static_cast<std::size_t>(L), 0);
    result.best.num_groups = 1;
    result.best.fitness = score(result.best.genome);
    result.best_fitness.push_back(result.best.fitness);
    return result;
  }

  const auto n_p = static_cast<std::size_t>(config.population_size);
  std::vector<Individual> pop(n_p);
  for (auto& ind : pop) {
    ind.genome = random_balanced(L, num_groups, rng);
    ind.score = score(ind.genome);
  }
  std::sort(pop.begin(), pop.end(), better);
  result.best_fitness.push_back(pop.front().score);

  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> cut(1, L - 1);
  constexpr int kMaxAttempts = 10000;

  for (int gen = 0; gen < config.generations; ++gen) {
    // Selection weights: normalised fitness; infinite scores share the mass.
    std::vector<double> w(n_p);
    const bool any_inf = std::any_of(pop.begin(), pop.end(),
                                     [](const Individual& i) { return std::isinf(i.score); });
    for (std::size_t i = 0; i < n_p; ++i)
      w[i] = any_inf ? (std::isinf(pop[i].score) ? 1.0 : 0.0) : pop[i].score;
    const double total = std::accumulate(w.begin(), w.end(), 0.0);

    std::vector<Individual> children;
    children.reserve(n_p);
    int attempts = 0;
    while (children.size() < n_p) {
      auto c1 = pop[roulette(w, total, rng)].genome;
      auto c2 = pop[roulette(w, total, rng)].genome;
      // Give up on crossover after too many rejected children.
      if (attempts < kMaxAttempts && u(rng) < config.crossover_rate) {
        const int x = cut(rng);
        for (int i = x; i < L; ++i) std::swap(c1[static_cast<std::size_t>(i)], c2[static_cast<std::size_t>(i)]);
      }
      mutate(c1, config.mutation_rate, rng);
      mutate(c2, config.mutation_rate, rng);
      ++attempts;
      if (!satisfies_constraints(c1, num_groups) || !satisfies_constraints(c2, num_groups)) continue;
      children.push_back({std::move(c1), 0.0});
      children.push_back({std::move(c2), 0.0});
    }
    for (auto& c : children) c.score = score(c.genome);
    pop.insert(pop.end(), std::make_move_iterator(children.begin()),
               std::make_move_iterator(children.end()));
    std::sort(pop.begin(), pop.end(), better);
    pop.resize(n_p);
    result.best_fitness.push_back(pop.front().score);
  }

  result.best.genome = canonical_labels(pop.front().genome);
  result.best.num_groups = num_groups;
  result.best.fitness = pop.front().score;
  return result;
}

namespace {

// Minimum-cost perfect assignment on a square cost matrix (Hungarian method).
// Returns column assigned to each row.
std::vector<int> hungarian(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n);
  for (int j = 1; j <= n; ++j) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

// Assigns points to clusters with sizes floor/ceil(L/M) minimising squared distance.
std::vector<int> balanced_assign(const Eigen::MatrixX2d& pts, const Eigen::MatrixX2d& centroids) {
  const int L = static_cast<int>(pts.rows());
  const int M = static_cast<int>(centroids.rows());
  const int q = L / M;
  const int r = L % M;
  const int per = r == 0 ? q : q + 1;
  const int n = M * per;
  // Column c -> cluster c / per; slot c % per == q is an optional extra slot
  // that dummy rows (beyond L) fill at zero cost.
  constexpr double kBig = 1e18;
  Eigen::MatrixXd cost(n, n);
  for (int c = 0; c < n; ++c) {
    const int cluster = c / per;
    const bool extra = r != 0 && c % per == q;
    for (int i = 0; i < n; ++i) {
      if (i < L)
        cost(i, c) = (pts.row(i) - centroids.row(cluster)).squaredNorm();
      else
        cost(i, c) = extra ? 0.0 : kBig;
    }
  }
  const auto a = hungarian(cost);
  std::vector<int> label(static_cast<std::size_t>(L));
  for (int i = 0; i < L; ++i) label[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(i)] / per;
  return label;
}

} // namespace

Partition clustered_baseline(const std::vector<Point3>& oru_positions, int num_groups, Rng& rng) {
  const int L = static_cast<int>(oru_positions.size());
  if (num_groups < 1 || L < num_groups)
    throw Error("clustered_baseline: need 1 <= num_edu <= num_oru");
  Partition out;
  out.num_groups = num_groups;
  if (num_groups == 1) {
    out.genome.assign(static_cast<std::size_t>(L), 0);
    return out;
  }
  if (num_groups == L) {
    out.genome.resize(static_cast<std::size_t>(L));
    std::iota(out.genome.begin(), out.genome.end(), 0);
    return out;
  }

  Eigen::MatrixX2d pts(L, 2);
  for (int l = 0; l < L; ++l) pts.row(l) = oru_positions[static_cast<std::size_t>(l)].head<2>().transpose();

  constexpr int kRestarts = 4;
  constexpr int kMaxIter = 100;
  double best_sse = std::numeric_limits<double>::infinity();
  std::vector<int> best;
  for (int restart = 0; restart < kRestarts; ++restart) {
    // k-means++ seeding.
    Eigen::MatrixX2d centroids(num_groups, 2);
    std::uniform_int_distribution<int> first(0, L - 1);
    centroids.row(0) = pts.row(first(rng));
    for (int c = 1; c < num_groups; ++c) {
      std::vector<double> d2(static_cast<std::size_t>(L));
      for (int i = 0; i < L; ++i) {
        double m = std::numeric_limits<double>::infinity();
        for (int j = 0; j < c; ++j) m = std::min(m, (pts.row(i) - centroids.row(j)).squaredNorm());
        d2[static_cast<std::size_t>(i)] = m;
      }
      const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
      centroids.row(c) = pts.row(total > 0 ? static_cast<int>(roulette(d2, total, rng)) : first(rng));
    }

    std::vector<int> label;
    for (int iter = 0; iter < kMaxIter; ++iter) {
      auto next = balanced_assign(pts, centroids);
      const bool stable = next == label;
      label = std::move(next);
      if (stable) break;
      centroids.setZero();
      Eigen::VectorXd count = Eigen::VectorXd::Zero(num_groups);
      for (int i = 0; i < L; ++i) {
        centroids.row(label[static_cast<std::size_t>(i)]) += pts.row(i);
        count(label[static_cast<std::size_t>(i)]) += 1.0;
      }
      for (int c = 0; c < num_groups; ++c) centroids.row(c) /= count(c);
    }
    double sse = 0.0;
    for (int i = 0; i < L; ++i) sse += (pts.row(i) - centroids.row(label[static_cast<std::size_t>(i)])).squaredNorm();
    if (sse < best_sse - 1e-12) {
      best_sse = sse;
      best = label;
    }
  }
  out.genome = canonical_labels(best);
  return out;
}

} // namespace cfran
