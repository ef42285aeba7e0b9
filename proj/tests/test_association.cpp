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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

#include "cfran/association.hpp"
#include "cfran/power.hpp"

#include <cmath>

using namespace cfran;

TEST_CASE("exploration schedule") {
  CHECK(epsilon_schedule(0, 0.9, 10.0, 9) == doctest::Approx(0.9));
  CHECK(epsilon_schedule(10, 0.5, 1.0, 10) == doctest::Approx(0.25));
  CHECK(epsilon_schedule(20, 0.5, 2.0, 5) == doctest::Approx(0.125));
  double prev = 1.0;
  for (int e = 0; e < 50; ++e) {
    const double eps = epsilon_schedule(e, 0.7, 10.0, 9);
    CHECK(eps < prev);
    prev = eps;
  }
}

TEST_CASE("Q update") {
  CHECK(q_update(5.0, 2.0, 7.0, 1.0, 0.0) == 2.0);
  CHECK(q_update(5.0, 2.0, 7.0, 0.0, 0.9) == 5.0);
  CHECK(q_update(0.0, 1.0, 2.0, 0.5, 0.9) == doctest::Approx(1.4));
  auto rng = make_rng(1, 0, Stream::test);
  std::uniform_real_distribution<double> u(-10.0, 10.0), p(0.0, 1.0);
  for (int t = 0; t < 1000; ++t) {
    const double q = u(rng), r = u(rng), m = u(rng), a = p(rng), k = p(rng);
    CHECK(q_update(q, r, m, a, k) == doctest::Approx(q + a * (r + k * m - q)).epsilon(1e-12));
  }
}

TEST_CASE("fronthaul constraint") {
  EduAssociation a = EduAssociation::Ones(4, 2);
  CHECK(fronthaul_ok(a, 4));
  CHECK(fronthaul_ok(a, 9));
  CHECK_FALSE(fronthaul_ok(a, 3));
  EduAssociation balanced = EduAssociation::Zero(4, 2);
  balanced(0, 0) = balanced(1, 0) = balanced(2, 1) = balanced(3, 1) = 1;
  CHECK(fronthaul_ok(balanced, 2));
  balanced(2, 0) = 1;
  CHECK_FALSE(fronthaul_ok(balanced, 2));
  CHECK(fronthaul_ok(EduAssociation::Zero(3, 2), 0));
}

TEST_CASE("reward") {
  CHECK(reward(false, 10.0, 20.0) == 0.0);
  CHECK(reward(false, 20.0, 20.0) == 0.0);
  CHECK(reward(true, 10.0, 20.0) == doctest::Approx(1.0));
  CHECK(reward(true, 30.0, 40.0) == doctest::Approx(3.0));
  CHECK(reward(true, 40.0, 40.0) == kRewardCap);
  CHECK(reward(true, 41.0, 40.0) == kRewardCap);
  double prev = -1.0;
  for (double r = 0.0; r < 39.9; r += 0.5) {
    CHECK(reward(true, r, 40.0) > prev);
    prev = reward(true, r, 40.0);
  }
}

TEST_CASE("EDU association expands to whole EDUs") {
  EduAssociation a = EduAssociation::Zero(3, 2);
  a(0, 1) = 1;
  a(2, 0) = a(2, 1) = 1;
  const std::vector<int> genome{0, 1, 0, 1, 1};
  const auto o = to_oru_association(a, genome);
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 5; ++l) CHECK(o.serves(k, l) == bool(a(k, genome[l])));
}

TEST_CASE("statistical evaluator closed form") {
  // One UE, one O-RU, R = beta I: SINR = p N b / sigma^2, b the estimate variance.
  const int N = 3;
  const double beta = 2e-9, p = 200.0, s2 = 1e-10;
  const int tau = 24;
  ChannelStatistics s(1, 1, N);
  s.beta(0, 0) = beta;
  s.R(0, 0) = beta * CMatrix::Identity(N, N);
  s.sqrt_R(0, 0) = std::sqrt(beta) * CMatrix::Identity(N, N);
  const auto est = mmse_estimator(s.R(0, 0), p, tau, s2);
  s.estimator_gain(0, 0) = est.gain;
  s.error_cov(0, 0) = est.error_cov;
  const StatisticalSeEvaluator eval(s, std::vector<int>{0}, 1, uplink_power(1, p), s2);
  const double b = p * tau * beta * beta / (p * tau * beta + s2);
  CHECK(eval(EduAssociation::Ones(1, 1)) == doctest::Approx(std::log2(1.0 + p * N * b / s2)).epsilon(1e-12));
  CHECK(eval(EduAssociation::Zero(1, 1)) == 0.0);
}

namespace {

struct Toy {
  Rng rng = make_rng(3, 0, Stream::test);
  ChannelStatistics stats = cfran::test::synthetic_stats(4, 4, 2, rng);
  std::vector<int> genome{0, 1, 0, 1};
  StatisticalSeEvaluator eval{stats, genome, 2, uplink_power(4, 200.0), 1e-10};
};

} // namespace

TEST_CASE("single UE, single EDU learns to associate") {
  Toy toy;
  const auto s = cfran::test::synthetic_stats(1, 2, 2, toy.rng);
  const StatisticalSeEvaluator eval(s, std::vector<int>{0, 0}, 1, uplink_power(1, 200.0), 1e-10);
  QlConfig c;
  c.episodes = 20;
  const auto r = ql_associate(std::cref(eval), 1, 1, 1, c, toy.rng);
  CHECK(r.best(0, 0) == 1);
  CHECK(r.best_r_sum > 0.0);
}

TEST_CASE("exhaustive oracle") {
  Toy toy;
  SUBCASE("no feasible non-empty association") {
    const auto o = exhaustive_oracle(std::cref(toy.eval), 4, 2, 0);
    CHECK((o.best == 0).all());
    CHECK(o.r_sum == 0.0);
  }
  SUBCASE("single EDU") {
    const auto o = exhaustive_oracle(std::cref(toy.eval), 4, 1, 4);
    CHECK(o.evaluated == 16);
  }
  SUBCASE("uncapped optimum is at least all-serve") {
    const auto o = exhaustive_oracle(std::cref(toy.eval), 4, 2, 4);
    CHECK(o.evaluated == 256);
    CHECK(o.r_sum >= toy.eval(EduAssociation::Ones(4, 2)) - 1e-12);
  }
  CHECK_THROWS(exhaustive_oracle(std::cref(toy.eval), 9, 2, 4));
}

TEST_CASE("Q-learning approaches the oracle on the toy instance") {
  Toy toy;
  const auto oracle = exhaustive_oracle(std::cref(toy.eval), 4, 2, 2);
  REQUIRE(oracle.r_sum > 0.0);
  QlConfig c;
  c.episodes = 500;
  int hits = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto rng = make_rng(seed, 0, Stream::qlearning);
    const auto r = ql_associate(std::cref(toy.eval), 4, 2, 2, c, rng);
    CHECK(fronthaul_ok(r.best, 2));
    CHECK((r.best != 0).any());
    CHECK(r.best_r_sum == doctest::Approx(toy.eval(r.best)));
    CHECK(r.episode_reward.size() == 500);
    if (r.best_r_sum >= 0.95 * oracle.r_sum) ++hits;
  }
  CHECK(hits >= 9);
}

TEST_CASE("greedy choice ignores positive affine rescaling") {
  QTable a(5), b(5);
  auto rng = make_rng(4, 0, Stream::test);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (std::uint64_t s = 0; s < 20; ++s)
    for (int x = 0; x < 5; ++x) {
      const double v = u(rng);
      a.set(s, x, v);
      b.set(s, x, 2.5 * v + 7.0);
    }
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto r1 = make_rng(9, s, Stream::test), r2 = make_rng(9, s, Stream::test);
    CHECK(a.greedy(s, r1) == b.greedy(s, r2));
  }
  CHECK(a.get(99, 0) == 0.0);
  CHECK(a.max(99) == 0.0);
}

TEST_CASE("config validation") {
  QlConfig c;
  CHECK(validate_ql_config(c).empty());
  c.learning_rate = 1.5;
  CHECK(!validate_ql_config(c).empty());
  c = {};
  c.episodes = 0;
  CHECK(!validate_ql_config(c).empty());
}
