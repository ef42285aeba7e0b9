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

// Shared fixtures for the test programs.

#ifndef CFRAN_TESTS_SUPPORT_HPP
#define CFRAN_TESTS_SUPPORT_HPP

#include "cfran/channel.hpp"
#include "cfran/rng.hpp"
#include "cfran/scenario.hpp"
#include "cfran/transceiver.hpp"

#include <vector>

namespace cfran::test {

// Random correlation blocks with large-scale gains around `beta_scale`.
inline ChannelStatistics synthetic_stats(int K, int L, int N, Rng& rng, double p = 200.0, int tau = 24,
                                         double noise = 1e-10, double beta_scale = 1e-8,
                                         bool perfect_csi = false) {
  ChannelStatistics s(K, L, N);
  s.noise_mw = noise;
  s.pilot_amplitude = std::sqrt(p * tau);
  std::uniform_real_distribution<double> ang(-1.4, 1.4), spread(0.05, 0.4), gain(0.05, 1.0);
  for (int k = 0; k < K; ++k)
    for (int l = 0; l < L; ++l) {
      const double beta = beta_scale * gain(rng);
      s.beta(k, l) = beta;
      s.R(k, l) = spatial_correlation({ang(rng), ang(rng) / 2, spread(rng), spread(rng)}, N, beta);
      s.sqrt_R(k, l) = hermitian_sqrt(s.R(k, l));
      auto est = mmse_estimator(s.R(k, l), p, tau, noise);
      s.estimator_gain(k, l) = est.gain;
      s.error_cov(k, l) = perfect_csi ? CMatrix::Zero(N, N) : est.error_cov;
    }
  return s;
}

// Realisations with hhat = h.
inline std::vector<ChannelRealization> perfect_batch(const ChannelStatistics& s, int count, Rng& rng) {
  const int K = s.num_ue(), L = s.num_oru(), N = s.antennas();
  std::vector<ChannelRealization> out;
  for (int t = 0; t < count; ++t) {
    ChannelRealization r{CMatrix(L * N, K), CMatrix()};
    for (int k = 0; k < K; ++k)
      for (int l = 0; l < L; ++l) r.h.block(l * N, k, N, 1) = sample_channel(s.sqrt_R(k, l), rng);
    r.hhat = r.h;
    out.push_back(std::move(r));
  }
  return out;
}

inline std::vector<ChannelRealization> estimated_batch(const ChannelStatistics& s, int count, Rng& rng) {
  std::vector<ChannelRealization> out;
  for (int t = 0; t < count; ++t) out.push_back(draw_realization(s, rng, rng));
  return out;
}

// Random association where every UE keeps at least one O-RU.
inline Association random_association(int K, int L, Rng& rng, double keep = 0.5) {
  Association a{Mask::Zero(K, L)};
  std::bernoulli_distribution b(keep);
  std::uniform_int_distribution<int> pick(0, L - 1);
  for (int k = 0; k < K; ++k) {
    for (int l = 0; l < L; ++l) a.delta(k, l) = b(rng);
    a.delta(k, pick(rng)) = 1;
  }
  return a;
}

inline double max_rel_diff(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double scale = std::max({std::abs(a(i)), std::abs(b(i)), 1e-300});
    worst = std::max(worst, std::abs(a(i) - b(i)) / scale);
  }
  return worst;
}

} // namespace cfran::test

#endif // CFRAN_TESTS_SUPPORT_HPP
