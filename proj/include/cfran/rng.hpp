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

#ifndef CFRAN_RNG_HPP
#define CFRAN_RNG_HPP

#include "cfran/types.hpp"

#include <cstdint>
#include <random>

namespace cfran {

using Rng = std::mt19937_64;

// Independent random streams. Each concern draws from its own engine so that
// enabling one feature never shifts the numbers another feature sees.
enum class Stream : std::uint64_t {
  ue_positions = 1,
  oru_positions = 2,
  shadowing = 3,
  small_scale = 4,
  pilot_noise = 5,
  phase_drift = 6,
  genetic = 7,
  qlearning = 8,
  clustering = 9,
  test = 99,
};

/// Engine seeded from (master_seed, drop_index, stream).
Rng make_rng(std::uint64_t master_seed, std::uint64_t drop_index, Stream stream);

/// Circularly-symmetric complex Gaussian with unit variance, CN(0, 1).
inline cd complex_normal(Rng& rng) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  const double re = n(rng);
  const double im = n(rng);
  return {re, im};
}

inline CVector complex_normal_vector(Eigen::Index size, Rng& rng) {
  CVector v(size);
  for (Eigen::Index i = 0; i < size; ++i) v(i) = complex_normal(rng);
  return v;
}

} // namespace cfran

#endif // CFRAN_RNG_HPP
