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

#ifndef CFRAN_POWER_HPP
#define CFRAN_POWER_HPP

#include "cfran/transceiver.hpp"
#include "cfran/types.hpp"

#include <iosfwd>
#include <vector>

namespace cfran {

/// Fixed uplink power for every UE.
Eigen::VectorXd uplink_power(int num_ue, double p_fixed_mw);

/// Heuristic downlink allocation capped per O-RU:
///   p_k = p_max a_k / sqrt(omega_k) / max_{l in M_k} sum_{i in D_l} a_i sqrt(omega_i),
/// with a_k = 1 / sqrt(sum_{l in M_k} lambda_{k,l}). UEs without a serving
/// O-RU get zero power and are appended to `excluded`.
Eigen::VectorXd downlink_power(const Eigen::MatrixXd& large_scale, const Eigen::VectorXd& omega,
                               const Association& assoc, double p_max_mw,
                               std::vector<int>* excluded = nullptr);

/// sum_{k in D_l} p_k E||wbar_{k,l}||^2 for every O-RU.
Eigen::VectorXd oru_radiated_power(const Eigen::VectorXd& dl_powers,
                                   const Eigen::MatrixXd& slice_power, const Association& assoc);

struct PowerAllocation {
  Eigen::VectorXd uplink;
  Eigen::VectorXd downlink;
  Eigen::VectorXd oru_radiated;
};

/// CSV rows "ue_index,ul_mw,dl_mw" (header included).
void write_power_csv(std::ostream& os, const PowerAllocation& alloc);

} // namespace cfran

#endif // CFRAN_POWER_HPP
