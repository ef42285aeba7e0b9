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

#include "cfran/power.hpp"

#include <ostream>

namespace cfran {

Eigen::VectorXd uplink_power(int num_ue, double p_fixed_mw) {
  if (num_ue < 0) throw Error("uplink_power: negative UE count");
  if (!(p_fixed_mw > 0.0)) throw Error("uplink_power: transmit power must be positive");
  return Eigen::VectorXd::Constant(num_ue, p_fixed_mw);
}

Eigen::VectorXd downlink_power(const Eigen::MatrixXd& large_scale, const Eigen::VectorXd& omega,
                               const Association& assoc, double p_max_mw,
                               std::vector<int>* excluded) {
  const int K = assoc.num_ue();
  const int L = assoc.num_oru();
  if (large_scale.rows() != K || large_scale.cols() != L || omega.size() != K)
    throw Error("downlink_power: dimension mismatch");

  // a_k sqrt(omega_k) per UE; zero for UEs nobody serves.
  Eigen::VectorXd a = Eigen::VectorXd::Zero(K);
  Eigen::VectorXd term = Eigen::VectorXd::Zero(K);
  std::vector<std::uint8_t> active(static_cast<std::size_t>(K), 0);
  for (int k = 0; k < K; ++k) {
    double lambda = 0.0;
    bool any = false;
    for (int l = 0; l < L; ++l)
      if (assoc.serves(k, l)) {
        lambda += large_scale(k, l);
        any = true;
      }
    if (!any) {
      if (excluded) excluded->push_back(k);
      continue;
    }
    if (!(omega(k) > 0.0)) throw Error("downlink_power: omega must be positive for served UEs");
    active[static_cast<std::size_t>(k)] = 1;
    a(k) = 1.0 / std::sqrt(lambda);
    term(k) = a(k) * std::sqrt(omega(k));
  }

  Eigen::VectorXd load = Eigen::VectorXd::Zero(L);
  for (int l = 0; l < L; ++l)
    for (int i = 0; i < K; ++i)
      if (active[static_cast<std::size_t>(i)] && assoc.serves(i, l)) load(l) += term(i);

  Eigen::VectorXd p = Eigen::VectorXd::Zero(K);
  for (int k = 0; k < K; ++k) {
    if (!active[static_cast<std::size_t>(k)]) continue;
    double worst = 0.0;
    for (int l = 0; l < L; ++l)
      if (assoc.serves(k, l)) worst = std::max(worst, load(l));
    p(k) = p_max_mw * a(k) / std::sqrt(omega(k)) / worst;
  }
  return p;
}

Eigen::VectorXd oru_radiated_power(const Eigen::VectorXd& dl_powers,
                                   const Eigen::MatrixXd& slice_power, const Association& assoc) {
  const int K = assoc.num_ue();
  const int L = assoc.num_oru();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(L);
  for (int l = 0; l < L; ++l)
    for (int k = 0; k < K; ++k)
      if (assoc.serves(k, l)) out(l) += dl_powers(k) * slice_power(k, l);
  return out;
}

void write_power_csv(std::ostream& os, const PowerAllocation& alloc) {
  os << "ue_index,ul_mw,dl_mw\n";
  os.precision(12);
  for (Eigen::Index k = 0; k < alloc.uplink.size(); ++k)
    os << k << ',' << alloc.uplink(k) << ',' << (k < alloc.downlink.size() ? alloc.downlink(k) : 0.0)
       << '\n';
}

} // namespace cfran
