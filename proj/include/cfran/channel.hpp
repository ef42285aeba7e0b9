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

#ifndef CFRAN_CHANNEL_HPP
#define CFRAN_CHANNEL_HPP

#include "cfran/rng.hpp"
#include "cfran/scenario.hpp"
#include "cfran/types.hpp"

#include <cmath>
#include <iosfwd>
#include <vector>

namespace cfran {

// --- large-scale fading ----------------------------------------------------

/// Urban 2 GHz channel gain in dB: -30.5 - 36.7 log10(d), d in metres.
template <typename Scalar>
Scalar pathloss_db(Scalar distance_m) {
  if (!(distance_m > Scalar(0)) || !std::isfinite(distance_m))
    throw DomainError("pathloss: distance must be positive and finite");
  return Scalar(-30.5) - Scalar(36.7) * std::log10(distance_m);
}

template <typename Scalar>
Scalar pathloss_linear(Scalar distance_m) {
  return std::pow(Scalar(10), pathloss_db(distance_m) / Scalar(10));
}

/// d^-exponent, the power-law alternative.
double pathloss_power_law(double distance_m, double exponent);

/// Zero-mean Gaussian shadowing sample in dB.
double sample_shadowing(Rng& rng, double sigma_db);

struct LargeScale {
  Eigen::MatrixXd beta;      // K x L, linear
  Eigen::MatrixXd shadow_db; // K x L
};

LargeScale sample_large_scale(const ScenarioConfig& config, const Topology& topo, Rng& shadow_rng);

// --- spatial correlation ---------------------------------------------------

struct QuadratureRule {
  Eigen::VectorXd nodes;   // on [-1, 1]
  Eigen::VectorXd weights; // sum to 2
};

/// n-point Gauss-Legendre rule (Golub-Welsch).
QuadratureRule gauss_legendre(int n);

/// Nominal multipath direction and Gaussian angular spreads, all in radians.
struct AngularSpread {
  double azimuth = 0.0;
  double elevation = 0.0;
  double sd_azimuth = 0.0;
  double sd_elevation = 0.0;
};

/// Azimuth (bearing) and elevation (negative below the array) of the UE as
/// seen from the O-RU.
AngularSpread nominal_direction(const Point3& oru, const Point3& ue);

/// N x N correlation of a half-wavelength ULA under a truncated (+-4 sd)
/// Gaussian angular density, scaled so that every diagonal entry equals beta.
/// Uses `nodes` Gauss-Legendre points per axis; exactly Hermitian Toeplitz.
CMatrix spatial_correlation(const AngularSpread& angles, int antennas, double beta, int nodes = 40);

/// Hermitian PSD square root through the eigendecomposition. Throws
/// DomainError when an eigenvalue is below -1e-10 * trace.
CMatrix hermitian_sqrt(const CMatrix& R);

/// h = R^{1/2} g with g ~ CN(0, I).
CVector sample_channel(const CMatrix& sqrt_R, Rng& rng);

// --- MMSE channel estimation -----------------------------------------------

/// Per-block linear MMSE estimator for y = sqrt(p tau) h + n, n ~ CN(0, noise I).
struct BlockEstimator {
  CMatrix gain;      // hhat = gain * y
  CMatrix error_cov; // C = R - p tau R Psi^-1 R
};

BlockEstimator mmse_estimator(const CMatrix& R, double pilot_power_mw, int pilot_length,
                              double noise_mw);

struct ChannelEstimate {
  CVector hhat;
  CMatrix error_cov;
};

/// Draws the pilot observation for the true channel h and returns the estimate.
ChannelEstimate mmse_estimate(const CVector& h, const CMatrix& R, double pilot_power_mw,
                              int pilot_length, double noise_mw, Rng& noise_rng);

/// Per-drop second-order statistics for every (UE, O-RU) block.
class ChannelStatistics {
public:
  ChannelStatistics() = default;
  ChannelStatistics(int num_ue, int num_oru, int antennas);

  int num_ue() const { return K_; }
  int num_oru() const { return L_; }
  int antennas() const { return N_; }

  CMatrix& R(int k, int l) { return R_[idx(k, l)]; }
  const CMatrix& R(int k, int l) const { return R_[idx(k, l)]; }
  CMatrix& sqrt_R(int k, int l) { return sqrt_R_[idx(k, l)]; }
  const CMatrix& sqrt_R(int k, int l) const { return sqrt_R_[idx(k, l)]; }
  CMatrix& estimator_gain(int k, int l) { return gain_[idx(k, l)]; }
  const CMatrix& estimator_gain(int k, int l) const { return gain_[idx(k, l)]; }
  CMatrix& error_cov(int k, int l) { return C_[idx(k, l)]; }
  const CMatrix& error_cov(int k, int l) const { return C_[idx(k, l)]; }
  /// Covariance of the estimate, R - C.
  CMatrix estimate_cov(int k, int l) const { return R(k, l) - error_cov(k, l); }

  Eigen::MatrixXd beta;      // K x L
  Eigen::MatrixXd shadow_db; // K x L
  double pilot_amplitude = 0.0; // sqrt(p tau)
  double noise_mw = 0.0;

private:
  std::size_t idx(int k, int l) const { return static_cast<std::size_t>(k) * L_ + l; }
  int K_ = 0, L_ = 0, N_ = 0;
  std::vector<CMatrix> R_, sqrt_R_, gain_, C_;
};

/// Correlation matrices, square roots and estimators for one drop.
ChannelStatistics channel_statistics(const ScenarioConfig& config, const Topology& topo,
                                     const LargeScale& large_scale);

/// One small-scale realisation: columns are UEs, rows the stacked LN antennas.
struct ChannelRealization {
  CMatrix h;
  CMatrix hhat;
};

ChannelRealization draw_realization(const ChannelStatistics& stats, Rng& fading_rng,
                                    Rng& pilot_noise_rng);

/// Rotates each O-RU's N-row block by exp(j theta_l), theta_l ~ U[-max_deg, max_deg].
/// Returns the applied phases in radians.
std::vector<double> apply_phase_drift(CMatrix& stacked, int antennas, double max_deg, Rng& rng);

/// Row-major CSV dumps: "ue,oru,beta_linear,beta_db,shadow_db" and
/// "ue,oru,row,col,re,im".
void write_beta_csv(std::ostream& os, const ChannelStatistics& stats);
void write_correlation_csv(std::ostream& os, const ChannelStatistics& stats);

} // namespace cfran

#endif // CFRAN_CHANNEL_HPP
