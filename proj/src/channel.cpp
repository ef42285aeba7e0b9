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

#include "cfran/channel.hpp"

#include <Eigen/Eigenvalues>

#include <ostream>
#include <sstream>

namespace cfran {

double pathloss_power_law(double distance_m, double exponent) {
  if (!(distance_m > 0.0) || !std::isfinite(distance_m))
    throw DomainError("pathloss: distance must be positive and finite");
  return std::pow(distance_m, -exponent);
}

double sample_shadowing(Rng& rng, double sigma_db) {
  if (sigma_db <= 0.0) return 0.0;
  std::normal_distribution<double> n(0.0, sigma_db);
  return n(rng);
}

LargeScale sample_large_scale(const ScenarioConfig& config, const Topology& topo, Rng& shadow_rng) {
  const int K = topo.num_ue();
  const int L = topo.num_oru();
  LargeScale out{Eigen::MatrixXd(K, L), Eigen::MatrixXd(K, L)};
  for (int k = 0; k < K; ++k) {
    for (int l = 0; l < L; ++l) {
      const double d = topo.ue_oru_distance(k, l);
      const double f = sample_shadowing(shadow_rng, config.shadow_sigma_db);
      const double base_db = config.pathloss_model == PathlossModel::urban_2ghz
                                 ? pathloss_db(d)
                                 : lin2db(pathloss_power_law(d, config.pathloss_exponent));
      out.shadow_db(k, l) = f;
      out.beta(k, l) = db2lin(base_db + f);
    }
  }
  return out;
}

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: need at least one node");
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    const double b = i / std::sqrt(4.0 * i * i - 1.0);
    jacobi(i, i - 1) = b;
    jacobi(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  QuadratureRule rule;
  rule.nodes = es.eigenvalues();
  rule.weights = 2.0 * es.eigenvectors().row(0).transpose().array().square();
  return rule;
}

AngularSpread nominal_direction(const Point3& oru, const Point3& ue) {
  const Point3 d = ue - oru;
  const double horizontal = std::hypot(d.x(), d.y());
  AngularSpread a;
  a.azimuth = std::atan2(d.y(), d.x());
  a.elevation = std::atan2(d.z(), horizontal);
  return a;
}

namespace {

// Nodes and normalised weights of a +-4 sd truncated Gaussian; a point mass
// when the spread is zero.
void truncated_gaussian_rule(double mean, double sd, const QuadratureRule& gl,
                             Eigen::VectorXd& x, Eigen::VectorXd& w) {
  if (sd <= 0.0) {
    x = Eigen::VectorXd::Constant(1, mean);
    w = Eigen::VectorXd::Ones(1);
    return;
  }
  const double half = 4.0 * sd;
  x = mean + half * gl.nodes.array();
  w = gl.weights.array() * (-0.5 * ((x.array() - mean) / sd).square()).exp();
  w /= w.sum();
}

} // namespace

CMatrix spatial_correlation(const AngularSpread& a, int antennas, double beta, int nodes) {
  if (antennas < 1) throw DomainError("spatial_correlation: need at least one antenna");
  if (!std::isfinite(a.azimuth) || !std::isfinite(a.elevation) || !std::isfinite(a.sd_azimuth) ||
      !std::isfinite(a.sd_elevation) || !std::isfinite(beta))
    throw DomainError("spatial_correlation: non-finite input");

  const auto gl = gauss_legendre(nodes);
  Eigen::VectorXd az, waz, el, wel;
  truncated_gaussian_rule(a.azimuth, a.sd_azimuth, gl, az, waz);
  truncated_gaussian_rule(a.elevation, a.sd_elevation, gl, el, wel);

  // Phase slope per antenna offset at every (azimuth, elevation) node.
  Eigen::MatrixXd slope(az.size(), el.size());
  Eigen::MatrixXd weight(az.size(), el.size());
  for (Eigen::Index i = 0; i < az.size(); ++i)
    for (Eigen::Index j = 0; j < el.size(); ++j) {
      slope(i, j) = kPi * std::sin(az(i)) * std::cos(el(j));
      weight(i, j) = waz(i) * wel(j);
    }

  CVector lag(antennas);
  lag(0) = beta;
  for (int d = 1; d < antennas; ++d) {
    cd acc = 0.0;
    for (Eigen::Index i = 0; i < slope.rows(); ++i)
      for (Eigen::Index j = 0; j < slope.cols(); ++j)
        acc += weight(i, j) * std::polar(1.0, d * slope(i, j));
    lag(d) = beta * acc;
  }

  CMatrix R(antennas, antennas);
  for (int m = 0; m < antennas; ++m)
    for (int n = 0; n < antennas; ++n)
      R(m, n) = m >= n ? lag(m - n) : std::conj(lag(n - m));
  return R;
}

CMatrix hermitian_sqrt(const CMatrix& R) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(R);
  if (es.info() != Eigen::Success) throw DomainError("hermitian_sqrt: eigendecomposition failed");
  const double trace = R.trace().real();
  Eigen::VectorXd ev = es.eigenvalues();
  if (ev.minCoeff() < -1e-10 * std::max(trace, 0.0) - 1e-300)
    throw DomainError("hermitian_sqrt: matrix is not positive semidefinite");
  // Round-off eigenvalues would otherwise contribute sqrt(eps)-sized directions.
  const double floor = 1e-13 * std::max(ev.maxCoeff(), 0.0) * static_cast<double>(ev.size());
  ev = (ev.array() <= floor).select(0.0, ev).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

CVector sample_channel(const CMatrix& sqrt_R, Rng& rng) {
  return sqrt_R * complex_normal_vector(sqrt_R.cols(), rng);
}

BlockEstimator mmse_estimator(const CMatrix& R, double pilot_power_mw, int pilot_length,
                              double noise_mw) {
  if (!(noise_mw > 0.0)) throw DomainError("mmse_estimator: noise power must be positive");
  const double ptau = pilot_power_mw * pilot_length;
  const auto N = R.rows();
  const CMatrix psi = ptau * R + noise_mw * CMatrix::Identity(N, N);
  // psi^-1 R; its adjoint is R psi^-1 since both factors are Hermitian.
  const CMatrix psi_inv_R = psi.llt().solve(R);
  BlockEstimator est;
  est.gain = std::sqrt(ptau) * psi_inv_R.adjoint();
  CMatrix C = R - ptau * R * psi_inv_R;
  est.error_cov = 0.5 * (C + C.adjoint());
  return est;
}

ChannelEstimate mmse_estimate(const CVector& h, const CMatrix& R, double pilot_power_mw,
                              int pilot_length, double noise_mw, Rng& noise_rng) {
  const auto est = mmse_estimator(R, pilot_power_mw, pilot_length, noise_mw);
  const double amp = std::sqrt(pilot_power_mw * pilot_length);
  const CVector y = amp * h + std::sqrt(noise_mw) * complex_normal_vector(h.size(), noise_rng);
  return {est.gain * y, est.error_cov};
}

ChannelStatistics::ChannelStatistics(int num_ue, int num_oru, int antennas)
    : beta(Eigen::MatrixXd::Zero(num_ue, num_oru)),
      shadow_db(Eigen::MatrixXd::Zero(num_ue, num_oru)), K_(num_ue), L_(num_oru), N_(antennas),
      R_(static_cast<std::size_t>(num_ue) * num_oru),
      sqrt_R_(R_.size()), gain_(R_.size()), C_(R_.size()) {}

ChannelStatistics channel_statistics(const ScenarioConfig& config, const Topology& topo,
                                     const LargeScale& large_scale) {
  const int K = topo.num_ue();
  const int L = topo.num_oru();
  const int N = config.antennas_per_oru;
  ChannelStatistics stats(K, L, N);
  stats.beta = large_scale.beta;
  stats.shadow_db = large_scale.shadow_db;
  stats.noise_mw = config.noise_power_mw();
  stats.pilot_amplitude = std::sqrt(config.ul_power_mw * config.pilot_count);

  for (int k = 0; k < K; ++k) {
    for (int l = 0; l < L; ++l) {
      auto a = nominal_direction(topo.oru_positions[l], topo.ue_positions[k]);
      a.sd_azimuth = deg2rad(config.asd_azimuth_deg);
      a.sd_elevation = deg2rad(config.asd_elevation_deg);
      stats.R(k, l) = spatial_correlation(a, N, stats.beta(k, l));
      try {
        stats.sqrt_R(k, l) = hermitian_sqrt(stats.R(k, l));
      } catch (const DomainError& e) {
        std::ostringstream msg;
        msg << e.what() << " (ue " << k << ", oru " << l << ")";
        throw DomainError(msg.str());
      }
      auto est = mmse_estimator(stats.R(k, l), config.ul_power_mw, config.pilot_count,
                                stats.noise_mw);
      stats.estimator_gain(k, l) = std::move(est.gain);
      stats.error_cov(k, l) = std::move(est.error_cov);
    }
  }
  return stats;
}

ChannelRealization draw_realization(const ChannelStatistics& stats, Rng& fading_rng,
                                    Rng& pilot_noise_rng) {
  const int K = stats.num_ue();
  const int L = stats.num_oru();
  const int N = stats.antennas();
  const double noise_amp = std::sqrt(stats.noise_mw);
  ChannelRealization out{CMatrix(L * N, K), CMatrix(L * N, K)};
  for (int k = 0; k < K; ++k) {
    for (int l = 0; l < L; ++l) {
      const CVector h = sample_channel(stats.sqrt_R(k, l), fading_rng);
      const CVector y = stats.pilot_amplitude * h + noise_amp * complex_normal_vector(N, pilot_noise_rng);
      out.h.block(l * N, k, N, 1) = h;
      out.hhat.block(l * N, k, N, 1) = stats.estimator_gain(k, l) * y;
    }
  }
  return out;
}

std::vector<double> apply_phase_drift(CMatrix& stacked, int antennas, double max_deg, Rng& rng) {
  if (max_deg < 0.0) throw DomainError("apply_phase_drift: negative bound");
  const auto L = static_cast<int>(stacked.rows() / antennas);
  std::vector<double> theta(static_cast<std::size_t>(L), 0.0);
  if (max_deg == 0.0) return theta;
  const double bound = deg2rad(max_deg);
  std::uniform_real_distribution<double> u(-bound, bound);
  for (int l = 0; l < L; ++l) {
    theta[l] = u(rng);
    stacked.middleRows(l * antennas, antennas) *= std::polar(1.0, theta[l]);
  }
  return theta;
}

void write_beta_csv(std::ostream& os, const ChannelStatistics& stats) {
  os << "ue,oru,beta_linear,beta_db,shadow_db\n";
  os.precision(12);
  for (int k = 0; k < stats.num_ue(); ++k)
    for (int l = 0; l < stats.num_oru(); ++l)
      os << k << ',' << l << ',' << stats.beta(k, l) << ',' << lin2db(stats.beta(k, l)) << ','
         << stats.shadow_db(k, l) << '\n';
}

void write_correlation_csv(std::ostream& os, const ChannelStatistics& stats) {
  os << "ue,oru,row,col,re,im\n";
  os.precision(12);
  for (int k = 0; k < stats.num_ue(); ++k)
    for (int l = 0; l < stats.num_oru(); ++l) {
      const auto& R = stats.R(k, l);
      for (Eigen::Index m = 0; m < R.rows(); ++m)
        for (Eigen::Index n = 0; n < R.cols(); ++n)
          os << k << ',' << l << ',' << m << ',' << n << ',' << R(m, n).real() << ','
             << R(m, n).imag() << '\n';
    }
}

} // namespace cfran
