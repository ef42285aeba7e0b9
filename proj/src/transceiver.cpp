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

#include "cfran/transceiver.hpp"

#include "cfran/power.hpp"

#include <map>

namespace cfran {

// --- association / layout --------------------------------------------------

Association Association::all_serve(int num_ue, int num_oru) {
  return {Mask::Ones(num_ue, num_oru)};
}

std::vector<int> Association::serving_orus(int k) const {
  std::vector<int> out;
  for (int l = 0; l < num_oru(); ++l)
    if (serves(k, l)) out.push_back(l);
  return out;
}

std::vector<int> Association::served_ues(int l) const {
  std::vector<int> out;
  for (int k = 0; k < num_ue(); ++k)
    if (serves(k, l)) out.push_back(k);
  return out;
}

Eigen::VectorXd Association::antenna_mask(int k, int antennas) const {
  Eigen::VectorXd d(static_cast<Eigen::Index>(num_oru()) * antennas);
  for (int l = 0; l < num_oru(); ++l) d.segment(l * antennas, antennas).setConstant(serves(k, l) ? 1.0 : 0.0);
  return d;
}

EduLayout EduLayout::from_partition(std::span<const int> genome, int num_groups) {
  EduLayout out;
  out.orus.resize(static_cast<std::size_t>(num_groups));
  for (std::size_t l = 0; l < genome.size(); ++l) {
    const int g = genome[l];
    if (g < 0 || g >= num_groups) throw Error("EduLayout: partition label out of range");
    out.orus[static_cast<std::size_t>(g)].push_back(static_cast<int>(l));
  }
  return out;
}

EduLayout EduLayout::centralized(int num_oru) {
  EduLayout out;
  out.orus.emplace_back();
  for (int l = 0; l < num_oru; ++l) out.orus.front().push_back(l);
  return out;
}

EduLayout EduLayout::per_oru(int num_oru) {
  EduLayout out;
  for (int l = 0; l < num_oru; ++l) out.orus.push_back({l});
  return out;
}

namespace {

std::vector<int> antenna_rows(const std::vector<int>& orus, int antennas) {
  std::vector<int> rows;
  rows.reserve(orus.size() * static_cast<std::size_t>(antennas));
  for (int l : orus)
    for (int n = 0; n < antennas; ++n) rows.push_back(l * antennas + n);
  return rows;
}

// sum_i p_i C_{i,l} for every O-RU.
std::vector<CMatrix> weighted_error_cov(const ChannelStatistics& stats, const Eigen::VectorXd& p) {
  const int N = stats.antennas();
  std::vector<CMatrix> out(static_cast<std::size_t>(stats.num_oru()), CMatrix::Zero(N, N));
  for (int l = 0; l < stats.num_oru(); ++l)
    for (int i = 0; i < stats.num_ue(); ++i) out[static_cast<std::size_t>(l)] += p(i) * stats.error_cov(i, l);
  return out;
}

// Solves A X = B for Hermitian positive definite A.
CMatrix solve_hpd(CMatrix A, const CMatrix& B, SolverDiagnostics* diag) {
  if (diag) ++diag->solves;
  Eigen::LLT<CMatrix> llt(A);
  if (llt.info() == Eigen::Success) {
    if (diag && llt.rcond() < 1e-12) ++diag->ill_conditioned;
    return llt.solve(B);
  }
  const auto n = A.rows();
  double jitter = 1e-12 * A.trace().real() / static_cast<double>(n);
  for (int attempt = 0; attempt < 8; ++attempt, jitter *= 10.0) {
    A.diagonal().array() += jitter;
    llt.compute(A);
    if (llt.info() == Eigen::Success) {
      if (diag) ++diag->jittered;
      return llt.solve(B);
    }
  }
  throw Error("MMSE solve failed: matrix not positive definite after diagonal loading");
}

} // namespace

CMatrix mrc_combiner(const CMatrix& hhat, const Association& assoc, int antennas) {
  CMatrix v = hhat;
  for (int k = 0; k < assoc.num_ue(); ++k)
    for (int l = 0; l < assoc.num_oru(); ++l)
      if (!assoc.serves(k, l)) v.block(l * antennas, k, antennas, 1).setZero();
  return v;
}

CMatrix mmse_combiner_edu(const CMatrix& hhat, const ChannelStatistics& stats,
                          const Association& assoc, const EduLayout& layout,
                          const Eigen::VectorXd& powers, double noise, SolverDiagnostics* diag) {
  const int N = stats.antennas();
  const int K = stats.num_ue();
  const auto csum = weighted_error_cov(stats, powers);
  CMatrix v = CMatrix::Zero(hhat.rows(), K);

  for (const auto& edu : layout.orus) {
    // UEs sharing the same served subset of this EDU's O-RUs share one system.
    std::map<std::vector<int>, std::vector<int>> by_subset;
    for (int k = 0; k < K; ++k) {
      std::vector<int> served;
      for (int l : edu)
        if (assoc.serves(k, l)) served.push_back(l);
      if (!served.empty()) by_subset[served].push_back(k);
    }
    for (const auto& [served, ues] : by_subset) {
      const auto rows = antenna_rows(served, N);
      const auto n = static_cast<Eigen::Index>(rows.size());
      const CMatrix hs = hhat(rows, Eigen::all);
      CMatrix A = hs * powers.cast<cd>().asDiagonal() * hs.adjoint();
      for (std::size_t j = 0; j < served.size(); ++j)
        A.block(static_cast<Eigen::Index>(j) * N, static_cast<Eigen::Index>(j) * N, N, N) +=
            csum[static_cast<std::size_t>(served[j])];
      A.diagonal().array() += noise;
      CMatrix rhs(n, static_cast<Eigen::Index>(ues.size()));
      for (std::size_t j = 0; j < ues.size(); ++j) rhs.col(static_cast<Eigen::Index>(j)) = hs.col(ues[j]);
      const CMatrix x = solve_hpd(std::move(A), rhs, diag);
      for (std::size_t j = 0; j < ues.size(); ++j)
        v(rows, ues[j]) = powers(ues[j]) * x.col(static_cast<Eigen::Index>(j));
    }
  }
  return v;
}

CMatrix mmse_combiner_centralized(const CMatrix& hhat, const ChannelStatistics& stats,
                                  const Association& assoc, const Eigen::VectorXd& powers,
                                  double noise, SolverDiagnostics* diag) {
  const int N = stats.antennas();
  const int K = stats.num_ue();
  const int L = stats.num_oru();
  const auto LN = hhat.rows();
  const auto csum = weighted_error_cov(stats, powers);

  CMatrix full = hhat * powers.cast<cd>().asDiagonal() * hhat.adjoint();
  for (int l = 0; l < L; ++l) full.block(l * N, l * N, N, N) += csum[static_cast<std::size_t>(l)];

  std::map<std::vector<std::uint8_t>, std::vector<int>> by_mask;
  for (int k = 0; k < K; ++k) {
    std::vector<std::uint8_t> pattern(static_cast<std::size_t>(L));
    for (int l = 0; l < L; ++l) pattern[static_cast<std::size_t>(l)] = assoc.delta(k, l);
    by_mask[pattern].push_back(k);
  }

  CMatrix v = CMatrix::Zero(LN, K);
  for (const auto& [pattern, ues] : by_mask) {
    const Eigen::VectorXd d = assoc.antenna_mask(ues.front(), N);
    if (d.sum() == 0.0) continue;
    const auto D = d.cast<cd>().asDiagonal();
    CMatrix A = D * full * D;
    A.diagonal().array() += noise;
    CMatrix rhs(LN, static_cast<Eigen::Index>(ues.size()));
    for (std::size_t j = 0; j < ues.size(); ++j) rhs.col(static_cast<Eigen::Index>(j)) = D * hhat.col(ues[j]);
    const CMatrix x = solve_hpd(std::move(A), rhs, diag);
    for (std::size_t j = 0; j < ues.size(); ++j)
      v.col(ues[j]) = powers(ues[j]) * (D * x.col(static_cast<Eigen::Index>(j)));
  }
  return v;
}

CMatrix mmse_combiner_local(const CMatrix& hhat, const ChannelStatistics& stats,
                            const Association& assoc, const Eigen::VectorXd& powers, double noise,
                            SolverDiagnostics* diag) {
  const int N = stats.antennas();
  const int K = stats.num_ue();
  CMatrix v = CMatrix::Zero(hhat.rows(), K);
  for (int l = 0; l < stats.num_oru(); ++l) {
    const auto ues = assoc.served_ues(l);
    if (ues.empty()) continue;
    const auto hl = hhat.middleRows(l * N, N);
    CMatrix A = hl * powers.cast<cd>().asDiagonal() * hl.adjoint();
    for (int i = 0; i < K; ++i) A += powers(i) * stats.error_cov(i, l);
    A.diagonal().array() += noise;
    CMatrix rhs(N, static_cast<Eigen::Index>(ues.size()));
    for (std::size_t j = 0; j < ues.size(); ++j) rhs.col(static_cast<Eigen::Index>(j)) = hl.col(ues[j]);
    const CMatrix x = solve_hpd(std::move(A), rhs, diag);
    for (std::size_t j = 0; j < ues.size(); ++j)
      v.block(l * N, ues[j], N, 1) = powers(ues[j]) * x.col(static_cast<Eigen::Index>(j));
  }
  return v;
}

CMatrix scheme_combiners(Scheme scheme, const CMatrix& hhat, const ChannelStatistics& stats,
                         const Association& assoc, const EduLayout& edu_layout,
                         const Eigen::VectorXd& powers, double noise, SolverDiagnostics* diag) {
  switch (scheme) {
  case Scheme::joint_mmse:
  case Scheme::p_mmse:
    return mmse_combiner_centralized(hhat, stats, assoc, powers, noise, diag);
  case Scheme::joint_mrc:
  case Scheme::lp_mrc:
    return mrc_combiner(hhat, assoc, stats.antennas());
  case Scheme::l_mmse:
  case Scheme::lp_mmse:
    return mmse_combiner_local(hhat, stats, assoc, powers, noise, diag);
  case Scheme::edu_mmse:
  case Scheme::edu_pmmse:
    return mmse_combiner_edu(hhat, stats, assoc, edu_layout, powers, noise, diag);
  }
  throw Error("unknown scheme");
}

EduLayout scheme_layout(Scheme scheme, int num_oru, const EduLayout& edu_layout) {
  switch (processing_of(scheme)) {
  case Processing::centralized:
    return EduLayout::centralized(num_oru);
  case Processing::local:
    return EduLayout::per_oru(num_oru);
  case Processing::edu:
    return edu_layout;
  }
  throw Error("unknown processing");
}

double instantaneous_uplink_sinr(const CVector& v, int k, const CMatrix& hhat,
                                 const ChannelStatistics& stats, const Eigen::VectorXd& powers,
                                 double noise) {
  const int N = stats.antennas();
  const double signal = powers(k) * std::norm(v.dot(hhat.col(k)));
  double denom = noise * v.squaredNorm();
  for (int i = 0; i < stats.num_ue(); ++i) {
    if (i != k) denom += powers(i) * std::norm(v.dot(hhat.col(i)));
    for (int l = 0; l < stats.num_oru(); ++l) {
      const auto vl = v.segment(l * N, N);
      denom += powers(i) * vl.dot(stats.error_cov(i, l) * vl).real();
    }
  }
  return denom > 0.0 ? signal / denom : 0.0;
}

// --- normalisation ---------------------------------------------------------

namespace {

PrecoderNormalization normalization_from_sums(const Eigen::MatrixXd& slice_sum, int count,
                                              const Association& assoc) {
  const auto K = slice_sum.rows();
  PrecoderNormalization out;
  out.slice_power = slice_sum / static_cast<double>(count);
  out.mean_norm = out.slice_power.rowwise().sum();
  out.omega = Eigen::VectorXd::Zero(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    if (!(out.mean_norm(k) > 0.0)) {
      out.excluded.push_back(static_cast<int>(k));
      out.slice_power.row(k).setZero();
      continue;
    }
    out.slice_power.row(k) /= out.mean_norm(k);
    for (int l = 0; l < assoc.num_oru(); ++l)
      if (assoc.serves(static_cast<int>(k), l)) out.omega(k) = std::max(out.omega(k), out.slice_power(k, l));
  }
  return out;
}

} // namespace

PrecoderNormalization normalize_precoders(std::span<const CMatrix> w_prime,
                                          const Association& assoc, int antennas) {
  if (w_prime.empty()) throw Error("normalize_precoders: empty batch");
  const int K = assoc.num_ue();
  const int L = assoc.num_oru();
  Eigen::MatrixXd slice_sum = Eigen::MatrixXd::Zero(K, L);
  for (const auto& w : w_prime)
    for (int k = 0; k < K; ++k)
      for (int l = 0; l < L; ++l) slice_sum(k, l) += w.block(l * antennas, k, antennas, 1).squaredNorm();
  return normalization_from_sums(slice_sum, static_cast<int>(w_prime.size()), assoc);
}

// --- accumulators ----------------------------------------------------------

UplinkAccumulator::UplinkAccumulator(int num_ue, int num_groups)
    : gain_sum_(CVector::Zero(num_ue)), abs2_sum_(Eigen::MatrixXd::Zero(num_ue, num_ue)),
      norm_sum_(Eigen::VectorXd::Zero(num_ue)), stream_sum_(Eigen::MatrixXd::Zero(num_ue, num_groups)) {}

void UplinkAccumulator::add_centralized(const CMatrix& v, const CMatrix& h, const Association& assoc,
                                        int antennas, const Eigen::VectorXd& powers, double noise) {
  const int K = assoc.num_ue();
  CMatrix dv(v.rows(), K);
  for (int k = 0; k < K; ++k) dv.col(k) = assoc.antenna_mask(k, antennas).cast<cd>().asDiagonal() * v.col(k);
  const CMatrix g = dv.adjoint() * h; // (k, i) = v_k^H D_k h_i
  const Eigen::MatrixXd g2 = g.cwiseAbs2();
  const Eigen::VectorXd norms = dv.colwise().squaredNorm().transpose();
  gain_sum_ += g.diagonal();
  abs2_sum_ += g2;
  norm_sum_ += norms;
  stream_sum_.col(0) += g2 * powers + noise * norms;
  ++count_;
}

void UplinkAccumulator::add_edu(const CMatrix& v, const CMatrix& h, const EduLayout& layout,
                                int antennas, const Eigen::VectorXd& powers, double noise) {
  const auto K = v.cols();
  if (layout.num_groups() != stream_sum_.cols()) throw Error("UplinkAccumulator: layout size mismatch");
  CMatrix g = CMatrix::Zero(K, K);
  for (int m = 0; m < layout.num_groups(); ++m) {
    const auto rows = antenna_rows(layout.orus[static_cast<std::size_t>(m)], antennas);
    const CMatrix vm = v(rows, Eigen::all);
    const CMatrix gm = vm.adjoint() * h(rows, Eigen::all);
    const Eigen::VectorXd nm = vm.colwise().squaredNorm().transpose();
    g += gm;
    norm_sum_ += nm;
    stream_sum_.col(m) += gm.cwiseAbs2() * powers + noise * nm;
  }
  gain_sum_ += g.diagonal();
  abs2_sum_ += g.cwiseAbs2();
  ++count_;
}

double quantization_distortion(double stream_power, int bits) {
  if (bits < 1) throw Error("quantization_distortion: bits must be >= 1");
  if (!(stream_power > 0.0)) return 0.0;
  const double sd = std::sqrt(stream_power / 2.0);
  const double step = 8.0 * sd / std::pow(2.0, bits);
  return 2.0 * step * step / 12.0;
}

double se_from_sinr(double sinr) {
  if (!(sinr >= 0.0)) throw DomainError("se_from_sinr: SINR must be non-negative");
  return std::log2(1.0 + sinr);
}

namespace {

SinrReport empty_report(Eigen::Index K) {
  SinrReport r;
  r.signal = r.interference = r.noise = r.quantization = r.sinr = r.se = Eigen::VectorXd::Zero(K);
  r.active.assign(static_cast<std::size_t>(K), 0);
  return r;
}

} // namespace

SinrReport UplinkAccumulator::finish(const Eigen::VectorXd& powers, double noise,
                                     std::optional<int> quantizer_bits) const {
  if (count_ < 1) throw Error("UplinkAccumulator: no samples");
  const auto K = gain_sum_.size();
  const double n = count_;
  auto r = empty_report(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    const double norm = norm_sum_(k) / n;
    if (!(norm > 0.0)) continue;
    r.active[static_cast<std::size_t>(k)] = 1;
    r.signal(k) = powers(k) * std::norm(gain_sum_(k) / n);
    for (Eigen::Index i = 0; i < K; ++i)
      if (i != k) r.interference(k) += powers(i) * abs2_sum_(k, i) / n;
    r.noise(k) = noise * norm;
    if (quantizer_bits)
      for (Eigen::Index m = 0; m < stream_sum_.cols(); ++m)
        r.quantization(k) += quantization_distortion(stream_sum_(k, m) / n, *quantizer_bits);
    const double denom = r.interference(k) + r.noise(k) + r.quantization(k);
    if (!(denom > 0.0)) throw Error("uplink SINR: non-positive denominator");
    r.sinr(k) = r.signal(k) / denom;
    r.se(k) = se_from_sinr(r.sinr(k));
  }
  return r;
}

DownlinkAccumulator::DownlinkAccumulator(int num_ue, int num_oru, int antennas)
    : antennas_(antennas), gain_sum_(CVector::Zero(num_ue)),
      abs2_sum_(Eigen::MatrixXd::Zero(num_ue, num_ue)),
      slice_sum_(Eigen::MatrixXd::Zero(num_ue, num_oru)) {}

void DownlinkAccumulator::add_centralized(const CMatrix& w_prime, const CMatrix& h,
                                          const Association& assoc) {
  const int K = assoc.num_ue();
  const int N = antennas_;
  CMatrix dw(w_prime.rows(), K);
  for (int i = 0; i < K; ++i) dw.col(i) = assoc.antenna_mask(i, N).cast<cd>().asDiagonal() * w_prime.col(i);
  const CMatrix g = h.adjoint() * dw; // (k, i) = h_k^H D_i w'_i
  gain_sum_ += g.diagonal();
  abs2_sum_ += g.cwiseAbs2();
  for (int i = 0; i < K; ++i)
    for (int l = 0; l < assoc.num_oru(); ++l) slice_sum_(i, l) += dw.block(l * N, i, N, 1).squaredNorm();
  ++count_;
}

void DownlinkAccumulator::add_edu(const CMatrix& w_prime, const CMatrix& h, const EduLayout& layout) {
  const auto K = w_prime.cols();
  const int N = antennas_;
  CMatrix g = CMatrix::Zero(K, K);
  for (const auto& edu : layout.orus) {
    const auto rows = antenna_rows(edu, N);
    g += h(rows, Eigen::all).adjoint() * w_prime(rows, Eigen::all);
  }
  gain_sum_ += g.diagonal();
  abs2_sum_ += g.cwiseAbs2();
  for (Eigen::Index i = 0; i < K; ++i)
    for (Eigen::Index l = 0; l < slice_sum_.cols(); ++l)
      slice_sum_(i, l) += w_prime.block(l * N, i, N, 1).squaredNorm();
  ++count_;
}

PrecoderNormalization DownlinkAccumulator::normalization(const Association& assoc) const {
  if (count_ < 1) throw Error("DownlinkAccumulator: no samples");
  return normalization_from_sums(slice_sum_, count_, assoc);
}

SinrReport DownlinkAccumulator::finish(const Eigen::VectorXd& powers, double noise) const {
  if (count_ < 1) throw Error("DownlinkAccumulator: no samples");
  const auto K = gain_sum_.size();
  const double n = count_;
  const Eigen::VectorXd c = slice_sum_.rowwise().sum() / n;
  auto r = empty_report(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < K; ++i)
      if (c(i) > 0.0) total += powers(i) * abs2_sum_(k, i) / n / c(i);
    r.noise(k) = noise;
    if (!(c(k) > 0.0) || !(powers(k) > 0.0)) {
      r.interference(k) = total;
      continue;
    }
    r.active[static_cast<std::size_t>(k)] = 1;
    r.signal(k) = powers(k) * std::norm(gain_sum_(k) / n) / c(k);
    r.interference(k) = std::max(total - r.signal(k), 0.0);
    r.sinr(k) = r.signal(k) / (r.interference(k) + noise);
    r.se(k) = se_from_sinr(r.sinr(k));
  }
  return r;
}

// --- batch wrappers --------------------------------------------------------

SinrReport uplink_sinr(const UplinkInputs& in, std::span<const ChannelRealization> batch,
                       SolverDiagnostics* diag) {
  if (batch.size() < 2) throw Error("uplink_sinr: need at least two realisations");
  const auto& stats = *in.stats;
  const auto layout = scheme_layout(in.scheme, stats.num_oru(), *in.edu_layout);
  UplinkAccumulator acc(stats.num_ue(), layout.num_groups());
  for (const auto& r : batch) {
    const CMatrix v = scheme_combiners(in.scheme, r.hhat, stats, *in.assoc, *in.edu_layout,
                                       in.powers, in.noise, diag);
    if (processing_of(in.scheme) == Processing::centralized)
      acc.add_centralized(v, r.h, *in.assoc, stats.antennas(), in.powers, in.noise);
    else
      acc.add_edu(v, r.h, layout, stats.antennas(), in.powers, in.noise);
  }
  return acc.finish(in.powers, in.noise, in.quantizer_bits);
}

DownlinkResult downlink_sinr(const DownlinkInputs& in, std::span<const ChannelRealization> batch,
                             std::span<const CMatrix> precoder_csi, SolverDiagnostics* diag) {
  if (batch.size() < 2) throw Error("downlink_sinr: need at least two realisations");
  if (!precoder_csi.empty() && precoder_csi.size() != batch.size())
    throw Error("downlink_sinr: precoder CSI batch size mismatch");
  const auto& stats = *in.stats;
  const auto layout = scheme_layout(in.scheme, stats.num_oru(), *in.edu_layout);
  DownlinkAccumulator acc(stats.num_ue(), stats.num_oru(), stats.antennas());
  for (std::size_t t = 0; t < batch.size(); ++t) {
    const CMatrix& csi = precoder_csi.empty() ? batch[t].hhat : precoder_csi[t];
    const CMatrix w = scheme_combiners(in.scheme, csi, stats, *in.assoc, *in.edu_layout,
                                       in.ul_powers, in.ul_noise, diag);
    if (processing_of(in.scheme) == Processing::centralized)
      acc.add_centralized(w, batch[t].h, *in.assoc);
    else
      acc.add_edu(w, batch[t].h, layout);
  }
  return finish_downlink(acc, stats, *in.assoc, in.p_max, in.noise);
}

DownlinkResult finish_downlink(const DownlinkAccumulator& acc, const ChannelStatistics& stats,
                               const Association& assoc, double p_max, double noise) {
  DownlinkResult out;
  out.normalization = acc.normalization(assoc);
  // UEs with an all-zero precoder do not transmit and load no O-RU.
  Association active = assoc;
  for (int k : out.normalization.excluded) active.delta.row(k).setZero();
  out.powers = downlink_power(stats.beta, out.normalization.omega, active, p_max);
  out.oru_radiated = oru_radiated_power(out.powers, out.normalization.slice_power, active);
  out.report = acc.finish(out.powers, noise);
  return out;
}

} // namespace cfran
