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

#ifndef CFRAN_TRANSCEIVER_HPP
#define CFRAN_TRANSCEIVER_HPP

#include "cfran/channel.hpp"
#include "cfran/scenario.hpp"
#include "cfran/types.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

namespace cfran {

/// UE <-> O-RU service indicators delta(k, l).
struct Association {
  Mask delta; // K x L

  static Association all_serve(int num_ue, int num_oru);

  int num_ue() const { return static_cast<int>(delta.rows()); }
  int num_oru() const { return static_cast<int>(delta.cols()); }
  bool serves(int k, int l) const { return delta(k, l) != 0; }
  /// O-RUs serving UE k.
  std::vector<int> serving_orus(int k) const;
  /// UEs served by O-RU l.
  std::vector<int> served_ues(int l) const;
  /// Diagonal of D_k over the stacked L*N antennas.
  Eigen::VectorXd antenna_mask(int k, int antennas) const;
};

/// O-RUs handled jointly by each EDU.
struct EduLayout {
  std::vector<std::vector<int>> orus;

  static EduLayout from_partition(std::span<const int> genome, int num_groups);
  static EduLayout centralized(int num_oru);
  static EduLayout per_oru(int num_oru);
  int num_groups() const { return static_cast<int>(orus.size()); }
};

/// Counters filled by the MMSE solvers.
struct SolverDiagnostics {
  int solves = 0;
  int ill_conditioned = 0; // reciprocal condition number below 1e-12
  int jittered = 0;        // needed the diagonal-loading fallback
};

// --- combiners / precoders -------------------------------------------------
// All return an (L*N) x K matrix; column k is the stacked vector of UE k and
// is exactly zero on antennas with delta(k, l) = 0.

CMatrix mrc_combiner(const CMatrix& hhat, const Association& assoc, int antennas);

/// MMSE combining computed separately inside every EDU: for UE k and EDU m,
/// v = p_k (sum_i p_i D (hhat_i hhat_i^H + C_i) D + noise I)^-1 D hhat_k.
CMatrix mmse_combiner_edu(const CMatrix& hhat, const ChannelStatistics& stats,
                          const Association& assoc, const EduLayout& layout,
                          const Eigen::VectorXd& powers, double noise,
                          SolverDiagnostics* diag = nullptr);

/// Joint MMSE over all L*N antennas, formed and solved at full size with the
/// explicit masks D_k (reference route for the one-EDU case).
CMatrix mmse_combiner_centralized(const CMatrix& hhat, const ChannelStatistics& stats,
                                  const Association& assoc, const Eigen::VectorXd& powers,
                                  double noise, SolverDiagnostics* diag = nullptr);

/// Per-O-RU N x N MMSE (reference route for one EDU per O-RU).
CMatrix mmse_combiner_local(const CMatrix& hhat, const ChannelStatistics& stats,
                            const Association& assoc, const Eigen::VectorXd& powers, double noise,
                            SolverDiagnostics* diag = nullptr);

/// Unnormalised EDU MMSE precoders. The downlink precoder uses the uplink
/// powers and uplink noise (duality), so it coincides with the combiner.
inline CMatrix mmse_precoder_edu(const CMatrix& hhat, const ChannelStatistics& stats,
                                 const Association& assoc, const EduLayout& layout,
                                 const Eigen::VectorXd& ul_powers, double ul_noise,
                                 SolverDiagnostics* diag = nullptr) {
  return mmse_combiner_edu(hhat, stats, assoc, layout, ul_powers, ul_noise, diag);
}

/// Combiners of the given scheme for one realisation. The association must
/// already be the one the scheme uses (all-serve for non-DCC schemes).
CMatrix scheme_combiners(Scheme scheme, const CMatrix& hhat, const ChannelStatistics& stats,
                         const Association& assoc, const EduLayout& edu_layout,
                         const Eigen::VectorXd& powers, double noise,
                         SolverDiagnostics* diag = nullptr);

/// Layout a scheme is evaluated with: one group, one per O-RU, or the EDU partition.
EduLayout scheme_layout(Scheme scheme, int num_oru, const EduLayout& edu_layout);

/// p_k |v^H hhat_k|^2 / v^H (sum_{i != k} p_i hhat_i hhat_i^H + sum_i p_i C_i + noise I) v.
double instantaneous_uplink_sinr(const CVector& v, int k, const CMatrix& hhat,
                                 const ChannelStatistics& stats, const Eigen::VectorXd& powers,
                                 double noise);

// --- precoder normalisation ------------------------------------------------

struct PrecoderNormalization {
  Eigen::VectorXd mean_norm;   // E||w'_k||^2
  Eigen::MatrixXd slice_power; // K x L, E||wbar_{k,l}||^2 after normalisation
  Eigen::VectorXd omega;       // max over serving O-RUs of slice_power
  std::vector<int> excluded;   // UEs whose precoder is identically zero
};

/// wbar_k = w'_k / sqrt(E||w'_k||^2) with expectations over the batch.
PrecoderNormalization normalize_precoders(std::span<const CMatrix> w_prime,
                                          const Association& assoc, int antennas);

// --- use-and-then-forget SINR ----------------------------------------------

struct SinrReport {
  Eigen::VectorXd signal;
  Eigen::VectorXd interference;
  Eigen::VectorXd noise;
  Eigen::VectorXd quantization;
  Eigen::VectorXd sinr;
  Eigen::VectorXd se;
  std::vector<std::uint8_t> active; // 0 = UE not served on this link

  double sum_se() const { return se.sum(); }
};

/// Sample-mean accumulator for the uplink SINR expressions.
class UplinkAccumulator {
public:
  UplinkAccumulator(int num_ue, int num_groups);

  /// Single-processor form: gains v_k^H D_k h_i with explicit masks.
  void add_centralized(const CMatrix& v, const CMatrix& h, const Association& assoc, int antennas,
                       const Eigen::VectorXd& powers, double noise);
  /// Per-EDU form: per-EDU detections summed at the combining unit.
  void add_edu(const CMatrix& v, const CMatrix& h, const EduLayout& layout, int antennas,
               const Eigen::VectorXd& powers, double noise);

  /// quantizer_bits adds the distortion of a uniform mid-rise quantizer
  /// (+-4 sd range) applied to every per-EDU detected stream.
  SinrReport finish(const Eigen::VectorXd& powers, double noise,
                    std::optional<int> quantizer_bits = std::nullopt) const;

  int samples() const { return count_; }

private:
  int count_ = 0;
  CVector gain_sum_;           // sum of v_k^H D_k h_k
  Eigen::MatrixXd abs2_sum_;   // (k, i): sum of |v_k^H D_k h_i|^2
  Eigen::VectorXd norm_sum_;   // sum of ||D_k v_k||^2
  Eigen::MatrixXd stream_sum_; // (k, m): sum of E|detected stream|^2 per EDU
};

/// Sample-mean accumulator for the downlink SINR expressions. Works on the
/// unnormalised precoders; normalisation and power are applied in finish().
class DownlinkAccumulator {
public:
  DownlinkAccumulator(int num_ue, int num_oru, int antennas);

  void add_centralized(const CMatrix& w_prime, const CMatrix& h, const Association& assoc);
  void add_edu(const CMatrix& w_prime, const CMatrix& h, const EduLayout& layout);

  PrecoderNormalization normalization(const Association& assoc) const;
  /// powers are the per-UE downlink powers applied to the normalised precoders.
  SinrReport finish(const Eigen::VectorXd& powers, double noise) const;

  int samples() const { return count_; }

private:
  int antennas_;
  int count_ = 0;
  CVector gain_sum_;          // sum of h_k^H D_k w'_k
  Eigen::MatrixXd abs2_sum_;  // (k, i): sum of |h_k^H D_i w'_i|^2
  Eigen::MatrixXd slice_sum_; // (k, l): sum of ||w'_{k,l}||^2
};

struct UplinkInputs {
  Scheme scheme;
  const ChannelStatistics* stats;
  const Association* assoc; // association of the scheme
  const EduLayout* edu_layout;
  Eigen::VectorXd powers;
  double noise;
  std::optional<int> quantizer_bits;
};

/// Uplink SINR of a scheme over a batch of realisations (needs >= 2).
SinrReport uplink_sinr(const UplinkInputs& in, std::span<const ChannelRealization> batch,
                       SolverDiagnostics* diag = nullptr);

struct DownlinkResult {
  SinrReport report;
  Eigen::VectorXd powers;
  PrecoderNormalization normalization;
  Eigen::VectorXd oru_radiated; // sum_k p_k E||wbar_{k,l}||^2 per O-RU
};

struct DownlinkInputs {
  Scheme scheme;
  const ChannelStatistics* stats;
  const Association* assoc;
  const EduLayout* edu_layout;
  Eigen::VectorXd ul_powers; // enter the precoder
  double ul_noise;
  double p_max;
  double noise;
};

/// Downlink SINR with the heuristic per-O-RU-capped power allocation.
/// precoder_csi, when non-empty, supplies the estimates the precoders are
/// computed from (e.g. phase-drifted), one matrix per realisation.
DownlinkResult downlink_sinr(const DownlinkInputs& in, std::span<const ChannelRealization> batch,
                             std::span<const CMatrix> precoder_csi = {},
                             SolverDiagnostics* diag = nullptr);

// --- quantizer and SE ------------------------------------------------------

/// Uniform mid-rise quantizer per real/imaginary component with range
/// +-4 sd of the batch. nullopt bits = identity.
/// Per-UE powers from the accumulated precoder statistics, then the SINR.
DownlinkResult finish_downlink(const DownlinkAccumulator& acc, const ChannelStatistics& stats,
                               const Association& assoc, double p_max, double noise);

template <typename Scalar>
CVec<Scalar> quantize(const CVec<Scalar>& samples, std::optional<int> bits) {
  if (!bits || samples.size() == 0) return samples;
  const Scalar power = samples.squaredNorm() / static_cast<Scalar>(samples.size());
  const Scalar sd = std::sqrt(power / Scalar(2));
  if (sd <= Scalar(0)) return samples;
  const Scalar limit = Scalar(4) * sd;
  const Scalar step = Scalar(2) * limit / std::pow(Scalar(2), static_cast<Scalar>(*bits));
  auto q = [&](Scalar x) {
    const Scalar lo = -limit + step / Scalar(2);
    const Scalar hi = limit - step / Scalar(2);
    const Scalar y = step * (std::floor(x / step) + Scalar(0.5));
    return std::clamp(y, lo, hi);
  };
  CVec<Scalar> out(samples.size());
  for (Eigen::Index i = 0; i < samples.size(); ++i)
    out(i) = {q(samples(i).real()), q(samples(i).imag())};
  return out;
}

/// Mean squared error per complex sample of the quantizer above for a
/// stream of the given mean power (granular noise, step^2 / 12 per component).
double quantization_distortion(double stream_power, int bits);

/// log2(1 + sinr).
double se_from_sinr(double sinr);

} // namespace cfran

#endif // CFRAN_TRANSCEIVER_HPP
