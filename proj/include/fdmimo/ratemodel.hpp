// SPDX-License-Identifier: Apache-2.0
//
// Achievable-rate formulas for the full-duplex cell: per-user uplink rates
// under successive decoding with residual self-interference, per-user
// downlink dirty-paper rates with cross interference, cross-interference
// whitening, and the joint sum-rate objective.
//
// Index conventions (fixed, no order search):
//   uplink decoding order: user 0 first, so user i suffers interference from
//   users k > i only;
//   downlink encoding order: user K_D-1 first, so user j suffers interference
//   from users k < j only.
#pragma once

#include <vector>

#include "fdmimo/channel.hpp"
#include "fdmimo/numkernel.hpp"

namespace fdmimo {

// Transmit covariances. q_u[i] and q_du[j] are N x N; q_d[j] is M x M and is
// populated by the dual-to-broadcast transform (empty until then).
struct CovarianceSet {
  std::vector<Matrix> q_u;
  std::vector<Matrix> q_du;
  std::vector<Matrix> q_d;
};

// Per-downlink-user whitened quantities. w[j] = I + sum_i G_U[i][j] Q_U[i]
// G_U[i][j]^H is the CCI-plus-noise covariance; hbar[j] = w[j]^{-1/2} H_D[j].
struct EffectiveDownlink {
  std::vector<Matrix> w;
  std::vector<Matrix> hbar;
};

// Raised by interference_ratios when the desired-signal power is zero.
class undefined_ratio_error : public numeric_error {
 public:
  explicit undefined_ratio_error(const std::string& what)
      : numeric_error(what) {}
};

EffectiveDownlink whiten(const ChannelSet& ch, const std::vector<Matrix>& q_u);

// Self-interference covariance at the BS receiver: G_D (sum_j Q_D[j]) G_D^H.
Matrix si_covariance(const ChannelSet& ch, const std::vector<Matrix>& q_d);

// Rate of uplink user i under minimum mean-square-error successive decoding;
// requires cov.q_d (the self-interference term depends on it).
double uplink_user_rate(const ChannelSet& ch, const CovarianceSet& cov, int i);

// Telescoped uplink sum rate: one log-det ratio instead of K_U of them.
double uplink_sum_rate(const ChannelSet& ch, const CovarianceSet& cov);

// Per-user downlink dirty-paper rates with explicit cross interference.
// Diagnostic path: solvers work in the dual domain below.
RealVector downlink_dpc_rates(const ChannelSet& ch, const CovarianceSet& cov);

// Dual multiple-access sum rate log2 |I + sum_j hbar[j]^H Q_DU[j] hbar[j]|.
double dual_uplink_sum_rate(const EffectiveDownlink& eff,
                            const std::vector<Matrix>& q_du);

// Joint objective f = uplink_sum_rate + dual_uplink_sum_rate.
double total_objective(const ChannelSet& ch, const EffectiveDownlink& eff,
                       const CovarianceSet& cov);

struct InterferenceRatios {
  double rho_si_db;
  double rho_cci_db;
};

// Received-interference to desired-signal power ratios in dB (-inf when the
// interference power is exactly zero).
InterferenceRatios interference_ratios(const ChannelSet& ch,
                                       const CovarianceSet& cov);

}  // namespace fdmimo
