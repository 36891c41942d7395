// SPDX-License-Identifier: Apache-2.0
//
// Dual-domain machinery: transform dual multiple-access covariances into
// broadcast covariances with the same per-user rates and sum power, and build
// the effective self-interference channels that make the objective an
// explicit difference of concave functions.
#pragma once

#include <cstddef>
#include <vector>

#include "fdmimo/channel.hpp"
#include "fdmimo/numkernel.hpp"
#include "fdmimo/ratemodel.hpp"

namespace fdmimo {

// Raised when the per-user transform fails; carries the offending user.
class transform_error : public numeric_error {
 public:
  transform_error(std::size_t user_index, const std::string& what)
      : numeric_error(what), user_index(user_index) {}
  std::size_t user_index;
};

// Per-user factor matrices of the covariance transform. For user j,
// b_inv_sqrt(j) * hbar[j]^H * a_inv_sqrt(j) = f[j] diag(lam[j]) fbar[j]^H is
// a thin SVD with r = min(M, N) columns.
struct DualityFactors {
  std::vector<Matrix> a;     // N x N, I + interference seen by user j
  std::vector<Matrix> b;     // M x M, I + dual interference from users k > j
  std::vector<Matrix> f;     // M x r, left singular vectors
  std::vector<Matrix> fbar;  // N x r, right singular vectors
  std::vector<RealVector> lam;
};

struct MacToBcResult {
  std::vector<Matrix> q_d;
  DualityFactors factors;
};

// Transforms dual covariances q_du to broadcast covariances q_d, processing
// users in ascending order so each a[j] references already-transformed users
// k < j. Preserves per-user rates and total transmit power.
MacToBcResult mac_to_bc(const EffectiveDownlink& eff,
                        const std::vector<Matrix>& q_du);

// Effective self-interference channels gbar[j] = G_D b[j]^{-1/2} f[j]
// fbar[j]^H a[j]^{1/2} (M x N). Satisfies
// sum_j gbar[j] q_du[j] gbar[j]^H = G_D (sum_j q_d[j]) G_D^H.
std::vector<Matrix> effective_si_channels(const ChannelSet& ch,
                                          const EffectiveDownlink& eff,
                                          const std::vector<Matrix>& q_du,
                                          const DualityFactors& factors);

}  // namespace fdmimo
