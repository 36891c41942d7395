// SPDX-License-Identifier: Apache-2.0
//
// Scenario configuration, path-loss models, per-link variance derivation and
// seeded generation of one channel realization.
//
// Power bookkeeping: thermal noise at every receiver is normalized to the
// identity, powers are carried in linear milliwatts, and each propagation or
// cancellation loss is applied to the per-entry variance of the corresponding
// channel matrix. Transmit covariances then carry the full configured power.
#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fdmimo/numkernel.hpp"

namespace fdmimo {

// Raised when a configuration fails validation.
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

double dbm_to_mw(double dbm);
double mw_to_dbm(double mw);

// Line-of-sight path loss in dB at distance d_km > 0.
double pathloss_los_db(double d_km);

// Non-line-of-sight path loss in dB at distance d_km > 0.
double pathloss_nlos_db(double d_km);

// Full set of scenario parameters. Path losses may be given directly in dB or
// via a distance in km (LOS model for BS<->user links, NLOS for the
// uplink-user -> downlink-user cross links); a direct dB value wins when both
// are present.
struct ScenarioConfig {
  int bs_antennas = 4;     // M
  int user_antennas = 4;   // N
  int uplink_users = 4;    // K_U
  int downlink_users = 4;  // K_D

  double p_d_dbm = 27.0;                  // BS transmit power budget
  std::vector<double> p_u_dbm = {20.0};   // per uplink user, or one shared value

  double c_si_db = 110.0;  // self-interference cancellation capability

  std::optional<double> l_bs_user_db = 91.0;
  std::optional<double> d_bs_user_km;
  std::optional<double> l_cci_db = 97.0;
  std::optional<double> d_cci_km;

  std::uint64_t master_seed = 1;

  // Resolved path losses (direct dB if set, else the distance model).
  double bs_user_loss_db() const;
  double cci_loss_db() const;

  // Per-user uplink budgets in mW, broadcasting a shared scalar to K_U users.
  std::vector<double> uplink_powers_mw() const;
  double bs_power_mw() const;

  // Throws config_error on non-positive dimensions, a P_U list whose length
  // is neither 1 nor K_U, or a link with neither loss nor distance.
  void validate() const;
};

// Per-complex-entry channel variances relative to unit noise power.
struct DerivedVariances {
  double sigma_d_sq;    // BS -> downlink user
  double sigma_u_sq;    // uplink user -> BS
  double sigma_si_sq;   // residual BS -> BS self-interference
  double sigma_cci_sq;  // uplink user -> downlink user cross interference
};

// Per-unit-transmit-power gains, sigma_X^2 = dbm_to_mw(-L_X_db) for each
// link, so that trace-constrained covariances carry the power budget and the
// full-power received level is P_X * sigma_X^2. Throws config_error if any
// variance fails to be strictly positive and finite.
DerivedVariances derive_variances(const ScenarioConfig& cfg);

// One channel realization. Dimensions: h_u[i] is M x N, h_d[j] is N x M,
// g_d is M x M, g_u[i][j] is N x N.
struct ChannelSet {
  std::vector<Matrix> h_u;
  std::vector<Matrix> h_d;
  Matrix g_d;
  std::vector<std::vector<Matrix>> g_u;
};

// SplitMix64 mix of (master_seed, stream); used to derive independent
// per-trial seeds from one master seed.
std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t stream);

// Deterministic stream of N(0,1) / CN(0, sigma^2) draws. Fixed algorithm
// (mt19937_64 + Box-Muller on 53-bit uniforms) so that output is bit-identical
// across platforms for a given seed.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

  // Uniform on (0, 1].
  double uniform_pos();
  // Standard normal.
  double gauss();
  // Circularly-symmetric complex Gaussian with E|x|^2 = variance.
  std::complex<double> cgauss(double variance);
  // Matrix with i.i.d. CN(0, variance) entries, column-major fill order.
  Matrix cgauss_matrix(Eigen::Index rows, Eigen::Index cols, double variance);

 private:
  std::mt19937_64 engine_;
};

// Channels for trial `trial_index` under seed trial_seed(master_seed, index).
// Generation order is fixed (H_U by user, H_D by user, G_D, G_U by uplink
// user then downlink user) so realizations are reproducible bit-for-bit.
ChannelSet gen_channels(const ScenarioConfig& cfg, const DerivedVariances& v,
                        std::uint64_t trial_index);

}  // namespace fdmimo
