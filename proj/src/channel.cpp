// SPDX-License-Identifier: Apache-2.0

#include "fdmimo/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace fdmimo {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void require_positive(double x, const char* name) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::domain_error(std::string(name) + " must be positive and finite");
  }
}

}  // namespace

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

double mw_to_dbm(double mw) {
  if (!(mw > 0.0)) {
    throw std::domain_error("mw_to_dbm: power must be positive");
  }
  return 10.0 * std::log10(mw);
}

double pathloss_los_db(double d_km) {
  require_positive(d_km, "pathloss_los_db: distance");
  return 103.4 + 24.2 * std::log10(d_km);
}

double pathloss_nlos_db(double d_km) {
  require_positive(d_km, "pathloss_nlos_db: distance");
  return 145.4 + 37.5 * std::log10(d_km);
}

double ScenarioConfig::bs_user_loss_db() const {
  if (l_bs_user_db) return *l_bs_user_db;
  if (d_bs_user_km) return pathloss_los_db(*d_bs_user_km);
  throw config_error("BS<->user link needs l_bs_user_db or d_bs_user_km");
}

double ScenarioConfig::cci_loss_db() const {
  if (l_cci_db) return *l_cci_db;
  if (d_cci_km) return pathloss_nlos_db(*d_cci_km);
  throw config_error("cross link needs l_cci_db or d_cci_km");
}

std::vector<double> ScenarioConfig::uplink_powers_mw() const {
  std::vector<double> out;
  out.reserve(uplink_users);
  for (int i = 0; i < uplink_users; ++i) {
    double dbm = p_u_dbm.size() == 1 ? p_u_dbm[0]
                                     : p_u_dbm[static_cast<std::size_t>(i)];
    out.push_back(dbm_to_mw(dbm));
  }
  return out;
}

double ScenarioConfig::bs_power_mw() const { return dbm_to_mw(p_d_dbm); }

void ScenarioConfig::validate() const {
  if (bs_antennas < 1) throw config_error("bs_antennas must be >= 1");
  if (user_antennas < 1) throw config_error("user_antennas must be >= 1");
  if (uplink_users < 1) throw config_error("uplink_users must be >= 1");
  if (downlink_users < 1) throw config_error("downlink_users must be >= 1");
  if (p_u_dbm.size() != 1 &&
      p_u_dbm.size() != static_cast<std::size_t>(uplink_users)) {
    throw config_error("p_u_dbm needs 1 or uplink_users entries");
  }
  for (double p : p_u_dbm) {
    if (!std::isfinite(p)) throw config_error("p_u_dbm must be finite");
  }
  if (!std::isfinite(p_d_dbm)) throw config_error("p_d_dbm must be finite");
  if (!std::isfinite(c_si_db)) throw config_error("c_si_db must be finite");
  bs_user_loss_db();
  cci_loss_db();
}

DerivedVariances derive_variances(const ScenarioConfig& cfg) {
  cfg.validate();
  double l_bs = cfg.bs_user_loss_db();
  DerivedVariances v;
  // Per-unit-transmit-power gains: covariance traces carry the power budget,
  // so the received level at full power is P * sigma^2 and power is counted
  // exactly once in every rate expression.
  v.sigma_d_sq = dbm_to_mw(-l_bs);
  v.sigma_u_sq = dbm_to_mw(-l_bs);
  v.sigma_si_sq = dbm_to_mw(-cfg.c_si_db);
  v.sigma_cci_sq = dbm_to_mw(-cfg.cci_loss_db());
  for (double s : {v.sigma_d_sq, v.sigma_u_sq, v.sigma_si_sq, v.sigma_cci_sq}) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw config_error("derived variance must be strictly positive");
    }
  }
  return v;
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t stream) {
  std::uint64_t z = master_seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double GaussianStream::uniform_pos() {
  // 53-bit mantissa draw in (0, 1]: never 0, so log() below stays finite.
  std::uint64_t bits = engine_() >> 11;
  return (static_cast<double>(bits) + 1.0) * 0x1p-53;
}

double GaussianStream::gauss() {
  double u1 = uniform_pos();
  double u2 = uniform_pos();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

std::complex<double> GaussianStream::cgauss(double variance) {
  double u1 = uniform_pos();
  double u2 = uniform_pos();
  double r = std::sqrt(-variance * std::log(u1));
  return {r * std::cos(kTwoPi * u2), r * std::sin(kTwoPi * u2)};
}

Matrix GaussianStream::cgauss_matrix(Eigen::Index rows, Eigen::Index cols,
                                     double variance) {
  Matrix m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      m(r, c) = cgauss(variance);
    }
  }
  return m;
}

ChannelSet gen_channels(const ScenarioConfig& cfg, const DerivedVariances& v,
                        std::uint64_t trial_index) {
  GaussianStream rng(trial_seed(cfg.master_seed, trial_index));
  const Eigen::Index m = cfg.bs_antennas;
  const Eigen::Index n = cfg.user_antennas;

  ChannelSet ch;
  ch.h_u.reserve(cfg.uplink_users);
  for (int i = 0; i < cfg.uplink_users; ++i) {
    ch.h_u.push_back(rng.cgauss_matrix(m, n, v.sigma_u_sq));
  }
  ch.h_d.reserve(cfg.downlink_users);
  for (int j = 0; j < cfg.downlink_users; ++j) {
    ch.h_d.push_back(rng.cgauss_matrix(n, m, v.sigma_d_sq));
  }
  ch.g_d = rng.cgauss_matrix(m, m, v.sigma_si_sq);
  ch.g_u.resize(cfg.uplink_users);
  for (int i = 0; i < cfg.uplink_users; ++i) {
    ch.g_u[i].reserve(cfg.downlink_users);
    for (int j = 0; j < cfg.downlink_users; ++j) {
      ch.g_u[i].push_back(rng.cgauss_matrix(n, n, v.sigma_cci_sq));
    }
  }
  return ch;
}

}  // namespace fdmimo
