// SPDX-License-Identifier: Apache-2.0

#include "fdmimo/ratemodel.hpp"

#include <cmath>
#include <limits>

namespace fdmimo {

namespace {

Matrix identity_like(Eigen::Index n) { return Matrix::Identity(n, n); }

// sum_{k >= from} H_U[k] Q_U[k] H_U[k]^H, an M x M receive covariance.
Matrix uplink_rx_covariance(const ChannelSet& ch,
                            const std::vector<Matrix>& q_u, std::size_t from) {
  const Eigen::Index m = ch.g_d.rows();
  Matrix acc = Matrix::Zero(m, m);
  for (std::size_t k = from; k < q_u.size(); ++k) {
    acc += ch.h_u[k] * q_u[k] * ch.h_u[k].adjoint();
  }
  return acc;
}

// CCI covariance at downlink user j: sum_i G_U[i][j] Q_U[i] G_U[i][j]^H.
Matrix cci_covariance(const ChannelSet& ch, const std::vector<Matrix>& q_u,
                      std::size_t j) {
  const Eigen::Index n = ch.h_d[j].rows();
  Matrix acc = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < q_u.size(); ++i) {
    acc += ch.g_u[i][j] * q_u[i] * ch.g_u[i][j].adjoint();
  }
  return acc;
}

double to_db(double ratio) {
  if (ratio == 0.0) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(ratio);
}

}  // namespace

EffectiveDownlink whiten(const ChannelSet& ch,
                         const std::vector<Matrix>& q_u) {
  EffectiveDownlink eff;
  eff.w.reserve(ch.h_d.size());
  eff.hbar.reserve(ch.h_d.size());
  for (std::size_t j = 0; j < ch.h_d.size(); ++j) {
    const Eigen::Index n = ch.h_d[j].rows();
    Matrix w = identity_like(n) + cci_covariance(ch, q_u, j);
    eff.hbar.push_back(inv_sqrt_psd(w) * ch.h_d[j]);
    eff.w.push_back(std::move(w));
  }
  return eff;
}

Matrix si_covariance(const ChannelSet& ch, const std::vector<Matrix>& q_d) {
  const Eigen::Index m = ch.g_d.rows();
  Matrix total = Matrix::Zero(m, m);
  for (const Matrix& q : q_d) total += q;
  return ch.g_d * total * ch.g_d.adjoint();
}

double uplink_user_rate(const ChannelSet& ch, const CovarianceSet& cov,
                        int i) {
  const auto idx = static_cast<std::size_t>(i);
  const Eigen::Index m = ch.g_d.rows();
  Matrix base = identity_like(m) + si_covariance(ch, cov.q_d);
  double with_user = logdet_psd(base + uplink_rx_covariance(ch, cov.q_u, idx));
  double without = logdet_psd(base + uplink_rx_covariance(ch, cov.q_u, idx + 1));
  return with_user - without;
}

double uplink_sum_rate(const ChannelSet& ch, const CovarianceSet& cov) {
  const Eigen::Index m = ch.g_d.rows();
  Matrix base = identity_like(m) + si_covariance(ch, cov.q_d);
  return logdet_psd(base + uplink_rx_covariance(ch, cov.q_u, 0)) -
         logdet_psd(base);
}

RealVector downlink_dpc_rates(const ChannelSet& ch, const CovarianceSet& cov) {
  const std::size_t kd = ch.h_d.size();
  RealVector rates(kd);
  for (std::size_t j = 0; j < kd; ++j) {
    const Eigen::Index n = ch.h_d[j].rows();
    // Interference at user j: users encoded after it (k < j) plus CCI.
    Matrix interf = identity_like(n) + cci_covariance(ch, cov.q_u, j);
    for (std::size_t k = 0; k < j; ++k) {
      interf += ch.h_d[j] * cov.q_d[k] * ch.h_d[j].adjoint();
    }
    Matrix signal = ch.h_d[j] * cov.q_d[j] * ch.h_d[j].adjoint();
    rates[static_cast<Eigen::Index>(j)] =
        logdet_psd(interf + signal) - logdet_psd(interf);
  }
  return rates;
}

double dual_uplink_sum_rate(const EffectiveDownlink& eff,
                            const std::vector<Matrix>& q_du) {
  const Eigen::Index m = eff.hbar.empty() ? 0 : eff.hbar[0].cols();
  Matrix acc = identity_like(m);
  for (std::size_t j = 0; j < q_du.size(); ++j) {
    acc += eff.hbar[j].adjoint() * q_du[j] * eff.hbar[j];
  }
  return logdet_psd(acc);
}

double total_objective(const ChannelSet& ch, const EffectiveDownlink& eff,
                       const CovarianceSet& cov) {
  return uplink_sum_rate(ch, cov) + dual_uplink_sum_rate(eff, cov.q_du);
}

InterferenceRatios interference_ratios(const ChannelSet& ch,
                                       const CovarianceSet& cov) {
  double si_power = si_covariance(ch, cov.q_d).real().trace();
  double uplink_signal = uplink_rx_covariance(ch, cov.q_u, 0).real().trace();
  if (uplink_signal <= 0.0) {
    throw undefined_ratio_error("interference_ratios: zero uplink signal");
  }

  const Eigen::Index m = ch.g_d.rows();
  Matrix q_d_total = Matrix::Zero(m, m);
  for (const Matrix& q : cov.q_d) q_d_total += q;

  // A zero downlink signal with interference present gives an infinite
  // per-user ratio rather than an error, so the SI ratio stays reportable
  // when the downlink carries no power. A 0/0 user contributes nothing.
  double cci_ratio_sum = 0.0;
  for (std::size_t j = 0; j < ch.h_d.size(); ++j) {
    double cci_power = cci_covariance(ch, cov.q_u, j).real().trace();
    double signal =
        (ch.h_d[j] * q_d_total * ch.h_d[j].adjoint()).real().trace();
    if (signal <= 0.0) {
      if (cci_power > 0.0) {
        cci_ratio_sum = std::numeric_limits<double>::infinity();
        break;
      }
      continue;
    }
    cci_ratio_sum += cci_power / signal;
  }

  InterferenceRatios out;
  out.rho_si_db = to_db(si_power / uplink_signal);
  out.rho_cci_db = to_db(cci_ratio_sum / static_cast<double>(ch.h_d.size()));
  return out;
}

}  // namespace fdmimo
