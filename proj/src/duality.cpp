// SPDX-License-Identifier: Apache-2.0

#include "fdmimo/duality.hpp"

#include <string>

namespace fdmimo {

MacToBcResult mac_to_bc(const EffectiveDownlink& eff,
                        const std::vector<Matrix>& q_du) {
  const std::size_t kd = q_du.size();
  if (eff.hbar.size() != kd) {
    throw transform_error(0, "mac_to_bc: user count mismatch");
  }

  MacToBcResult out;
  out.q_d.reserve(kd);
  out.factors.a.reserve(kd);
  out.factors.b.reserve(kd);
  out.factors.f.reserve(kd);
  out.factors.fbar.reserve(kd);
  out.factors.lam.reserve(kd);

  for (std::size_t j = 0; j < kd; ++j) {
    const Matrix& hbar_j = eff.hbar[j];
    const Eigen::Index n = hbar_j.rows();
    const Eigen::Index m = hbar_j.cols();

    try {
      // Interference already encoded for user j: transformed users k < j.
      Matrix a = Matrix::Identity(n, n);
      for (std::size_t k = 0; k < j; ++k) {
        a += hbar_j * out.q_d[k] * hbar_j.adjoint();
      }
      // Dual interference decoded after user j: users k > j.
      Matrix b = Matrix::Identity(m, m);
      for (std::size_t k = j + 1; k < kd; ++k) {
        b += eff.hbar[k].adjoint() * q_du[k] * eff.hbar[k];
      }

      Matrix a_sqrt = sqrt_psd(a);
      Matrix b_inv_sqrt = inv_sqrt_psd(b);

      Eigen::JacobiSVD<Matrix> svd(b_inv_sqrt * hbar_j.adjoint() *
                                       inv_sqrt_psd(a),
                                   Eigen::ComputeThinU | Eigen::ComputeThinV);
      RealVector lam = svd.singularValues();
      if (lam.size() > 0) {
        double cutoff = 1e-12 * lam.maxCoeff();
        for (Eigen::Index s = 0; s < lam.size(); ++s) {
          if (lam[s] < cutoff) lam[s] = 0.0;
        }
      }

      Matrix mix = svd.matrixU() * svd.matrixV().adjoint();  // M x N
      Matrix q_d =
          b_inv_sqrt * mix * a_sqrt * q_du[j] * a_sqrt * mix.adjoint() *
          b_inv_sqrt;
      out.q_d.push_back(psd_project(q_d));

      out.factors.a.push_back(std::move(a));
      out.factors.b.push_back(std::move(b));
      out.factors.f.push_back(svd.matrixU());
      out.factors.fbar.push_back(svd.matrixV());
      out.factors.lam.push_back(std::move(lam));
    } catch (const numeric_error& e) {
      throw transform_error(j, "mac_to_bc: user " + std::to_string(j) + ": " +
                                   e.what());
    }
  }
  return out;
}

std::vector<Matrix> effective_si_channels(const ChannelSet& ch,
                                          const EffectiveDownlink& eff,
                                          const std::vector<Matrix>& q_du,
                                          const DualityFactors& factors) {
  const std::size_t kd = q_du.size();
  if (factors.a.size() != kd || eff.hbar.size() != kd) {
    throw transform_error(0, "effective_si_channels: user count mismatch");
  }
  std::vector<Matrix> gbar;
  gbar.reserve(kd);
  for (std::size_t j = 0; j < kd; ++j) {
    Matrix mix = factors.f[j] * factors.fbar[j].adjoint();
    gbar.push_back(ch.g_d * inv_sqrt_psd(factors.b[j]) * mix *
                   sqrt_psd(factors.a[j]));
  }
  return gbar;
}

}  // namespace fdmimo
