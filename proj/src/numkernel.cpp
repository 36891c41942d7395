// SPDX-License-Identifier: Apache-2.0

#include "fdmimo/numkernel.hpp"

#include <cmath>

namespace fdmimo {

namespace {

constexpr double kLog2e = 1.4426950408889634;  // 1 / ln 2

void require_square_finite(const Matrix& a, const char* op) {
  if (a.rows() != a.cols()) {
    throw numeric_error(std::string(op) + ": matrix is not square");
  }
  if (!a.allFinite()) {
    throw numeric_error(std::string(op) + ": matrix has non-finite entries");
  }
}

// Symmetrized eigendecomposition, eigenvalues ascending (Eigen's order).
Eigen::SelfAdjointEigenSolver<Matrix> factor(const Matrix& a, const char* op) {
  require_square_finite(a, op);
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(a));
  if (es.info() != Eigen::Success) {
    throw numeric_error(std::string(op) + ": eigendecomposition failed");
  }
  return es;
}

void require_min_eig(double min_eig, double psd_slack, const char* op) {
  if (min_eig < -psd_slack) {
    throw not_psd_error(std::string(op) + ": eigenvalue " +
                        std::to_string(min_eig) + " below -" +
                        std::to_string(psd_slack));
  }
}

}  // namespace

Matrix hermitize(const Matrix& a) { return 0.5 * (a + a.adjoint()); }

EigDecomposition herm_eig(const Matrix& a) {
  auto es = factor(a, "herm_eig");
  EigDecomposition out;
  out.values = es.eigenvalues().reverse();
  out.vectors = es.eigenvectors().rowwise().reverse();
  return out;
}

Matrix sqrt_psd(const Matrix& a, double psd_slack) {
  auto es = factor(a, "sqrt_psd");
  require_min_eig(es.eigenvalues().minCoeff(), psd_slack, "sqrt_psd");
  RealVector roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * roots.asDiagonal() *
         es.eigenvectors().adjoint();
}

Matrix inv_sqrt_psd(const Matrix& a, double eig_floor, double psd_slack) {
  auto es = factor(a, "inv_sqrt_psd");
  require_min_eig(es.eigenvalues().minCoeff(), psd_slack, "inv_sqrt_psd");
  RealVector inv_roots =
      es.eigenvalues().cwiseMax(eig_floor).cwiseSqrt().cwiseInverse();
  return es.eigenvectors() * inv_roots.asDiagonal() *
         es.eigenvectors().adjoint();
}

double logdet_psd(const Matrix& a) {
  auto es = factor(a, "logdet_psd");
  require_min_eig(es.eigenvalues().minCoeff(), 1e-6, "logdet_psd");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    sum += std::log(std::max(es.eigenvalues()[i], 1e-15));
  }
  return sum * kLog2e;
}

Matrix psd_project(const Matrix& a) {
  auto es = factor(a, "psd_project");
  RealVector clipped = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * clipped.asDiagonal() *
         es.eigenvectors().adjoint();
}

std::pair<double, Vector> top_eigpair(const Matrix& a) {
  auto es = factor(a, "top_eigpair");
  Eigen::Index last = es.eigenvalues().size() - 1;
  return {es.eigenvalues()[last], es.eigenvectors().col(last)};
}

}  // namespace fdmimo
