// SPDX-License-Identifier: Apache-2.0
//
// Hermitian matrix primitives shared by every other module. All inputs are
// treated as Hermitian by symmetrizing (A + A^H) / 2 before factorizing, so
// callers may pass matrices carrying round-off asymmetry.
#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace fdmimo {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Root of the library error hierarchy: raised on non-finite inputs or
// numerically invalid arguments.
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

// Raised when an operation requires a (near) positive semidefinite input and
// the smallest eigenvalue falls below the tolerated negative round-off.
class not_psd_error : public numeric_error {
 public:
  explicit not_psd_error(const std::string& what) : numeric_error(what) {}
};

// (A + A^H) / 2.
Matrix hermitize(const Matrix& a);

struct EigDecomposition {
  RealVector values;  // descending
  Matrix vectors;     // columns, matching `values` order
};

// Eigendecomposition of a Hermitian matrix, eigenvalues descending.
// Throws numeric_error on non-square or non-finite input.
EigDecomposition herm_eig(const Matrix& a);

// A^{1/2} for PSD A; negative eigenvalues within round-off are clamped to 0.
// Throws not_psd_error if an eigenvalue is below -psd_slack.
Matrix sqrt_psd(const Matrix& a, double psd_slack = 1e-6);

// A^{-1/2} for positive definite A. Eigenvalues are floored at
// `eig_floor` before inversion so that matrices of the form I + X with X PSD
// are always safe; genuinely indefinite input throws not_psd_error.
Matrix inv_sqrt_psd(const Matrix& a, double eig_floor = 1e-12,
                    double psd_slack = 1e-6);

// log2 det(A) for positive definite A; eigenvalues are floored at 1e-15 to
// keep the result finite under round-off, and not_psd_error is thrown if an
// eigenvalue is below -1e-6.
double logdet_psd(const Matrix& a);

// Nearest (Frobenius) PSD matrix: eigenvalues clipped at zero.
Matrix psd_project(const Matrix& a);

// Largest eigenvalue and a unit-norm eigenvector of a Hermitian matrix.
std::pair<double, Vector> top_eigpair(const Matrix& a);

}  // namespace fdmimo
