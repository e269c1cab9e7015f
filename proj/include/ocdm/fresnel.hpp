// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

namespace ocdm {

/**
 * Discrete Fresnel transform (DFnT) of even order M.
 *
 * The DFnT matrix Phi_M is circulant and unitary and factors as
 *
 *   Phi_M = Theta1 * F_M * Theta2,
 *   Phi_M(m, n) = exp(-j pi/4) exp(+j pi (m-n)^2 / M) / sqrt(M),
 *
 * with F_M the unitary DFT (negative-exponent forward kernel) and Theta1,
 * Theta2 unit-modulus quadratic-phase diagonals.  Conjugating by the DFT
 * diagonalizes it: F_M Phi_M F_M^H = diag(Gamma) with the Zadoff-Chu
 * eigenvalues Gamma(m) = exp(-j pi m^2 / M).  apply_dfnt/apply_idfnt use
 * this identity (two FFT passes and one diagonal scale per column).
 */
struct FresnelOrder {
  int value;
  // Throws std::invalid_argument unless value is even and >= 2.
  explicit FresnelOrder(int m);
};

// Gamma(m) = exp(-j pi m^2 / M), the circulant eigenvalue diagonal.
Eigen::VectorXcd gamma_sequence(FresnelOrder order);

// Theta1(m) = exp(-j pi/4) exp(+j pi m^2 / M)
Eigen::VectorXcd theta1_diag(FresnelOrder order);
// Theta2(n) = exp(+j pi n^2 / M)
Eigen::VectorXcd theta2_diag(FresnelOrder order);

// Dense M x M DFnT matrix Phi_M (reference/oracle path, O(M^2) storage).
Eigen::MatrixXcd dfnt_matrix(FresnelOrder order);

// Y = Phi_M * X via FFT.  X must have M rows.
Eigen::MatrixXcd apply_dfnt(const Eigen::MatrixXcd& x, FresnelOrder order);

// Y = Phi_M^H * X via FFT.  X must have M rows.
Eigen::MatrixXcd apply_idfnt(const Eigen::MatrixXcd& x, FresnelOrder order);

}  // namespace ocdm
