// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>

namespace ocdm::fft {

/**
 * Thin wrapper around FFTW3 (double precision) with the transform scaling
 * pinned in one place.  Conventions:
 *
 *   forward:   X[k] = sum_n x[n] exp(-j 2 pi k n / N)      (unscaled)
 *   backward:  x[n] = sum_k X[k] exp(+j 2 pi k n / N)      (unscaled)
 *   *_unitary: same kernels scaled by 1/sqrt(N), so forward_unitary and
 *              backward_unitary are exact inverses and preserve energy.
 *
 * Any transform size >= 1 is supported (power of two or not).  Plans are
 * created with FFTW_ESTIMATE (deterministic) and cached per (size,
 * direction); execution is thread safe, plan creation is mutex guarded.
 */

void forward(std::complex<double>* data, std::size_t n);
void backward(std::complex<double>* data, std::size_t n);
void forward_unitary(std::complex<double>* data, std::size_t n);
void backward_unitary(std::complex<double>* data, std::size_t n);

// Column-wise in-place transforms (each column of the matrix is one signal).
void forward_cols_unitary(Eigen::MatrixXcd& m);
void backward_cols_unitary(Eigen::MatrixXcd& m);

}  // namespace ocdm::fft
