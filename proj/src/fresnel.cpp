// SPDX-License-Identifier: Apache-2.0
#include "ocdm/fresnel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ocdm/fft.hpp"

namespace ocdm {

namespace {
constexpr double kPi = std::numbers::pi;

// exp(j * phase) without the intermediate complex exponential call.
inline std::complex<double> cis(double phase) {
  return {std::cos(phase), std::sin(phase)};
}

void check_rows(const Eigen::MatrixXcd& x, int m, const char* what) {
  if (x.rows() != m)
    throw std::invalid_argument(std::string(what) + ": input has " +
                                std::to_string(x.rows()) + " rows, expected " +
                                std::to_string(m));
}
}  // namespace

FresnelOrder::FresnelOrder(int m) : value(m) {
  if (m < 2 || m % 2 != 0)
    throw std::invalid_argument("Fresnel order must be even and >= 2, got " +
                                std::to_string(m));
}

Eigen::VectorXcd gamma_sequence(FresnelOrder order) {
  const int m = order.value;
  Eigen::VectorXcd g(m);
  for (int i = 0; i < m; ++i)
    g(i) = cis(-kPi * static_cast<double>(i) * i / m);
  return g;
}

Eigen::VectorXcd theta1_diag(FresnelOrder order) {
  const int m = order.value;
  const std::complex<double> c = cis(-kPi / 4.0);
  Eigen::VectorXcd t(m);
  for (int i = 0; i < m; ++i)
    t(i) = c * cis(kPi * static_cast<double>(i) * i / m);
  return t;
}

Eigen::VectorXcd theta2_diag(FresnelOrder order) {
  const int m = order.value;
  Eigen::VectorXcd t(m);
  for (int i = 0; i < m; ++i)
    t(i) = cis(kPi * static_cast<double>(i) * i / m);
  return t;
}

Eigen::MatrixXcd dfnt_matrix(FresnelOrder order) {
  const int m = order.value;
  const double norm = 1.0 / std::sqrt(static_cast<double>(m));
  const std::complex<double> c = cis(-kPi / 4.0);
  // Generator f(k) = exp(-j pi/4) exp(+j pi k^2 / M) / sqrt(M); for even M
  // the quadratic phase is M-periodic, so the matrix is filled circulantly
  // from one row (rows are then bit-exact cyclic shifts of each other).
  Eigen::VectorXcd gen(m);
  for (int k = 0; k < m; ++k)
    gen(k) = c * cis(kPi * static_cast<double>(k) * k / m) * norm;
  Eigen::MatrixXcd phi(m, m);
  for (int col = 0; col < m; ++col)
    for (int row = 0; row < m; ++row)
      phi(row, col) = gen((row - col + m) % m);
  return phi;
}

Eigen::MatrixXcd apply_dfnt(const Eigen::MatrixXcd& x, FresnelOrder order) {
  check_rows(x, order.value, "apply_dfnt");
  Eigen::MatrixXcd y = x;
  fft::forward_cols_unitary(y);
  const Eigen::VectorXcd g = gamma_sequence(order);
  y.array().colwise() *= g.array();
  fft::backward_cols_unitary(y);
  return y;
}

Eigen::MatrixXcd apply_idfnt(const Eigen::MatrixXcd& x, FresnelOrder order) {
  check_rows(x, order.value, "apply_idfnt");
  Eigen::MatrixXcd y = x;
  fft::forward_cols_unitary(y);
  const Eigen::VectorXcd g = gamma_sequence(order);
  y.array().colwise() *= g.conjugate().array();
  fft::backward_cols_unitary(y);
  return y;
}

}  // namespace ocdm
