// SPDX-License-Identifier: Apache-2.0
#include "ocdm/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace ocdm::fft {
namespace {

std::mutex g_plan_mutex;

fftw_plan plan_for(std::size_t n, int sign) {
  // Plans are reusable on any aligned-or-not buffer via fftw_execute_dft
  // because they are created with FFTW_UNALIGNED.
  static std::map<std::pair<std::size_t, int>, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  auto key = std::make_pair(n, sign);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::vector<std::complex<double>> scratch(n);
  auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
  fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), p, p, sign,
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!plan) throw std::runtime_error("fftw plan creation failed");
  cache.emplace(key, plan);
  return plan;
}

void execute(std::complex<double>* data, std::size_t n, int sign) {
  if (n == 0) throw std::invalid_argument("fft: empty transform");
  if (n == 1) return;
  fftw_plan plan = plan_for(n, sign);
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plan, p, p);
}

void scale(std::complex<double>* data, std::size_t n, double s) {
  for (std::size_t i = 0; i < n; ++i) data[i] *= s;
}

}  // namespace

void forward(std::complex<double>* data, std::size_t n) {
  execute(data, n, FFTW_FORWARD);
}

void backward(std::complex<double>* data, std::size_t n) {
  execute(data, n, FFTW_BACKWARD);
}

void forward_unitary(std::complex<double>* data, std::size_t n) {
  execute(data, n, FFTW_FORWARD);
  scale(data, n, 1.0 / std::sqrt(static_cast<double>(n)));
}

void backward_unitary(std::complex<double>* data, std::size_t n) {
  execute(data, n, FFTW_BACKWARD);
  scale(data, n, 1.0 / std::sqrt(static_cast<double>(n)));
}

void forward_cols_unitary(Eigen::MatrixXcd& m) {
  const auto rows = static_cast<std::size_t>(m.rows());
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    forward_unitary(m.col(c).data(), rows);
}

void backward_cols_unitary(Eigen::MatrixXcd& m) {
  const auto rows = static_cast<std::size_t>(m.rows());
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    backward_unitary(m.col(c).data(), rows);
}

}  // namespace ocdm::fft
