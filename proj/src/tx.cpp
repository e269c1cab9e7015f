// SPDX-License-Identifier: Apache-2.0
#include "ocdm/tx.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ocdm/fft.hpp"
#include "ocdm/fresnel.hpp"

namespace ocdm {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kInvSqrt2 = 0.70710678118654752440;

inline std::complex<double> cis(double phase) {
  return {std::cos(phase), std::sin(phase)};
}
}  // namespace

Eigen::MatrixXcd qpsk_map(const BitPayload& bits, const FrameConfig& cfg) {
  const int rows = cfg.data_count();
  const int cols = cfg.symbols;
  if (static_cast<int>(bits.size()) != 2 * rows * cols)
    throw std::invalid_argument("qpsk_map: payload has " +
                                std::to_string(bits.size()) + " bits, need " +
                                std::to_string(2 * rows * cols));
  Eigen::MatrixXcd x(rows, cols);
  auto* out = x.data();  // column-major: m runs fastest
  for (int i = 0; i < rows * cols; ++i) {
    const int b0 = bits[2 * i];
    const int b1 = bits[2 * i + 1];
    out[i] = {(1 - 2 * b1) * kInvSqrt2, (1 - 2 * b0) * kInvSqrt2};
  }
  return x;
}

BitPayload random_payload(const FrameConfig& cfg, Rng& rng) {
  BitPayload bits(cfg.bits_per_frame());
  for (auto& b : bits) b = rng.bit() ? 1 : 0;
  return bits;
}

Eigen::VectorXcd pilot_values(const FrameConfig& cfg) {
  const int m = cfg.subcarriers;
  const double norm = 1.0 / std::sqrt(static_cast<double>(m));
  Eigen::VectorXcd u(cfg.pilot_count);
  for (int k = 0; k < cfg.pilot_count; ++k)
    u(k) = norm * cis(kPi * static_cast<double>(k) * k / m);
  return u;
}

Eigen::MatrixXcd precode_grid(const Eigen::MatrixXcd& x, const FrameConfig& cfg) {
  if (x.rows() != cfg.data_count() || x.cols() != cfg.symbols)
    throw std::invalid_argument("precode_grid: expected " +
                                std::to_string(cfg.data_count()) + "x" +
                                std::to_string(cfg.symbols) + " grid");
  const int m = cfg.subcarriers;
  // Zero padding of the last M'_P virtual subcarriers, then forward unitary
  // DFT and the conj(Gamma) rotation.
  Eigen::MatrixXcd z = Eigen::MatrixXcd::Zero(m, cfg.symbols);
  z.topRows(cfg.data_count()) = x;
  fft::forward_cols_unitary(z);
  const Eigen::VectorXcd g = gamma_sequence(FresnelOrder(m));
  z.array().colwise() *= g.conjugate().array();
  return z;
}

void insert_pilots(Eigen::MatrixXcd& z, const FrameConfig& cfg) {
  if (cfg.pilot_count == 0) return;
  const int m = cfg.subcarriers;
  const int l = cfg.group_len();
  const double amp = cfg.pilot_amp();
  for (int k = 0; k < cfg.pilot_count; ++k) {
    const std::complex<double> tone =
        amp * cis(kPi * static_cast<double>(k) * k / m);
    z.row(k * l).setConstant(tone);
  }
}

Eigen::MatrixXcd ofdm_place_grid(const Eigen::MatrixXcd& x, const FrameConfig& cfg) {
  if (x.rows() != cfg.data_count() || x.cols() != cfg.symbols)
    throw std::invalid_argument("ofdm_place_grid: bad data grid shape");
  Eigen::MatrixXcd z = Eigen::MatrixXcd::Zero(cfg.subcarriers, cfg.symbols);
  const auto rows = cfg.data_rows();
  for (std::size_t i = 0; i < rows.size(); ++i)
    z.row(rows[i]) = x.row(static_cast<Eigen::Index>(i));
  return z;
}

TimeFrame modulate(const Eigen::MatrixXcd& zp, const FrameConfig& cfg) {
  if (zp.rows() != cfg.subcarriers || zp.cols() != cfg.symbols)
    throw std::invalid_argument("modulate: grid must be M x N");
  const int m = cfg.subcarriers;
  const int lcp = cfg.cp_len();
  Eigen::MatrixXcd s = zp;
  fft::backward_cols_unitary(s);
  TimeFrame frame;
  frame.sample_rate = cfg.bandwidth_hz;
  frame.samples.resize(cfg.frame_len());
  for (int n = 0; n < cfg.symbols; ++n) {
    auto block = frame.samples.segment(static_cast<Eigen::Index>(n) * (m + lcp), m + lcp);
    block.head(lcp) = s.col(n).tail(lcp);
    block.tail(m) = s.col(n);
  }
  return frame;
}

FrameBuilder::FrameBuilder(const FrameConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
}

Eigen::MatrixXcd FrameBuilder::rebuild_freq_grid(const Eigen::MatrixXcd& x,
                                                 Waveform mode) const {
  Eigen::MatrixXcd z =
      mode == Waveform::ocdm ? precode_grid(x, cfg_) : ofdm_place_grid(x, cfg_);
  insert_pilots(z, cfg_);
  return z;
}

TxFrame FrameBuilder::build_from_symbols(const Eigen::MatrixXcd& x,
                                         Waveform mode) const {
  TxFrame out;
  out.data_grid = x;
  out.freq_grid = rebuild_freq_grid(x, mode);
  out.frame = modulate(out.freq_grid, cfg_);
  return out;
}

TxFrame FrameBuilder::build(const BitPayload& bits, Waveform mode) const {
  return build_from_symbols(qpsk_map(bits, cfg_), mode);
}

}  // namespace ocdm
