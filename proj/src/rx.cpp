// SPDX-License-Identifier: Apache-2.0
#include "ocdm/rx.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ocdm/fft.hpp"
#include "ocdm/fresnel.hpp"

namespace ocdm {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kSingularThreshold = 1e-12;
constexpr double kInvSqrt2 = 0.70710678118654752440;

inline std::complex<double> cis(double phase) {
  return {std::cos(phase), std::sin(phase)};
}
}  // namespace

Eigen::MatrixXcd demodulate(const TimeFrame& frame, const FrameConfig& cfg) {
  if (frame.samples.size() != cfg.frame_len())
    throw std::invalid_argument("demodulate: frame has " +
                                std::to_string(frame.samples.size()) +
                                " samples, expected " +
                                std::to_string(cfg.frame_len()));
  const int m = cfg.subcarriers;
  const int lcp = cfg.cp_len();
  Eigen::MatrixXcd yf(m, cfg.symbols);
  for (int n = 0; n < cfg.symbols; ++n)
    yf.col(n) =
        frame.samples.segment(static_cast<Eigen::Index>(n) * (m + lcp) + lcp, m);
  fft::forward_cols_unitary(yf);
  return yf;
}

Eigen::MatrixXcd ls_estimate(const Eigen::MatrixXcd& yf, const FrameConfig& cfg) {
  if (cfg.pilot_count == 0)
    throw std::invalid_argument("ls_estimate: config has no pilots");
  const int m = cfg.subcarriers;
  const int l = cfg.group_len();
  const double amp = cfg.pilot_amp();
  Eigen::MatrixXcd est = Eigen::MatrixXcd::Zero(m, cfg.symbols);
  for (int k = 0; k < cfg.pilot_count; ++k) {
    const std::complex<double> tone =
        amp * cis(kPi * static_cast<double>(k) * k / m);
    est.row(k * l) = yf.row(k * l) / tone;
  }
  return est;
}

Eigen::MatrixXcd interpolate_channel(const Eigen::MatrixXcd& pilot_est,
                                     const FrameConfig& cfg) {
  if (cfg.pilot_count == 0)
    throw std::invalid_argument("interpolate_channel: config has no pilots");
  const int l = cfg.group_len();
  Eigen::MatrixXcd h = pilot_est;
  for (int k = 0; k < cfg.pilot_count; ++k) {
    const int row = k * l;
    // Last group interpolates circularly toward pilot k = 0.
    const int next = ((k + 1) % cfg.pilot_count) * l;
    for (int off = 1; off < l; ++off) {
      const double w = static_cast<double>(off) / l;
      h.row(row + off) = (pilot_est.row(next) - pilot_est.row(row)) * w +
                         pilot_est.row(row);
    }
  }
  return h;
}

EqualizeResult equalize(const Eigen::MatrixXcd& yf, const Eigen::MatrixXcd& hf,
                        EqualizerKind kind, const FrameConfig& cfg) {
  if (yf.rows() != cfg.subcarriers || hf.rows() != cfg.subcarriers)
    throw std::invalid_argument("equalize: grids must have M rows");
  if (kind.type == EqualizerKind::mmse && kind.noise_to_signal <= 0)
    throw std::invalid_argument("equalize: MMSE requires noise_to_signal > 0");

  EqualizeResult out;
  Eigen::MatrixXcd z(cfg.subcarriers, cfg.symbols);
  if (kind.type == EqualizerKind::zf) {
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      const std::complex<double> h = hf(i);
      if (std::abs(h) < kSingularThreshold) {
        z(i) = 0.0;
        ++out.singular_bins;
      } else {
        z(i) = yf(i) / h;
      }
    }
  } else {
    const double reg = kind.noise_to_signal;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      const std::complex<double> h = hf(i);
      z(i) = std::conj(h) * yf(i) / (std::norm(h) + reg);
    }
  }
  const auto rows = cfg.data_rows();
  out.z_data.resize(cfg.data_count(), cfg.symbols);
  for (std::size_t i = 0; i < rows.size(); ++i)
    out.z_data.row(static_cast<Eigen::Index>(i)) = z.row(rows[i]);
  return out;
}

Decoder::Decoder(const FrameConfig& cfg, Waveform mode)
    : cfg_(cfg), mode_(mode) {
  cfg_.validate();
  if (mode_ != Waveform::ocdm) return;
  // Data rows of the precoder G = diag(conj(Gamma)) F_M[:, 0:M-M'_P].
  const int m = cfg_.subcarriers;
  const int d = cfg_.data_count();
  const Eigen::VectorXcd gamma = gamma_sequence(FresnelOrder(m));
  const double norm = 1.0 / std::sqrt(static_cast<double>(m));
  const auto rows = cfg_.data_rows();
  Eigen::MatrixXcd gd(d, d);
  for (int i = 0; i < d; ++i) {
    const int row = rows[static_cast<std::size_t>(i)];
    const std::complex<double> scale = std::conj(gamma(row)) * norm;
    for (int q = 0; q < d; ++q)
      gd(i, q) = scale * cis(-2.0 * kPi * static_cast<double>(row) * q / m);
  }
  lu_ = Eigen::PartialPivLU<Eigen::MatrixXcd>(gd);
  // The comb removes one DFT row per group; the remaining square system
  // must stay invertible.  Guard against a degenerate configuration.
  const double det = std::abs(lu_.determinant());
  if (!(det > 0) || !std::isfinite(det))
    throw std::invalid_argument("Decoder: singular data-row precoder");
}

Eigen::MatrixXcd Decoder::decode(const Eigen::MatrixXcd& z_data) const {
  if (z_data.rows() != cfg_.data_count())
    throw std::invalid_argument("decode: grid must have M - M'_P rows");
  if (mode_ == Waveform::ofdm) return z_data;
  return lu_.solve(z_data);
}

BitPayload qpsk_demap(const Eigen::MatrixXcd& x) {
  BitPayload bits(2 * static_cast<std::size_t>(x.size()));
  const auto* v = x.data();
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    bits[2 * i] = v[i].imag() < 0 ? 1 : 0;
    bits[2 * i + 1] = v[i].real() < 0 ? 1 : 0;
  }
  return bits;
}

Eigen::MatrixXcd hard_decision_qpsk(const Eigen::MatrixXcd& x) {
  Eigen::MatrixXcd q(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.size(); ++i)
    q(i) = {x(i).real() < 0 ? -kInvSqrt2 : kInvSqrt2,
            x(i).imag() < 0 ? -kInvSqrt2 : kInvSqrt2};
  return q;
}

double ber(const BitPayload& bits, const BitPayload& ref) {
  if (bits.size() != ref.size() || bits.empty())
    throw std::invalid_argument("ber: payload length mismatch");
  std::size_t errs = 0;
  for (std::size_t i = 0; i < bits.size(); ++i)
    errs += (bits[i] != ref[i]) ? 1 : 0;
  return static_cast<double>(errs) / static_cast<double>(bits.size());
}

}  // namespace ocdm
