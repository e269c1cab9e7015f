// SPDX-License-Identifier: Apache-2.0
#include "ocdm/radar.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ocdm/fft.hpp"
#include "ocdm/fresnel.hpp"

namespace ocdm {

namespace {
constexpr double kPi = std::numbers::pi;

// Wrapped 3-point quadratic interpolation of the log-power peak.
double refine_offset(double pm, double p0, double pp) {
  if (pm <= 0 || p0 <= 0 || pp <= 0) return 0.0;
  const double lm = std::log(pm);
  const double l0 = std::log(p0);
  const double lp = std::log(pp);
  const double denom = lm - 2.0 * l0 + lp;
  if (!(std::abs(denom) > 0)) return 0.0;
  double d = 0.5 * (lm - lp) / denom;
  if (!(d > -0.5)) d = -0.5;
  if (!(d < 0.5)) d = 0.5;
  return d;
}
}  // namespace

void PeriodogramSpec::validate(const FrameConfig& cfg) const {
  if (delay_bins(cfg) <= cfg.subcarriers)
    throw std::invalid_argument("PeriodogramSpec: M_Per must exceed M");
  if (doppler_bins(cfg) <= cfg.symbols)
    throw std::invalid_argument("PeriodogramSpec: N_Per must exceed N");
}

Eigen::MatrixXcd chirp_matched_filter(const TimeFrame& frame_rad,
                                      const FrameConfig& cfg) {
  if (frame_rad.samples.size() != cfg.frame_len())
    throw std::invalid_argument("chirp_matched_filter: frame length mismatch");
  const int m = cfg.subcarriers;
  const int lcp = cfg.cp_len();
  Eigen::MatrixXcd y(m, cfg.symbols);
  for (int n = 0; n < cfg.symbols; ++n)
    y.col(n) = frame_rad.samples.segment(
        static_cast<Eigen::Index>(n) * (m + lcp) + lcp, m);
  return apply_dfnt(y, FresnelOrder(m));
}

WipeResult wipe_symbols(const Eigen::MatrixXcd& yr, const Eigen::MatrixXcd& xhat,
                        const FrameConfig& cfg, Waveform mode,
                        double min_modulus_ratio) {
  if (yr.rows() != cfg.subcarriers || yr.cols() != cfg.symbols)
    throw std::invalid_argument("wipe_symbols: observation must be M x N");
  if (xhat.rows() != cfg.data_count() || xhat.cols() != cfg.symbols)
    throw std::invalid_argument("wipe_symbols: symbols must be (M - M'_P) x N");
  if (xhat.cwiseAbs().maxCoeff() <= 0)
    throw std::invalid_argument("wipe_symbols: all-zero symbol grid");

  const FresnelOrder order(cfg.subcarriers);
  const Eigen::VectorXcd gamma = gamma_sequence(order);

  // Frequency-domain view of the chirp observation: Yf = conj(Gamma) o F Yr.
  Eigen::MatrixXcd yf = yr;
  fft::forward_cols_unitary(yf);
  yf.array().colwise() *= gamma.conjugate().array();

  // Rebuild the transmitted frequency grid from the decoded symbols plus
  // the known pilots.
  FrameBuilder builder(cfg);
  const Eigen::MatrixXcd zhat = builder.rebuild_freq_grid(xhat, mode);

  const double rms = std::sqrt(zhat.squaredNorm() / static_cast<double>(zhat.size()));
  const double floor = min_modulus_ratio * rms;

  WipeResult out;
  out.grid.resize(yf.rows(), yf.cols());
  for (Eigen::Index i = 0; i < yf.size(); ++i) {
    const std::complex<double> d = zhat(i);
    if (std::abs(d) < floor) {
      out.grid(i) = 0.0;
      ++out.zeroed;
    } else {
      out.grid(i) = yf(i) / d;
    }
  }
  return out;
}

Eigen::MatrixXd periodogram_2d(const Eigen::MatrixXcd& wiped,
                               const PeriodogramSpec& spec,
                               const FrameConfig& cfg) {
  spec.validate(cfg);
  const int m = static_cast<int>(wiped.rows());
  const int n = static_cast<int>(wiped.cols());
  const int mper = spec.delay_bins(cfg);
  const int nper = spec.doppler_bins(cfg);

  // Doppler axis first: forward DFT of each row, zero padded to N_Per.
  Eigen::MatrixXcd stage1 = Eigen::MatrixXcd::Zero(nper, m);
  for (int row = 0; row < m; ++row) {
    stage1.col(row).head(n) = wiped.row(row).transpose();
    fft::forward(stage1.col(row).data(), static_cast<std::size_t>(nper));
  }
  // Delay axis: backward DFT (positive exponent) zero padded to M_Per.
  Eigen::MatrixXd power(mper, nper);
  Eigen::VectorXcd col(mper);
  for (int dop = 0; dop < nper; ++dop) {
    col.setZero();
    col.head(m) = stage1.row(dop).transpose();
    fft::backward(col.data(), static_cast<std::size_t>(mper));
    power.col(dop) = col.cwiseAbs2();
  }
  return power;
}

namespace {

TargetEstimate estimate_from_bins(double mhat, double nhat, double peak,
                                  const PeriodogramSpec& spec,
                                  const FrameConfig& cfg) {
  const int nper = spec.doppler_bins(cfg);
  const int mper = spec.delay_bins(cfg);
  if (nhat >= nper / 2.0) nhat -= nper;  // signed Doppler axis
  TargetEstimate est;
  est.tau_s = mhat / (cfg.df() * mper);
  est.doppler_hz = nhat / (cfg.block_duration() * nper);
  est.range_m = kSpeedOfLight * est.tau_s;
  est.velocity_mps = kSpeedOfLight * est.doppler_hz / cfg.carrier_hz;
  est.peak_power = peak;
  return est;
}

TargetEstimate peak_of(const Eigen::MatrixXd& surface, const PeriodogramSpec& spec,
                       const FrameConfig& cfg) {
  Eigen::Index im = 0, in = 0;
  const double peak = surface.maxCoeff(&im, &in);
  const int mper = static_cast<int>(surface.rows());
  const int nper = static_cast<int>(surface.cols());
  double mhat = static_cast<double>(im);
  double nhat = static_cast<double>(in);
  if (spec.refine) {
    mhat += refine_offset(surface((im + mper - 1) % mper, in), peak,
                          surface((im + 1) % mper, in));
    nhat += refine_offset(surface(im, (in + nper - 1) % nper), peak,
                          surface(im, (in + 1) % nper));
  }
  return estimate_from_bins(mhat, nhat, peak, spec, cfg);
}

}  // namespace

TargetEstimate extract_peak(const Eigen::MatrixXd& surface,
                            const PeriodogramSpec& spec, const FrameConfig& cfg) {
  return peak_of(surface, spec, cfg);
}

std::vector<TargetEstimate> extract_peaks(const Eigen::MatrixXd& surface,
                                          int count, const PeriodogramSpec& spec,
                                          const FrameConfig& cfg, int mask_bins) {
  Eigen::MatrixXd work = surface;
  const int mper = static_cast<int>(surface.rows());
  const int nper = static_cast<int>(surface.cols());
  std::vector<TargetEstimate> targets;
  targets.reserve(static_cast<std::size_t>(count));
  for (int p = 0; p < count; ++p) {
    Eigen::Index im = 0, in = 0;
    work.maxCoeff(&im, &in);
    targets.push_back(peak_of(work, spec, cfg));
    for (int dm = -mask_bins; dm <= mask_bins; ++dm)
      for (int dn = -mask_bins; dn <= mask_bins; ++dn)
        work((im + dm + mper) % mper, (in + dn + nper) % nper) = 0.0;
  }
  return targets;
}

CrlbValues crlb(const FrameConfig& cfg, double snr_rad_linear) {
  if (!(snr_rad_linear > 0))
    throw std::invalid_argument("crlb: SNR must be positive");
  const double m = cfg.subcarriers;
  const double n = cfg.symbols;
  const double two_pi_sq = (2.0 * kPi) * (2.0 * kPi);
  CrlbValues v;
  v.var_doppler_norm = 6.0 / (two_pi_sq * m * n * (n * n - 1.0) * snr_rad_linear);
  v.var_delay_norm = 6.0 / (two_pi_sq * m * n * (m * m - 1.0) * snr_rad_linear);
  v.var_delay_s2 = v.var_delay_norm / (cfg.df() * cfg.df());
  const double t0 = cfg.block_duration();
  v.var_doppler_hz2 = v.var_doppler_norm / (t0 * t0);
  v.range_rmse_m = kSpeedOfLight * std::sqrt(v.var_delay_s2);
  v.velocity_rmse_mps =
      kSpeedOfLight / cfg.carrier_hz * std::sqrt(v.var_doppler_hz2);
  return v;
}

SundaeResult sundae(const TimeFrame& frame_com, const TimeFrame& frame_rad,
                    const FrameConfig& cfg, const SundaeOptions& opt) {
  SundaeResult out;

  if (opt.true_symbols) {
    out.xhat = *opt.true_symbols;
  } else {
    const Eigen::MatrixXcd yf = demodulate(frame_com, cfg);
    Eigen::MatrixXcd hf;
    if (opt.true_channel) {
      hf = *opt.true_channel;
    } else {
      hf = interpolate_channel(ls_estimate(yf, cfg), cfg);
    }
    EqualizeResult eq = equalize(yf, hf, opt.equalizer, cfg);
    out.singular_bins = eq.singular_bins;
    if (opt.prebuilt_decoder) {
      out.xhat = hard_decision_qpsk(opt.prebuilt_decoder->decode(eq.z_data));
    } else {
      Decoder decoder(cfg, opt.mode);
      out.xhat = hard_decision_qpsk(decoder.decode(eq.z_data));
    }
  }

  const Eigen::MatrixXcd yr = chirp_matched_filter(frame_rad, cfg);
  WipeResult wiped = wipe_symbols(yr, out.xhat, cfg, opt.mode,
                                  opt.wipe_min_modulus_ratio);
  out.wiped_zeroed = wiped.zeroed;
  const Eigen::MatrixXd surface = periodogram_2d(wiped.grid, opt.periodogram, cfg);
  out.targets = extract_peaks(surface, opt.num_targets, opt.periodogram, cfg,
                              opt.mask_bins);
  return out;
}

}  // namespace ocdm
