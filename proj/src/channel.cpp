// SPDX-License-Identifier: Apache-2.0
#include "ocdm/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ocdm/fft.hpp"
#include "ocdm/rng.hpp"

namespace ocdm {

namespace {
constexpr double kPi = std::numbers::pi;

inline std::complex<double> cis(double phase) {
  return {std::cos(phase), std::sin(phase)};
}

void check_frame(const TimeFrame& frame, const FrameConfig& cfg) {
  if (frame.samples.size() != cfg.frame_len())
    throw std::invalid_argument("channel: frame has " +
                                std::to_string(frame.samples.size()) +
                                " samples, expected " +
                                std::to_string(cfg.frame_len()));
}
}  // namespace

double ChannelSpec::gain_power() const {
  double p = 0.0;
  for (const auto& path : paths) p += std::norm(path.gain);
  return p;
}

void ChannelSpec::validate(const FrameConfig& cfg) const {
  if (paths.empty())
    throw std::invalid_argument("ChannelSpec: at least one path required");
  for (const auto& p : paths) {
    if (p.delay_s < 0)
      throw std::invalid_argument("ChannelSpec: negative delay");
    if (p.delay_s >= cfg.cp_duration())
      throw std::invalid_argument(
          "ChannelSpec: delay " + std::to_string(p.delay_s * 1e9) +
          " ns >= cyclic prefix " + std::to_string(cfg.cp_duration() * 1e9) + " ns");
    if (std::abs(p.doppler_hz) >= cfg.df())
      throw std::invalid_argument(
          "ChannelSpec: |doppler| " + std::to_string(p.doppler_hz) +
          " Hz >= subcarrier spacing " + std::to_string(cfg.df()) + " Hz");
  }
}

TimeFrame apply_channel(const TimeFrame& frame, const ChannelSpec& spec,
                        const FrameConfig& cfg) {
  check_frame(frame, cfg);
  spec.validate(cfg);
  const int m = cfg.subcarriers;
  const int lcp = cfg.cp_len();
  const int n = cfg.symbols;
  const double fs = cfg.bandwidth_hz;
  const double df = cfg.df();

  TimeFrame out;
  out.sample_rate = frame.sample_rate;
  out.samples = Eigen::VectorXcd::Zero(frame.samples.size());

  Eigen::MatrixXcd data(m, n);  // CP-stripped symbol blocks
  for (int sym = 0; sym < n; ++sym)
    data.col(sym) =
        frame.samples.segment(static_cast<Eigen::Index>(sym) * (m + lcp) + lcp, m);

  Eigen::MatrixXcd shifted(m, n);
  for (const auto& path : spec.paths) {
    shifted = data;
    fft::forward_cols_unitary(shifted);
    for (int row = 0; row < m; ++row)
      shifted.row(row) *= cis(-2.0 * kPi * row * df * path.delay_s);
    fft::backward_cols_unitary(shifted);
    // Reassemble blocks with a fresh CP and apply the Doppler ramp over
    // absolute sample time.
    for (int sym = 0; sym < n; ++sym) {
      const Eigen::Index base = static_cast<Eigen::Index>(sym) * (m + lcp);
      for (int i = 0; i < m + lcp; ++i) {
        const std::complex<double> v =
            i < lcp ? shifted(m - lcp + i, sym) : shifted(i - lcp, sym);
        const double t = static_cast<double>(base + i) / fs;
        out.samples(base + i) +=
            path.gain * v * cis(2.0 * kPi * path.doppler_hz * (t - path.delay_s));
      }
    }
  }
  return out;
}

double noise_variance(const NoiseSpec& noise, const ChannelSpec& spec) {
  if (noise.noiseless()) return 0.0;
  return spec.gain_power() / noise.snr_linear();
}

TimeFrame add_awgn(const TimeFrame& frame, const NoiseSpec& noise,
                   const ChannelSpec& spec, std::uint64_t seed) {
  if (noise.noiseless()) return frame;
  const double sigma = std::sqrt(noise_variance(noise, spec));
  Rng rng(seed);
  TimeFrame out = frame;
  for (Eigen::Index i = 0; i < out.samples.size(); ++i)
    out.samples(i) += sigma * rng.cgaussian();
  return out;
}

ChannelSpec random_com_channel(const ComChannelParams& params,
                               const FrameConfig& cfg, std::uint64_t seed) {
  if (params.paths < 1)
    throw std::invalid_argument("random_com_channel: need at least one path");
  const double spread =
      params.delay_spread_s >= 0 ? params.delay_spread_s : 0.8 * cfg.cp_duration();
  if (spread >= cfg.cp_duration())
    throw std::invalid_argument("random_com_channel: delay spread >= T_cp");
  if (params.max_doppler_hz >= cfg.df())
    throw std::invalid_argument("random_com_channel: max doppler >= df");

  Rng rng(seed);
  const double ts = 1.0 / cfg.bandwidth_hz;
  const auto max_tap = static_cast<std::uint64_t>(std::floor(spread / ts));
  ChannelSpec spec;
  spec.kind = ChannelKind::com;
  spec.paths.resize(params.paths);
  for (int p = 0; p < params.paths; ++p) {
    auto& path = spec.paths[p];
    path.gain = rng.cgaussian();  // CN(0,1)
    if (p == 0) {
      path.delay_s = 0.0;  // frame-synchronized LOS reference
    } else if (params.sample_spaced) {
      path.delay_s = static_cast<double>(rng.uniform_int(max_tap)) * ts;
    } else {
      path.delay_s = rng.uniform(0.0, spread);
    }
    path.doppler_hz = params.max_doppler_hz > 0
                          ? rng.uniform(-params.max_doppler_hz, params.max_doppler_hz)
                          : 0.0;
  }
  return spec;
}

ChannelSpec radar_target_channel(double range_m, double velocity_mps,
                                 std::complex<double> rcs_gain,
                                 const FrameConfig& cfg) {
  ChannelSpec spec;
  spec.kind = ChannelKind::rad;
  PathSpec path;
  path.gain = rcs_gain;
  path.delay_s = range_m / kSpeedOfLight;
  path.doppler_hz = velocity_mps * cfg.carrier_hz / kSpeedOfLight;
  spec.paths.push_back(path);
  spec.validate(cfg);
  return spec;
}

Eigen::MatrixXcd genie_channel_response(const ChannelSpec& spec,
                                        const FrameConfig& cfg) {
  const int m = cfg.subcarriers;
  const int n = cfg.symbols;
  const double df = cfg.df();
  const double t0 = cfg.block_duration();
  const double tcp = cfg.cp_duration();
  const double tsym = cfg.symbol_duration();

  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(m, n);
  Eigen::VectorXcd ramp(m);
  for (const auto& path : spec.paths) {
    for (int row = 0; row < m; ++row)
      ramp(row) = cis(-2.0 * kPi * row * df * path.delay_s);
    const double nu = path.doppler_hz;
    // Exact diagonal of the intra-symbol Doppler ramp: mean phasor of
    // exp(j 2 pi nu i / B) over the M data samples.
    const double x = nu * tsym / m;
    double dirichlet = 1.0;
    if (std::abs(x) > 1e-18)
      dirichlet = std::sin(kPi * x * m) / (m * std::sin(kPi * x));
    const std::complex<double> mid = cis(kPi * nu * tsym * (m - 1) / m);
    for (int sym = 0; sym < n; ++sym) {
      const std::complex<double> psi =
          path.gain * cis(2.0 * kPi * nu * (sym * t0 + tcp - path.delay_s)) *
          mid * dirichlet;
      h.col(sym) += psi * ramp;
    }
  }
  return h;
}

}  // namespace ocdm
