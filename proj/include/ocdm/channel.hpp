// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <vector>

#include "ocdm/frame.hpp"

namespace ocdm {

inline constexpr double kSpeedOfLight = 299792458.0;

struct PathSpec {
  std::complex<double> gain;  // h_p
  double delay_s = 0.0;       // tau_p, >= 0 and < T_cp
  double doppler_hz = 0.0;    // theta_p, |theta_p| < df
};

enum class ChannelKind { com, rad };

struct ChannelSpec {
  std::vector<PathSpec> paths;
  ChannelKind kind = ChannelKind::com;

  double gain_power() const;  // sum |h_p|^2
  // Throws std::invalid_argument on delay >= T_cp or |doppler| >= df.
  void validate(const FrameConfig& cfg) const;
};

/**
 * Doubly spread channel: y(t) = sum_p h_p s(t - tau_p) exp(j 2 pi
 * theta_p (t - tau_p)).  The delay is realized per OCDM symbol as a
 * circular fractional shift on the subcarrier grid (phase ramp
 * exp(-j 2 pi m df tau) over unsigned bins) with the cyclic prefix rebuilt,
 * which reproduces the frequency-domain channel model exactly for any
 * tau < T_cp.  Doppler is a continuous phase ramp over absolute frame time.
 */
TimeFrame apply_channel(const TimeFrame& frame, const ChannelSpec& spec,
                        const FrameConfig& cfg);

struct NoiseSpec {
  double snr_db = 0.0;  // +infinity = noiseless sentinel
  ChannelKind kind = ChannelKind::com;

  bool noiseless() const { return std::isinf(snr_db) && snr_db > 0; }
  double snr_linear() const { return std::pow(10.0, snr_db / 10.0); }
};

// sigma_w^2 = sum_p |h_p|^2 * P_avg / SNR with P_avg = 1.
double noise_variance(const NoiseSpec& noise, const ChannelSpec& spec);

// Adds circularly symmetric complex Gaussian noise of variance sigma_w^2
// per sample; deterministic under a fixed seed.
TimeFrame add_awgn(const TimeFrame& frame, const NoiseSpec& noise,
                   const ChannelSpec& spec, std::uint64_t seed);

struct ComChannelParams {
  int paths = 3;
  // Upper edge of the delay distribution; < 0 selects 0.8 * T_cp.
  double delay_spread_s = -1.0;
  double max_doppler_hz = 0.0;
  // Delays are drawn on the sample grid (tapped delay line) so the channel
  // frequency response is periodic across the subcarrier comb, which the
  // pilot interpolation of the receiver relies on.
  bool sample_spaced = true;
};

// P paths with i.i.d. CN(0,1) gains, path 0 delay forced to 0 (LOS
// reference), delays uniform in [0, delay_spread], Doppler uniform in
// [-max_doppler, max_doppler].
ChannelSpec random_com_channel(const ComChannelParams& params,
                               const FrameConfig& cfg, std::uint64_t seed);

// Single Swerling-0 target: tau = range/c, doppler = velocity * fc / c.
ChannelSpec radar_target_channel(double range_m, double velocity_mps,
                                 std::complex<double> rcs_gain,
                                 const FrameConfig& cfg);

// Exact diagonal of the per-symbol frequency-domain channel (genie CSI):
// H(m, n) = sum_p h_p exp(-j 2 pi m df tau_p) * psi_p(n) where psi_p
// carries the Doppler phase at symbol n and the intra-symbol Dirichlet
// attenuation.
Eigen::MatrixXcd genie_channel_response(const ChannelSpec& spec,
                                        const FrameConfig& cfg);

}  // namespace ocdm
