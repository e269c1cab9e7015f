// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include "ocdm/channel.hpp"
#include "ocdm/frame.hpp"
#include "ocdm/rx.hpp"
#include "ocdm/tx.hpp"

namespace ocdm {

/**
 * Bistatic radar parameter estimation on the OCDM return (SUNDAE):
 * decode the communications symbols first, wipe them off the radar
 * observation, then read (delay, Doppler) off the peak of a zero-padded
 * 2D periodogram.
 *
 * Under a target at (tau, nu) the wiped grid is the two-dimensional
 * exponential h * exp(j 2 pi (n nu T0 - m tau df)) plus noise, so delay
 * and Doppler decouple into the two periodogram axes.
 */

struct PeriodogramSpec {
  int delay_size = 0;    // M_Per > M (0 selects 4M)
  int doppler_size = 0;  // N_Per > N (0 selects 4N)
  bool refine = true;    // 3-point log-power quadratic peak interpolation

  int delay_bins(const FrameConfig& cfg) const {
    return delay_size > 0 ? delay_size : 4 * cfg.subcarriers;
  }
  int doppler_bins(const FrameConfig& cfg) const {
    return doppler_size > 0 ? doppler_size : 4 * cfg.symbols;
  }
  void validate(const FrameConfig& cfg) const;
};

struct TargetEstimate {
  double tau_s = 0.0;
  double doppler_hz = 0.0;
  double range_m = 0.0;        // c * tau
  double velocity_mps = 0.0;   // c * doppler / fc
  double peak_power = 0.0;
};

struct CrlbValues {
  double var_delay_norm = 0.0;    // bound on var(tau * df)
  double var_doppler_norm = 0.0;  // bound on var(nu * T0)
  double var_delay_s2 = 0.0;      // seconds^2
  double var_doppler_hz2 = 0.0;   // Hz^2
  double range_rmse_m = 0.0;      // c * sqrt(var_delay_s2)
  double velocity_rmse_mps = 0.0; // (c / fc) * sqrt(var_doppler_hz2)
};

// Per-symbol CP removal + forward DFnT over the chirp bank (FFT route).
Eigen::MatrixXcd chirp_matched_filter(const TimeFrame& frame_rad,
                                      const FrameConfig& cfg);

struct WipeResult {
  Eigen::MatrixXcd grid;  // M x N
  int zeroed = 0;         // entries suppressed by the modulus guard
};

/**
 * Removes the data modulation from the matched-filter grid by element-wise
 * division with the rebuilt symbol grid (decoded data re-precoded, known
 * pilots re-inserted).  The division is carried out on the frequency-domain
 * representation of both grids, where a CP-contained delay is an exact
 * per-subcarrier phase ramp.  Entries whose divisor modulus falls below
 * min_modulus_ratio * rms are zeroed and counted; low-modulus bins would
 * otherwise dominate the quotient noise.
 */
WipeResult wipe_symbols(const Eigen::MatrixXcd& yr, const Eigen::MatrixXcd& xhat,
                        const FrameConfig& cfg, Waveform mode = Waveform::ocdm,
                        double min_modulus_ratio = 1e-9);

// |Z(m', n')|^2 with Z(m', n') = sum_{m,n} y(m,n) exp(-j2pi n n'/N_Per)
// exp(+j2pi m m'/M_Per); rows = delay axis m', cols = Doppler axis n'.
Eigen::MatrixXd periodogram_2d(const Eigen::MatrixXcd& wiped,
                               const PeriodogramSpec& spec,
                               const FrameConfig& cfg);

// Global argmax with optional quadratic refinement; n' is read on the
// signed interval [-N_Per/2, N_Per/2) so negative Doppler is representable.
TargetEstimate extract_peak(const Eigen::MatrixXd& surface,
                            const PeriodogramSpec& spec, const FrameConfig& cfg);

// Successive extraction of `count` peaks, masking +-mask_bins around each
// found peak (rectangular, wrapped) before searching for the next.
std::vector<TargetEstimate> extract_peaks(const Eigen::MatrixXd& surface,
                                          int count, const PeriodogramSpec& spec,
                                          const FrameConfig& cfg,
                                          int mask_bins = 2);

// Eq.-(21)-style bounds in normalized units plus converted values.
CrlbValues crlb(const FrameConfig& cfg, double snr_rad_linear);

struct SundaeOptions {
  EqualizerKind equalizer = EqualizerKind::ZF();
  PeriodogramSpec periodogram;
  Waveform mode = Waveform::ocdm;
  int num_targets = 1;
  int mask_bins = 2;
  double wipe_min_modulus_ratio = 0.5;
  // Genie hooks: exact channel for equalization and/or exact symbols for
  // the wipe (nullopt = estimate/decode them).
  std::optional<Eigen::MatrixXcd> true_channel;
  std::optional<Eigen::MatrixXcd> true_symbols;
  // Optional shared decoder (its LU factorization is costly); must match
  // cfg and mode when provided.
  const Decoder* prebuilt_decoder = nullptr;
};

struct SundaeResult {
  Eigen::MatrixXcd xhat;                 // decoded data symbols (hard)
  std::vector<TargetEstimate> targets;   // ordered by peak power
  int wiped_zeroed = 0;
  int singular_bins = 0;
};

SundaeResult sundae(const TimeFrame& frame_com, const TimeFrame& frame_rad,
                    const FrameConfig& cfg, const SundaeOptions& opt);

}  // namespace ocdm
