// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <Eigen/LU>

#include "ocdm/frame.hpp"
#include "ocdm/tx.hpp"

namespace ocdm {

struct EqualizerKind {
  enum Type { zf, mmse } type = zf;
  double noise_to_signal = 0.0;  // N0 / Ps, required > 0 for MMSE

  static EqualizerKind ZF() { return {zf, 0.0}; }
  static EqualizerKind MMSE(double n0_over_ps) { return {mmse, n0_over_ps}; }
};

// CP removal + per-symbol unitary M-point DFT.
Eigen::MatrixXcd demodulate(const TimeFrame& frame, const FrameConfig& cfg);

// Pilot-row LS estimates H(kL, n) = Yf(kL, n) / pilot_tone(k); all other
// rows are left at zero.
Eigen::MatrixXcd ls_estimate(const Eigen::MatrixXcd& yf, const FrameConfig& cfg);

// Complex linear interpolation of the data rows within each comb group;
// the group above the last pilot wraps circularly toward pilot k = 0.
Eigen::MatrixXcd interpolate_channel(const Eigen::MatrixXcd& pilot_est,
                                     const FrameConfig& cfg);

struct EqualizeResult {
  Eigen::MatrixXcd z_data;  // (M - M'_P) x N, pilot rows removed
  int singular_bins = 0;    // ZF bins nulled for |H| < 1e-12
};

// Per-bin ZF or MMSE equalization followed by pilot-row removal.
EqualizeResult equalize(const Eigen::MatrixXcd& yf, const Eigen::MatrixXcd& hf,
                        EqualizerKind kind, const FrameConfig& cfg);

/**
 * Recovers data symbols from the equalized data-row grid.  For OCDM this
 * solves the square system formed by the data rows of the precoder
 * (LU factorized once per config); for OFDM it is the identity.
 */
class Decoder {
 public:
  Decoder(const FrameConfig& cfg, Waveform mode);

  Eigen::MatrixXcd decode(const Eigen::MatrixXcd& z_data) const;
  Waveform mode() const { return mode_; }

 private:
  FrameConfig cfg_;
  Waveform mode_;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
};

// Hard-decision nearest-constellation demap (inverse of qpsk_map's order).
BitPayload qpsk_demap(const Eigen::MatrixXcd& x);

Eigen::MatrixXcd hard_decision_qpsk(const Eigen::MatrixXcd& x);

double ber(const BitPayload& bits, const BitPayload& ref);

}  // namespace ocdm
