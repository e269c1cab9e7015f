// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ocdm/frame.hpp"
#include "ocdm/rng.hpp"

namespace ocdm {

enum class Waveform { ocdm, ofdm };

/**
 * Bit-to-frame transmitter.
 *
 * OCDM mode: QPSK symbols on the first M-M'_P virtual subcarriers are
 * DFT-precoded with G = diag(conj(Gamma)) * F_M (zero padding of the last
 * M'_P inputs), comb pilots overwrite rows kL, and each symbol is sent
 * through a unitary inverse DFT with a cyclic prefix prepended.
 *
 * OFDM mode: identical chain with the Fresnel precoding replaced by an
 * identity mapping of data symbols onto the non-pilot subcarriers.
 */

// Gray-mapped QPSK, unit average power, column-major fill (m fastest).
// Mapping fixed here: bit pair (b0,b1) -> [(1-2*b1) + j(1-2*b0)] / sqrt(2).
Eigen::MatrixXcd qpsk_map(const BitPayload& bits, const FrameConfig& cfg);

BitPayload random_payload(const FrameConfig& cfg, Rng& rng);

// Zadoff-Chu pilot values U(k) = exp(+j pi k^2 / M) / sqrt(M).
Eigen::VectorXcd pilot_values(const FrameConfig& cfg);

// Z_pre = diag(conj(Gamma)) * F_M[:, 0:M-M'_P] * X  (M x N).
Eigen::MatrixXcd precode_grid(const Eigen::MatrixXcd& x, const FrameConfig& cfg);

// Overwrite pilot rows kL with the pilot tone for every symbol; the tone is
// the unit-modulus Zadoff-Chu phase of U(k) scaled to cfg.pilot_amp().
void insert_pilots(Eigen::MatrixXcd& z, const FrameConfig& cfg);

// Map data symbols directly onto non-pilot subcarriers (CP-OFDM baseline).
Eigen::MatrixXcd ofdm_place_grid(const Eigen::MatrixXcd& x, const FrameConfig& cfg);

// Per-symbol unitary inverse DFT + CP prepend, columns concatenated in time.
TimeFrame modulate(const Eigen::MatrixXcd& zp, const FrameConfig& cfg);

struct TxFrame {
  TimeFrame frame;
  Eigen::MatrixXcd freq_grid;    // M x N, pilots included
  Eigen::MatrixXcd data_grid;    // (M - M'_P) x N constellation points
};

/**
 * Precomputes the precoder once per config; immutable afterwards, safe to
 * share across Monte Carlo threads.
 */
class FrameBuilder {
 public:
  explicit FrameBuilder(const FrameConfig& cfg);

  TxFrame build(const BitPayload& bits, Waveform mode) const;
  TxFrame build_from_symbols(const Eigen::MatrixXcd& x, Waveform mode) const;

  // Rebuild the pilot-bearing frequency grid from (decoded) data symbols.
  Eigen::MatrixXcd rebuild_freq_grid(const Eigen::MatrixXcd& x, Waveform mode) const;

  const FrameConfig& config() const { return cfg_; }

 private:
  FrameConfig cfg_;
};

}  // namespace ocdm
