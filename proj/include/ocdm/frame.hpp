// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace ocdm {

enum class Modulation { qpsk };

/**
 * All waveform constants of one frame.  Everything else in the pipeline is
 * derived from these: subcarrier spacing df = bandwidth/M, symbol duration
 * T = 1/df, CP duration T_cp = cp_ratio*T, OCDM symbol duration
 * T0 = T + T_cp, CP length L_cp = cp_ratio*M samples, comb group length
 * L = M/pilot_count.
 */
struct FrameConfig {
  double carrier_hz = 79e9;
  double bandwidth_hz = 100e6;
  int subcarriers = 256;   // M, even
  int symbols = 50;        // N, per frame
  int pilot_count = 4;     // M'_P, comb pilots (0 = pilotless mode)
  double cp_ratio = 0.25;  // T_cp / T; cp_ratio * M must be integral
  // Amplitude of the inserted pilot tones.  The Zadoff-Chu pilot values
  // carry a 1/sqrt(M) amplitude; experiment configs typically raise this
  // to ~sqrt(2) so pilot and data subcarriers have comparable power.
  double pilot_amplitude = -1.0;  // < 0 means the 1/sqrt(M) default
  Modulation modulation = Modulation::qpsk;

  double df() const { return bandwidth_hz / subcarriers; }
  double symbol_duration() const { return 1.0 / df(); }
  double cp_duration() const { return cp_ratio * symbol_duration(); }
  double block_duration() const { return symbol_duration() + cp_duration(); }
  int cp_len() const { return static_cast<int>(std::lround(cp_ratio * subcarriers)); }
  int block_len() const { return subcarriers + cp_len(); }
  int frame_len() const { return block_len() * symbols; }
  int data_count() const { return subcarriers - pilot_count; }
  int group_len() const { return pilot_count > 0 ? subcarriers / pilot_count : subcarriers; }
  int bits_per_frame() const { return 2 * data_count() * symbols; }
  double pilot_amp() const {
    return pilot_amplitude > 0 ? pilot_amplitude
                               : 1.0 / std::sqrt(static_cast<double>(subcarriers));
  }

  bool is_pilot_row(int m) const {
    return pilot_count > 0 && m % group_len() == 0;
  }
  std::vector<int> pilot_rows() const;
  std::vector<int> data_rows() const;

  // Throws std::invalid_argument with a description on any violated
  // invariant (M even >= 2, M mod M'_P == 0, cp_ratio*M integral, ...).
  void validate() const;
};

// One frame of baseband samples including cyclic prefixes,
// length (M + L_cp) * N at sample rate = bandwidth.
struct TimeFrame {
  Eigen::VectorXcd samples;
  double sample_rate = 0.0;
};

using BitPayload = std::vector<std::uint8_t>;

}  // namespace ocdm
