// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "ocdm/channel.hpp"
#include "ocdm/frame.hpp"
#include "ocdm/radar.hpp"
#include "ocdm/rx.hpp"
#include "ocdm/tx.hpp"

namespace ocdm {

/**
 * Experiment configuration, read from a flat sectioned key-value text file:
 *
 *   # comment
 *   [frame]
 *   subcarriers = 256
 *   ...
 *
 * Sections: [frame], [channel_com], [radar], [periodogram], [sweep], [run].
 * Unknown sections or keys and malformed values are rejected with
 * file:line diagnostics.  See README for the full grammar.
 */
struct ExperimentConfig {
  struct RadarTruth {
    double range_m = 20.0;
    double velocity_mps = 22.22;
    std::complex<double> gain{1.0, 0.0};
  };

  enum class Estimation { ls, perfect_csi };
  enum class SymbolSource { decoded, truth };

  FrameConfig frame;

  // [channel_com]
  int com_paths = 3;
  double com_delay_spread_ns = 0.0;
  double com_max_velocity_mps = 30.0;
  bool com_sample_spaced = true;
  // Explicit path list (gain re/im, delay ns, Doppler Hz); when non-empty it
  // replaces the random generator with this fixed channel in every trial.
  std::vector<PathSpec> com_fixed_paths;

  // [radar]
  std::vector<RadarTruth> radar_targets{RadarTruth{}};

  // [periodogram]
  PeriodogramSpec periodogram;
  double wipe_min_modulus = 0.5;
  int mask_bins = 2;

  // [sweep]
  std::vector<double> snr_sweep_db;
  double snr_com_db = 15.0;
  int trials = 500;

  // [run]
  std::uint64_t seed = 1;
  Waveform mode = Waveform::ocdm;
  EqualizerKind::Type equalizer = EqualizerKind::mmse;
  Estimation estimation = Estimation::ls;
  SymbolSource symbols_source = SymbolSource::decoded;
  std::string id = "experiment";

  ComChannelParams com_params() const;
  double max_doppler_hz() const {
    return com_max_velocity_mps * frame.carrier_hz / kSpeedOfLight;
  }

  void validate() const;  // throws std::invalid_argument with diagnostics

  // Canonical serialization: parse(serialize(c)) is semantically identical
  // and the config hash is computed over this text.
  std::string serialize() const;
  std::uint64_t hash() const;
};

ExperimentConfig parse_config(const std::string& text, const std::string& filename);
ExperimentConfig load_config_file(const std::string& path);

// Built-in default reproducing the reference system parameters
// (79 GHz carrier, 100 MHz bandwidth, M=256, N=50, M'_P=4, QPSK,
// T_cp = T/4, 3-path com channel, single 20 m / 22.22 m/s target).
ExperimentConfig default_config();

}  // namespace ocdm
