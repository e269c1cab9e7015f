// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ocdm/config.hpp"

namespace ocdm {

/**
 * Seeded Monte Carlo harnesses.  Trial i runs on an independent RNG stream
 * derived from (master seed, i), results are aggregated in trial order, so
 * every experiment is deterministic for a given (config, seed) regardless
 * of the worker thread count.
 */

struct ResultRow {
  std::string experiment;
  std::uint64_t seed = 0;
  double snr_db = 0.0;
  std::string metric;
  double value = 0.0;
};

// "# ..." metadata (version, config hash, seed), pinned header, one line
// per row, LF endings.
std::string results_csv(const ExperimentConfig& cfg,
                        const std::vector<ResultRow>& rows);

// Runs fn(0..n-1) on `threads` workers; any exception is rethrown.
void parallel_trials(int n, int threads, const std::function<void(int)>& fn);

// ---- BER sweep -----------------------------------------------------------

struct BerTrial {
  double ls_zf = 0.0;
  double ls_mmse = 0.0;
  double csi_zf = 0.0;
  double csi_mmse = 0.0;
};

// Shared immutable state for one sweep (precoder + decoder factorizations).
class BerHarness {
 public:
  BerHarness(const ExperimentConfig& cfg, Waveform mode);
  BerTrial trial(double snr_db, std::uint64_t trial_seed) const;
  const ExperimentConfig& config() const { return cfg_; }

 private:
  ExperimentConfig cfg_;
  Waveform mode_;
  FrameBuilder builder_;
  Decoder decoder_;
};

std::vector<ResultRow> run_ber_sweep(const ExperimentConfig& cfg, int threads);

// ---- RMSE sweep ----------------------------------------------------------

struct RmseTrial {
  std::vector<double> range_err_m;      // per configured target
  std::vector<double> velocity_err_mps;
  double ber = 0.0;
  int wiped_zeroed = 0;
};

class RmseHarness {
 public:
  explicit RmseHarness(const ExperimentConfig& cfg);
  RmseTrial trial(double snr_rad_db, std::uint64_t trial_seed) const;
  const ExperimentConfig& config() const { return cfg_; }

 private:
  ExperimentConfig cfg_;
  FrameBuilder builder_;
  Decoder decoder_;
};

std::vector<ResultRow> run_rmse_sweep(const ExperimentConfig& cfg, int threads);

// ---- Single-shot run -----------------------------------------------------

struct SingleRunDumps {
  std::string frame_csv;        // "index,re,im"
  std::string channel_csv;      // "m,n,est_re,est_im,true_re,true_im"
  std::string periodogram_csv;  // power values, one row per delay bin
  std::string bits_csv;         // "index,tx,rx"
};

struct SingleRunResult {
  double ber_value = 0.0;
  std::vector<TargetEstimate> targets;
  double peak_to_median_db = 0.0;
  SingleRunDumps dumps;
  std::vector<ResultRow> rows;
};

SingleRunResult run_single(const ExperimentConfig& cfg, bool want_dumps);

}  // namespace ocdm
