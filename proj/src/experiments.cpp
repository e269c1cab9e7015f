// SPDX-License-Identifier: Apache-2.0
#include "ocdm/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace ocdm {

namespace {

std::string fmt_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

ChannelSpec make_com_channel(const ExperimentConfig& cfg, std::uint64_t seed) {
  if (!cfg.com_fixed_paths.empty())
    return ChannelSpec{cfg.com_fixed_paths, ChannelKind::com};
  return random_com_channel(cfg.com_params(), cfg.frame, seed);
}

EqualizerKind make_equalizer(EqualizerKind::Type type, double noise_var) {
  // MMSE degenerates to ZF in the noiseless limit.
  if (type == EqualizerKind::zf || noise_var <= 0) return EqualizerKind::ZF();
  return EqualizerKind::MMSE(noise_var);
}

// Greedy nearest match of estimates (ordered by peak power) to the
// configured truth list; distances normalized by one periodogram bin.
void match_targets(const std::vector<TargetEstimate>& ests,
                   const std::vector<ExperimentConfig::RadarTruth>& truth,
                   const ExperimentConfig& cfg, std::vector<double>& range_err,
                   std::vector<double>& vel_err) {
  const double range_bin = kSpeedOfLight / (cfg.frame.df() *
                                            cfg.periodogram.delay_bins(cfg.frame));
  const double vel_bin = kSpeedOfLight / cfg.frame.carrier_hz /
                         (cfg.frame.block_duration() *
                          cfg.periodogram.doppler_bins(cfg.frame));
  std::vector<bool> used(ests.size(), false);
  for (const auto& t : truth) {
    int best = -1;
    double best_d = 0;
    for (std::size_t e = 0; e < ests.size(); ++e) {
      if (used[e]) continue;
      const double dr = (ests[e].range_m - t.range_m) / range_bin;
      const double dv = (ests[e].velocity_mps - t.velocity_mps) / vel_bin;
      const double d = dr * dr + dv * dv;
      if (best < 0 || d < best_d) {
        best = static_cast<int>(e);
        best_d = d;
      }
    }
    range_err.push_back(ests[best].range_m - t.range_m);
    vel_err.push_back(ests[best].velocity_mps - t.velocity_mps);
    used[best] = true;
  }
}

}  // namespace

std::string results_csv(const ExperimentConfig& cfg,
                        const std::vector<ResultRow>& rows) {
  std::ostringstream o;
  char hash[32];
  std::snprintf(hash, sizeof(hash), "0x%016llx",
                static_cast<unsigned long long>(cfg.hash()));
  o << "# ocdm_sim results v1\n"
    << "# experiment: " << cfg.id << "\n"
    << "# config_hash: " << hash << "\n"
    << "# seed: " << cfg.seed << "\n"
    << "experiment,seed,snr_db,metric,value\n";
  for (const auto& r : rows)
    o << r.experiment << ',' << r.seed << ',' << fmt_value(r.snr_db) << ','
      << r.metric << ',' << fmt_value(r.value) << '\n';
  return o.str();
}

void parallel_trials(int n, int threads, const std::function<void(int)>& fn) {
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// ---- BER sweep -------------------------------------------------------------

BerHarness::BerHarness(const ExperimentConfig& cfg, Waveform mode)
    : cfg_(cfg), mode_(mode), builder_(cfg.frame), decoder_(cfg.frame, mode) {
  cfg_.validate();
}

BerTrial BerHarness::trial(double snr_db, std::uint64_t trial_seed) const {
  const FrameConfig& frame_cfg = cfg_.frame;
  Rng payload_rng(Rng::derive(trial_seed, 1));
  const BitPayload bits = random_payload(frame_cfg, payload_rng);
  const TxFrame tx = builder_.build(bits, mode_);

  const ChannelSpec chan = make_com_channel(cfg_, Rng::derive(trial_seed, 2));
  const TimeFrame faded = apply_channel(tx.frame, chan, frame_cfg);
  const NoiseSpec noise{snr_db, ChannelKind::com};
  const double noise_var = noise_variance(noise, chan);
  const TimeFrame rx =
      add_awgn(faded, noise, chan, Rng::derive(trial_seed, 3));

  const Eigen::MatrixXcd yf = demodulate(rx, frame_cfg);
  const Eigen::MatrixXcd h_ls = interpolate_channel(ls_estimate(yf, frame_cfg), frame_cfg);
  const Eigen::MatrixXcd h_true = genie_channel_response(chan, frame_cfg);

  auto decode_ber = [&](const Eigen::MatrixXcd& h, EqualizerKind eq) {
    const EqualizeResult z = equalize(yf, h, eq, frame_cfg);
    const Eigen::MatrixXcd xhat = decoder_.decode(z.z_data);
    return ber(qpsk_demap(xhat), bits);
  };
  const EqualizerKind zf = EqualizerKind::ZF();
  const EqualizerKind mmse = make_equalizer(EqualizerKind::mmse, noise_var);
  BerTrial out;
  out.ls_zf = decode_ber(h_ls, zf);
  out.ls_mmse = decode_ber(h_ls, mmse);
  out.csi_zf = decode_ber(h_true, zf);
  out.csi_mmse = decode_ber(h_true, mmse);
  return out;
}

std::vector<ResultRow> run_ber_sweep(const ExperimentConfig& cfg, int threads) {
  const BerHarness harness(cfg, cfg.mode);
  std::vector<ResultRow> rows;
  for (const double snr : cfg.snr_sweep_db) {
    std::vector<BerTrial> trials(static_cast<std::size_t>(cfg.trials));
    parallel_trials(cfg.trials, threads, [&](int i) {
      trials[static_cast<std::size_t>(i)] =
          harness.trial(snr, Rng::derive(cfg.seed, static_cast<std::uint64_t>(i)));
    });
    BerTrial mean;
    for (const auto& t : trials) {
      mean.ls_zf += t.ls_zf;
      mean.ls_mmse += t.ls_mmse;
      mean.csi_zf += t.csi_zf;
      mean.csi_mmse += t.csi_mmse;
    }
    const double n = static_cast<double>(cfg.trials);
    rows.push_back({cfg.id, cfg.seed, snr, "ber:ls:zf", mean.ls_zf / n});
    rows.push_back({cfg.id, cfg.seed, snr, "ber:ls:mmse", mean.ls_mmse / n});
    rows.push_back({cfg.id, cfg.seed, snr, "ber:csi:zf", mean.csi_zf / n});
    rows.push_back({cfg.id, cfg.seed, snr, "ber:csi:mmse", mean.csi_mmse / n});
  }
  return rows;
}

// ---- RMSE sweep ------------------------------------------------------------

RmseHarness::RmseHarness(const ExperimentConfig& cfg)
    : cfg_(cfg), builder_(cfg.frame), decoder_(cfg.frame, cfg.mode) {
  cfg_.validate();
}

RmseTrial RmseHarness::trial(double snr_rad_db, std::uint64_t trial_seed) const {
  const FrameConfig& frame_cfg = cfg_.frame;
  Rng payload_rng(Rng::derive(trial_seed, 1));
  const BitPayload bits = random_payload(frame_cfg, payload_rng);
  const TxFrame tx = builder_.build(bits, cfg_.mode);

  // Communications observation at the configured fixed SNR.
  const ChannelSpec chan_com = make_com_channel(cfg_, Rng::derive(trial_seed, 2));
  const NoiseSpec noise_com{cfg_.snr_com_db, ChannelKind::com};
  const double com_noise_var = noise_variance(noise_com, chan_com);
  const TimeFrame rx_com =
      add_awgn(apply_channel(tx.frame, chan_com, frame_cfg), noise_com, chan_com,
               Rng::derive(trial_seed, 3));

  // Radar observation of the same frame.
  ChannelSpec chan_rad;
  chan_rad.kind = ChannelKind::rad;
  for (const auto& t : cfg_.radar_targets) {
    const ChannelSpec one =
        radar_target_channel(t.range_m, t.velocity_mps, t.gain, frame_cfg);
    chan_rad.paths.push_back(one.paths.front());
  }
  const NoiseSpec noise_rad{snr_rad_db, ChannelKind::rad};
  const TimeFrame rx_rad =
      add_awgn(apply_channel(tx.frame, chan_rad, frame_cfg), noise_rad, chan_rad,
               Rng::derive(trial_seed, 4));

  SundaeOptions opt;
  opt.equalizer = make_equalizer(cfg_.equalizer, com_noise_var);
  opt.periodogram = cfg_.periodogram;
  opt.mode = cfg_.mode;
  opt.num_targets = static_cast<int>(cfg_.radar_targets.size());
  opt.mask_bins = cfg_.mask_bins;
  opt.wipe_min_modulus_ratio = cfg_.wipe_min_modulus;
  opt.prebuilt_decoder = &decoder_;
  if (cfg_.estimation == ExperimentConfig::Estimation::perfect_csi)
    opt.true_channel = genie_channel_response(chan_com, frame_cfg);
  if (cfg_.symbols_source == ExperimentConfig::SymbolSource::truth)
    opt.true_symbols = tx.data_grid;

  const SundaeResult res = sundae(rx_com, rx_rad, frame_cfg, opt);

  RmseTrial out;
  out.wiped_zeroed = res.wiped_zeroed;
  out.ber = ber(qpsk_demap(res.xhat), bits);
  match_targets(res.targets, cfg_.radar_targets, cfg_, out.range_err_m,
                out.velocity_err_mps);
  return out;
}

std::vector<ResultRow> run_rmse_sweep(const ExperimentConfig& cfg, int threads) {
  const RmseHarness harness(cfg);
  std::vector<ResultRow> rows;
  for (const double snr : cfg.snr_sweep_db) {
    std::vector<RmseTrial> trials(static_cast<std::size_t>(cfg.trials));
    parallel_trials(cfg.trials, threads, [&](int i) {
      trials[static_cast<std::size_t>(i)] =
          harness.trial(snr, Rng::derive(cfg.seed, static_cast<std::uint64_t>(i)));
    });
    double r2 = 0, v2 = 0, bsum = 0;
    std::size_t n = 0;
    for (const auto& t : trials) {
      for (double e : t.range_err_m) r2 += e * e;
      for (double e : t.velocity_err_mps) v2 += e * e;
      n += t.range_err_m.size();
      bsum += t.ber;
    }
    rows.push_back({cfg.id, cfg.seed, snr, "rmse:range_m",
                    std::sqrt(r2 / static_cast<double>(n))});
    rows.push_back({cfg.id, cfg.seed, snr, "rmse:velocity_mps",
                    std::sqrt(v2 / static_cast<double>(n))});
    if (std::isfinite(snr)) {
      const CrlbValues b = crlb(cfg.frame, std::pow(10.0, snr / 10.0));
      rows.push_back({cfg.id, cfg.seed, snr, "crlb:range_m", b.range_rmse_m});
      rows.push_back({cfg.id, cfg.seed, snr, "crlb:velocity_mps",
                      b.velocity_rmse_mps});
    }
    rows.push_back({cfg.id, cfg.seed, snr, "ber:com",
                    bsum / static_cast<double>(cfg.trials)});
  }
  return rows;
}

// ---- Single-shot run -------------------------------------------------------

SingleRunResult run_single(const ExperimentConfig& cfg, bool want_dumps) {
  const RmseHarness harness(cfg);
  const FrameConfig& frame_cfg = cfg.frame;
  const std::uint64_t trial_seed = Rng::derive(cfg.seed, 0);

  Rng payload_rng(Rng::derive(trial_seed, 1));
  const BitPayload bits = random_payload(frame_cfg, payload_rng);
  const FrameBuilder builder(frame_cfg);
  const TxFrame tx = builder.build(bits, cfg.mode);

  const ChannelSpec chan_com = make_com_channel(cfg, Rng::derive(trial_seed, 2));
  const NoiseSpec noise_com{cfg.snr_com_db, ChannelKind::com};
  const double com_noise_var = noise_variance(noise_com, chan_com);
  const TimeFrame rx_com =
      add_awgn(apply_channel(tx.frame, chan_com, frame_cfg), noise_com, chan_com,
               Rng::derive(trial_seed, 3));

  ChannelSpec chan_rad;
  chan_rad.kind = ChannelKind::rad;
  for (const auto& t : cfg.radar_targets)
    chan_rad.paths.push_back(
        radar_target_channel(t.range_m, t.velocity_mps, t.gain, frame_cfg)
            .paths.front());
  const double snr_rad = cfg.snr_sweep_db.front();
  const NoiseSpec noise_rad{snr_rad, ChannelKind::rad};
  const TimeFrame rx_rad =
      add_awgn(apply_channel(tx.frame, chan_rad, frame_cfg), noise_rad, chan_rad,
               Rng::derive(trial_seed, 4));

  SundaeOptions opt;
  opt.equalizer = make_equalizer(cfg.equalizer, com_noise_var);
  opt.periodogram = cfg.periodogram;
  opt.mode = cfg.mode;
  opt.num_targets = static_cast<int>(cfg.radar_targets.size());
  opt.mask_bins = cfg.mask_bins;
  opt.wipe_min_modulus_ratio = cfg.wipe_min_modulus;
  if (cfg.estimation == ExperimentConfig::Estimation::perfect_csi)
    opt.true_channel = genie_channel_response(chan_com, frame_cfg);
  if (cfg.symbols_source == ExperimentConfig::SymbolSource::truth)
    opt.true_symbols = tx.data_grid;

  SingleRunResult out;
  const SundaeResult res = sundae(rx_com, rx_rad, frame_cfg, opt);
  out.targets = res.targets;
  out.ber_value = ber(qpsk_demap(res.xhat), bits);

  // Peak-to-median power of the periodogram surface (single-run health
  // indicator for the dump subcommand).
  const Eigen::MatrixXcd yr = chirp_matched_filter(rx_rad, frame_cfg);
  const WipeResult wiped =
      wipe_symbols(yr, res.xhat, frame_cfg, cfg.mode, cfg.wipe_min_modulus);
  const Eigen::MatrixXd surface = periodogram_2d(wiped.grid, cfg.periodogram, frame_cfg);
  std::vector<double> flat(surface.data(), surface.data() + surface.size());
  std::nth_element(flat.begin(), flat.begin() + flat.size() / 2, flat.end());
  const double median = flat[flat.size() / 2];
  out.peak_to_median_db = 10.0 * std::log10(surface.maxCoeff() / median);

  for (std::size_t i = 0; i < out.targets.size(); ++i) {
    const std::string suffix = ":" + std::to_string(i);
    out.rows.push_back({cfg.id, cfg.seed, snr_rad, "range_m" + suffix,
                        out.targets[i].range_m});
    out.rows.push_back({cfg.id, cfg.seed, snr_rad, "velocity_mps" + suffix,
                        out.targets[i].velocity_mps});
    if (i < cfg.radar_targets.size()) {
      out.rows.push_back({cfg.id, cfg.seed, snr_rad, "range_true_m" + suffix,
                          cfg.radar_targets[i].range_m});
      out.rows.push_back({cfg.id, cfg.seed, snr_rad,
                          "velocity_true_mps" + suffix,
                          cfg.radar_targets[i].velocity_mps});
    }
  }
  out.rows.push_back({cfg.id, cfg.seed, snr_rad, "ber:com", out.ber_value});
  out.rows.push_back({cfg.id, cfg.seed, snr_rad, "peak_to_median_db",
                      out.peak_to_median_db});

  if (want_dumps) {
    std::ostringstream f;
    f << "index,re,im\n";
    for (Eigen::Index i = 0; i < tx.frame.samples.size(); ++i)
      f << i << ',' << fmt_value(tx.frame.samples(i).real()) << ','
        << fmt_value(tx.frame.samples(i).imag()) << '\n';
    out.dumps.frame_csv = f.str();

    const Eigen::MatrixXcd yf = demodulate(rx_com, frame_cfg);
    const Eigen::MatrixXcd h_est =
        interpolate_channel(ls_estimate(yf, frame_cfg), frame_cfg);
    const Eigen::MatrixXcd h_true = genie_channel_response(chan_com, frame_cfg);
    std::ostringstream h;
    h << "m,n,est_re,est_im,true_re,true_im\n";
    for (int n = 0; n < frame_cfg.symbols; ++n)
      for (int m = 0; m < frame_cfg.subcarriers; ++m)
        h << m << ',' << n << ',' << fmt_value(h_est(m, n).real()) << ','
          << fmt_value(h_est(m, n).imag()) << ',' << fmt_value(h_true(m, n).real())
          << ',' << fmt_value(h_true(m, n).imag()) << '\n';
    out.dumps.channel_csv = h.str();

    std::ostringstream p;
    for (Eigen::Index r = 0; r < surface.rows(); ++r) {
      for (Eigen::Index c = 0; c < surface.cols(); ++c)
        p << (c ? "," : "") << fmt_value(surface(r, c));
      p << '\n';
    }
    out.dumps.periodogram_csv = p.str();

    const BitPayload rx_bits = qpsk_demap(res.xhat);
    std::ostringstream b;
    b << "index,tx,rx\n";
    for (std::size_t i = 0; i < bits.size(); ++i)
      b << i << ',' << int(bits[i]) << ',' << int(rx_bits[i]) << '\n';
    out.dumps.bits_csv = b.str();
  }
  return out;
}

}  // namespace ocdm
