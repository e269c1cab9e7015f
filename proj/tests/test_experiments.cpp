// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <chrono>
#include <cstdlib>
#include <limits>

#include "ocdm/experiments.hpp"

using namespace ocdm;

namespace {
// Small frame so sweep tests stay fast.
std::string small_config_text() {
  return R"([frame]
carrier_hz = 79e9
bandwidth_hz = 64e6
subcarriers = 64
symbols = 8
pilot_count = 4
cp_ratio = 0.25
pilot_amplitude = 1.4142135623730951

[channel_com]
paths = 3
delay_spread_ns = 0
max_velocity_mps = 30

[radar]
range_m = 20
velocity_mps = 22.22
gain_re = 1
gain_im = 0

[periodogram]
delay_oversample = 4
doppler_oversample = 4
refine = quadratic
wipe_min_modulus = 0.5

[sweep]
snr_db = 5,15
trials = 6

[run]
seed = 7
mode = ocdm
equalizer = mmse
estimation = ls
symbols_source = decoded
id = smoke
)";
}
}  // namespace

TEST_CASE("config parsing and canonical round trip") {
  const auto cfg = parse_config(small_config_text(), "small.cfg");
  CHECK(cfg.frame.subcarriers == 64);
  CHECK(cfg.frame.symbols == 8);
  CHECK(cfg.trials == 6);
  CHECK(cfg.seed == 7);
  CHECK(cfg.snr_sweep_db == std::vector<double>{5, 15});
  const std::string canon = cfg.serialize();
  const auto reparsed = parse_config(canon, "canon.cfg");
  CHECK(reparsed.serialize() == canon);
  CHECK(reparsed.hash() == cfg.hash());
}

TEST_CASE("config diagnostics carry file and line") {
  const std::string bad = "[frame]\nsubcarriers = 64\nbogus_key = 1\n";
  try {
    parse_config(bad, "bad.cfg");
    FAIL("expected parse error");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("bad.cfg:3") != std::string::npos);
    CHECK(msg.find("bogus_key") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config("[nope]\nx = 1\n", "s.cfg"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("[frame]\nsubcarriers = banana\n", "s.cfg"),
                  std::invalid_argument);
  // Invariant violations surface through validate().
  std::string odd = small_config_text();
  odd.replace(odd.find("subcarriers = 64"), 16, "subcarriers = 63");
  CHECK_THROWS_AS(parse_config(odd, "odd.cfg"), std::invalid_argument);
}

TEST_CASE("snr range syntax") {
  std::string txt = small_config_text();
  txt.replace(txt.find("snr_db = 5,15"), 13, "snr_db = 0:5:10");
  const auto cfg = parse_config(txt, "r.cfg");
  CHECK(cfg.snr_sweep_db == std::vector<double>{0, 5, 10});
}

TEST_CASE("ber sweep: deterministic across thread counts") {
  const auto cfg = parse_config(small_config_text(), "small.cfg");
  const auto rows1 = run_ber_sweep(cfg, 1);
  const auto rows4 = run_ber_sweep(cfg, 4);
  const std::string csv1 = results_csv(cfg, rows1);
  const std::string csv4 = results_csv(cfg, rows4);
  CHECK(csv1 == csv4);
  CHECK(csv1.find("experiment,seed,snr_db,metric,value\n") != std::string::npos);
  CHECK(csv1.find("ber:ls:zf") != std::string::npos);
  CHECK(csv1.find("ber:csi:mmse") != std::string::npos);
}

TEST_CASE("rmse sweep: deterministic and self-consistent CRLB column") {
  auto cfg = parse_config(small_config_text(), "small.cfg");
  cfg.trials = 4;
  cfg.snr_sweep_db = {20};
  const auto rows1 = run_rmse_sweep(cfg, 1);
  const auto rows4 = run_rmse_sweep(cfg, 4);
  CHECK(results_csv(cfg, rows1) == results_csv(cfg, rows4));
  double crlb_row = -1;
  for (const auto& r : rows1)
    if (r.metric == "crlb:range_m") crlb_row = r.value;
  const auto direct = crlb(cfg.frame, std::pow(10.0, 2.0));
  CHECK(crlb_row == doctest::Approx(direct.range_rmse_m).epsilon(1e-12));
}

TEST_CASE("noiseless sweep: perfect-CSI BER columns are exactly zero") {
  auto cfg = parse_config(small_config_text(), "small.cfg");
  cfg.snr_sweep_db = {std::numeric_limits<double>::infinity()};
  cfg.trials = 4;
  const auto rows = run_ber_sweep(cfg, 2);
  for (const auto& r : rows) {
    if (r.metric == "ber:csi:zf" || r.metric == "ber:csi:mmse")
      CHECK(r.value == 0.0);
    if (r.metric == "ber:ls:zf" || r.metric == "ber:ls:mmse")
      CHECK(r.value == 0.0);  // flat com channel: LS is exact without noise
  }
}

TEST_CASE("single run emits estimates and dumps") {
  auto cfg = parse_config(small_config_text(), "small.cfg");
  cfg.snr_sweep_db = {20};
  const auto res = run_single(cfg, true);
  REQUIRE(res.targets.size() == 1);
  CHECK(res.targets[0].range_m > 0);
  CHECK(!res.dumps.frame_csv.empty());
  CHECK(!res.dumps.channel_csv.empty());
  CHECK(!res.dumps.periodogram_csv.empty());
  CHECK(!res.dumps.bits_csv.empty());
  CHECK(res.dumps.frame_csv.rfind("index,re,im\n", 0) == 0);
}

TEST_CASE("genie single run reproduces the radar-only pipeline") {
  auto cfg = parse_config(small_config_text(), "small.cfg");
  cfg.snr_sweep_db = {15};
  cfg.estimation = ExperimentConfig::Estimation::perfect_csi;
  cfg.symbols_source = ExperimentConfig::SymbolSource::truth;
  const auto a = run_single(cfg, false);
  const auto b = run_single(cfg, false);
  REQUIRE(a.targets.size() == 1);
  CHECK(a.targets[0].range_m == b.targets[0].range_m);
  CHECK(a.targets[0].velocity_mps == b.targets[0].velocity_mps);
  CHECK(a.ber_value == 0.0);  // genie symbols decode error-free by definition
}

TEST_CASE("explicit com path list round-trips and drives the harness") {
  std::string txt = small_config_text();
  txt.replace(txt.find("[radar]"), 7,
              "path_gain_re = 1\npath_gain_im = 0\npath_delay_ns = 0\n"
              "path_doppler_hz = 0\n\n[radar]");
  auto cfg = parse_config(txt, "fixed.cfg");
  REQUIRE(cfg.com_fixed_paths.size() == 1);
  CHECK(cfg.com_fixed_paths[0].gain == std::complex<double>(1, 0));
  const auto reparsed = parse_config(cfg.serialize(), "canon.cfg");
  CHECK(reparsed.serialize() == cfg.serialize());

  // Unit fixed channel + noiseless: LS is exact, so every BER metric is 0.
  cfg.snr_sweep_db = {std::numeric_limits<double>::infinity()};
  cfg.trials = 3;
  for (const auto& r : run_ber_sweep(cfg, 1))
    CHECK(r.value == 0.0);

  // Paths violating the channel invariants are rejected at load.
  std::string bad = small_config_text();
  bad.replace(bad.find("[radar]"), 7,
              "path_gain_re = 1\npath_gain_im = 0\npath_delay_ns = 900\n"
              "path_doppler_hz = 0\n\n[radar]");  // 900 ns >= T_cp
  CHECK_THROWS_AS(parse_config(bad, "bad.cfg"), std::invalid_argument);
}

TEST_CASE("noiseless on-grid target gives zero RMSE") {
  auto cfg = parse_config(small_config_text(), "small.cfg");
  // Delay exactly on periodogram bin 40, zero velocity (bin 0).
  const double mper = cfg.periodogram.delay_bins(cfg.frame);
  cfg.radar_targets = {{40.0 * kSpeedOfLight / (cfg.frame.df() * mper), 0.0,
                        {1.0, 0.0}}};
  cfg.snr_sweep_db = {std::numeric_limits<double>::infinity()};
  cfg.snr_com_db = std::numeric_limits<double>::infinity();
  cfg.trials = 3;
  const auto rows = run_rmse_sweep(cfg, 1);
  for (const auto& r : rows) {
    if (r.metric == "rmse:range_m") CHECK(r.value < 1e-9);
    if (r.metric == "rmse:velocity_mps") CHECK(r.value < 1e-9);
  }
}

TEST_CASE("genie and decoded symbol wipes are within 1 dB equivalent SNR") {
  // Paired trials (same seeds, same noise): the only difference is the
  // wipe divisor.  RMSE scales as 1/sqrt(SNR), so the equivalent SNR shift
  // is 20 log10 of the RMSE ratio.
  ExperimentConfig cfg = default_config();
  cfg.com_delay_spread_ns = 310.0;
  cfg.estimation = ExperimentConfig::Estimation::perfect_csi;
  cfg.snr_com_db = 15.0;
  cfg.trials = 100;
  ExperimentConfig genie_cfg = cfg;
  genie_cfg.symbols_source = ExperimentConfig::SymbolSource::truth;
  const RmseHarness decoded(cfg);
  const RmseHarness genie(genie_cfg);
  double dec2 = 0, gen2 = 0;
  for (int i = 0; i < cfg.trials; ++i) {
    const std::uint64_t seed = Rng::derive(cfg.seed, i);
    const auto a = decoded.trial(0.0, seed);
    const auto b = genie.trial(0.0, seed);
    dec2 += a.range_err_m[0] * a.range_err_m[0];
    gen2 += b.range_err_m[0] * b.range_err_m[0];
  }
  const double shift_db = 20.0 * std::log10(std::sqrt(dec2 / gen2));
  INFO("equivalent SNR shift ", shift_db, " dB");
  CHECK(shift_db < 1.0);
}

TEST_CASE("single run at 10 dB shows a dominant periodogram peak") {
  ExperimentConfig cfg = default_config();  // reference scenario target
  cfg.snr_sweep_db = {10};
  const auto res = run_single(cfg, false);
  CHECK(res.peak_to_median_db > 20.0);
  REQUIRE(res.targets.size() == 1);
  CHECK(std::abs(res.targets[0].range_m - 20.0) < 0.75);
}

TEST_CASE("throughput: full ISAC trials per second" * doctest::skip(false)) {
  const char* env = std::getenv("OCDM_PERF_MIN_TPS");
  const double min_tps = env ? std::atof(env) : 50.0;
  if (min_tps <= 0) return;
  ExperimentConfig cfg = default_config();  // reference frame, 4x periodogram
  const RmseHarness harness(cfg);
  // Warm the FFT plan cache before timing.
  harness.trial(10.0, Rng::derive(1, 0));
  const auto start = std::chrono::steady_clock::now();
  const int n = 25;
  for (int i = 0; i < n; ++i) harness.trial(10.0, Rng::derive(1, i));
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  const double tps = n / secs;
  INFO("measured ", tps, " trials/s");
  CHECK(tps >= min_tps);
}
