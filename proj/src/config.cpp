// SPDX-License-Identifier: Apache-2.0
#include "ocdm/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ocdm {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail_at(const std::string& file, int line, const std::string& msg) {
  throw std::invalid_argument(file + ":" + std::to_string(line) + ": " + msg);
}

double parse_double(const std::string& file, int line, const std::string& v) {
  if (v == "inf" || v == "+inf") return std::numeric_limits<double>::infinity();
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return d;
  } catch (...) {
    fail_at(file, line, "expected a number, got '" + v + "'");
  }
}

long parse_int(const std::string& file, int line, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long d = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return d;
  } catch (...) {
    fail_at(file, line, "expected an integer, got '" + v + "'");
  }
}

std::uint64_t parse_u64(const std::string& file, int line, const std::string& v) {
  try {
    std::size_t pos = 0;
    const std::uint64_t d = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return d;
  } catch (...) {
    fail_at(file, line, "expected an unsigned integer, got '" + v + "'");
  }
}

bool parse_bool(const std::string& file, int line, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail_at(file, line, "expected true/false, got '" + v + "'");
}

std::vector<std::string> split(const std::string& v, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

// "a,b,c" or "start:step:stop" (inclusive)
std::vector<double> parse_double_list(const std::string& file, int line,
                                      const std::string& v) {
  std::vector<double> out;
  if (v.find(':') != std::string::npos) {
    const auto parts = split(v, ':');
    if (parts.size() != 3) fail_at(file, line, "range must be start:step:stop");
    const double start = parse_double(file, line, parts[0]);
    const double step = parse_double(file, line, parts[1]);
    const double stop = parse_double(file, line, parts[2]);
    if (!(step > 0)) fail_at(file, line, "range step must be positive");
    for (double x = start; x <= stop + 1e-9; x += step) out.push_back(x);
    return out;
  }
  for (const auto& item : split(v, ','))
    if (!item.empty()) out.push_back(parse_double(file, line, item));
  return out;
}

std::string fmt(double v) {
  if (std::isinf(v)) return "inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ComChannelParams ExperimentConfig::com_params() const {
  ComChannelParams p;
  p.paths = com_paths;
  p.delay_spread_s = com_delay_spread_ns * 1e-9;
  p.max_doppler_hz = max_doppler_hz();
  p.sample_spaced = com_sample_spaced;
  return p;
}

void ExperimentConfig::validate() const {
  frame.validate();
  if (com_paths < 1)
    throw std::invalid_argument("config: channel_com.paths must be >= 1");
  if (com_delay_spread_ns < 0)
    throw std::invalid_argument("config: delay spread must be >= 0");
  if (com_delay_spread_ns * 1e-9 >= frame.cp_duration())
    throw std::invalid_argument("config: com delay spread must stay below T_cp");
  if (max_doppler_hz() >= frame.df())
    throw std::invalid_argument(
        "config: com Doppler spread reaches the subcarrier spacing");
  if (!com_fixed_paths.empty()) {
    ChannelSpec spec{com_fixed_paths, ChannelKind::com};
    spec.validate(frame);  // throws on delay/doppler violations
  }
  if (radar_targets.empty())
    throw std::invalid_argument("config: at least one radar target required");
  for (const auto& t : radar_targets)
    radar_target_channel(t.range_m, t.velocity_mps, t.gain, frame);  // throws
  periodogram.validate(frame);
  if (wipe_min_modulus < 0 || wipe_min_modulus >= 1)
    throw std::invalid_argument("config: wipe_min_modulus must be in [0, 1)");
  if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  if (snr_sweep_db.empty())
    throw std::invalid_argument("config: sweep.snr_db must be non-empty");
}

ExperimentConfig parse_config(const std::string& text, const std::string& filename) {
  ExperimentConfig cfg = default_config();
  cfg.snr_sweep_db.clear();

  std::vector<double> ranges{20.0}, velocities{22.22}, gains_re{1.0}, gains_im{0.0};
  bool radar_touched = false;
  std::vector<double> fixed_gre, fixed_gim, fixed_delay, fixed_dop;

  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    const auto hash_pos = s.find('#');
    if (hash_pos != std::string::npos) s = s.substr(0, hash_pos);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail_at(filename, line, "unterminated section header");
      section = s.substr(1, s.size() - 2);
      if (section != "frame" && section != "channel_com" && section != "radar" &&
          section != "periodogram" && section != "sweep" && section != "run")
        fail_at(filename, line, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail_at(filename, line, "expected key = value");
    const std::string key = trim(s.substr(0, eq));
    const std::string val = trim(s.substr(eq + 1));
    if (section.empty()) fail_at(filename, line, "key outside any section");

    if (section == "frame") {
      if (key == "carrier_hz") cfg.frame.carrier_hz = parse_double(filename, line, val);
      else if (key == "bandwidth_hz") cfg.frame.bandwidth_hz = parse_double(filename, line, val);
      else if (key == "subcarriers") cfg.frame.subcarriers = static_cast<int>(parse_int(filename, line, val));
      else if (key == "symbols") cfg.frame.symbols = static_cast<int>(parse_int(filename, line, val));
      else if (key == "pilot_count") cfg.frame.pilot_count = static_cast<int>(parse_int(filename, line, val));
      else if (key == "cp_ratio") cfg.frame.cp_ratio = parse_double(filename, line, val);
      else if (key == "pilot_amplitude") cfg.frame.pilot_amplitude = parse_double(filename, line, val);
      else if (key == "modulation") {
        if (val != "qpsk") fail_at(filename, line, "unsupported modulation '" + val + "'");
      } else fail_at(filename, line, "unknown key '" + key + "' in [frame]");
    } else if (section == "channel_com") {
      if (key == "paths") cfg.com_paths = static_cast<int>(parse_int(filename, line, val));
      else if (key == "delay_spread_ns") cfg.com_delay_spread_ns = parse_double(filename, line, val);
      else if (key == "max_velocity_mps") cfg.com_max_velocity_mps = parse_double(filename, line, val);
      else if (key == "sample_spaced") cfg.com_sample_spaced = parse_bool(filename, line, val);
      else if (key == "path_gain_re") fixed_gre = parse_double_list(filename, line, val);
      else if (key == "path_gain_im") fixed_gim = parse_double_list(filename, line, val);
      else if (key == "path_delay_ns") fixed_delay = parse_double_list(filename, line, val);
      else if (key == "path_doppler_hz") fixed_dop = parse_double_list(filename, line, val);
      else fail_at(filename, line, "unknown key '" + key + "' in [channel_com]");
    } else if (section == "radar") {
      radar_touched = true;
      if (key == "range_m") ranges = parse_double_list(filename, line, val);
      else if (key == "velocity_mps") velocities = parse_double_list(filename, line, val);
      else if (key == "gain_re") gains_re = parse_double_list(filename, line, val);
      else if (key == "gain_im") gains_im = parse_double_list(filename, line, val);
      else fail_at(filename, line, "unknown key '" + key + "' in [radar]");
    } else if (section == "periodogram") {
      if (key == "delay_oversample")
        cfg.periodogram.delay_size = cfg.frame.subcarriers * static_cast<int>(parse_int(filename, line, val));
      else if (key == "doppler_oversample")
        cfg.periodogram.doppler_size = cfg.frame.symbols * static_cast<int>(parse_int(filename, line, val));
      else if (key == "delay_size") cfg.periodogram.delay_size = static_cast<int>(parse_int(filename, line, val));
      else if (key == "doppler_size") cfg.periodogram.doppler_size = static_cast<int>(parse_int(filename, line, val));
      else if (key == "refine") {
        if (val == "quadratic") cfg.periodogram.refine = true;
        else if (val == "none") cfg.periodogram.refine = false;
        else fail_at(filename, line, "refine must be none|quadratic");
      } else if (key == "wipe_min_modulus") cfg.wipe_min_modulus = parse_double(filename, line, val);
      else if (key == "mask_bins") cfg.mask_bins = static_cast<int>(parse_int(filename, line, val));
      else fail_at(filename, line, "unknown key '" + key + "' in [periodogram]");
    } else if (section == "sweep") {
      if (key == "snr_db") cfg.snr_sweep_db = parse_double_list(filename, line, val);
      else if (key == "snr_com_db") cfg.snr_com_db = parse_double(filename, line, val);
      else if (key == "trials") cfg.trials = static_cast<int>(parse_int(filename, line, val));
      else fail_at(filename, line, "unknown key '" + key + "' in [sweep]");
    } else if (section == "run") {
      if (key == "seed") cfg.seed = parse_u64(filename, line, val);
      else if (key == "mode") {
        if (val == "ocdm") cfg.mode = Waveform::ocdm;
        else if (val == "ofdm") cfg.mode = Waveform::ofdm;
        else fail_at(filename, line, "mode must be ocdm|ofdm");
      } else if (key == "equalizer") {
        if (val == "zf") cfg.equalizer = EqualizerKind::zf;
        else if (val == "mmse") cfg.equalizer = EqualizerKind::mmse;
        else fail_at(filename, line, "equalizer must be zf|mmse");
      } else if (key == "estimation") {
        if (val == "ls") cfg.estimation = ExperimentConfig::Estimation::ls;
        else if (val == "perfect_csi") cfg.estimation = ExperimentConfig::Estimation::perfect_csi;
        else fail_at(filename, line, "estimation must be ls|perfect_csi");
      } else if (key == "symbols_source") {
        if (val == "decoded") cfg.symbols_source = ExperimentConfig::SymbolSource::decoded;
        else if (val == "truth") cfg.symbols_source = ExperimentConfig::SymbolSource::truth;
        else fail_at(filename, line, "symbols_source must be decoded|truth");
      } else if (key == "id") cfg.id = val;
      else fail_at(filename, line, "unknown key '" + key + "' in [run]");
    }
  }

  if (!fixed_gre.empty() || !fixed_gim.empty() || !fixed_delay.empty() ||
      !fixed_dop.empty()) {
    const std::size_t n = fixed_gre.size();
    if (fixed_gim.size() != n || fixed_delay.size() != n || fixed_dop.size() != n)
      throw std::invalid_argument(
          filename + ": fixed com path lists must have equal length");
    cfg.com_fixed_paths.clear();
    for (std::size_t i = 0; i < n; ++i)
      cfg.com_fixed_paths.push_back(
          {{fixed_gre[i], fixed_gim[i]}, fixed_delay[i] * 1e-9, fixed_dop[i]});
  }
  if (radar_touched) {
    if (ranges.size() != velocities.size() || ranges.size() != gains_re.size() ||
        ranges.size() != gains_im.size())
      throw std::invalid_argument(filename +
                                  ": radar range/velocity/gain lists must have equal length");
    cfg.radar_targets.clear();
    for (std::size_t i = 0; i < ranges.size(); ++i)
      cfg.radar_targets.push_back(
          {ranges[i], velocities[i], {gains_re[i], gains_im[i]}});
  }
  if (cfg.snr_sweep_db.empty()) cfg.snr_sweep_db = {0, 5, 10, 15, 20};
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

ExperimentConfig default_config() {
  ExperimentConfig cfg;
  cfg.frame = FrameConfig{};
  cfg.frame.pilot_amplitude = std::sqrt(2.0);
  cfg.snr_sweep_db = {0, 5, 10, 15, 20};
  return cfg;
}

std::string ExperimentConfig::serialize() const {
  std::ostringstream o;
  o << "[frame]\n"
    << "carrier_hz = " << fmt(frame.carrier_hz) << "\n"
    << "bandwidth_hz = " << fmt(frame.bandwidth_hz) << "\n"
    << "subcarriers = " << frame.subcarriers << "\n"
    << "symbols = " << frame.symbols << "\n"
    << "pilot_count = " << frame.pilot_count << "\n"
    << "cp_ratio = " << fmt(frame.cp_ratio) << "\n"
    << "pilot_amplitude = " << fmt(frame.pilot_amplitude) << "\n"
    << "modulation = qpsk\n"
    << "[channel_com]\n"
    << "paths = " << com_paths << "\n"
    << "delay_spread_ns = " << fmt(com_delay_spread_ns) << "\n"
    << "max_velocity_mps = " << fmt(com_max_velocity_mps) << "\n"
    << "sample_spaced = " << (com_sample_spaced ? "true" : "false") << "\n";
  if (!com_fixed_paths.empty()) {
    std::string gre, gim, dly, dop;
    for (std::size_t i = 0; i < com_fixed_paths.size(); ++i) {
      const std::string sep = i ? "," : "";
      gre += sep + fmt(com_fixed_paths[i].gain.real());
      gim += sep + fmt(com_fixed_paths[i].gain.imag());
      dly += sep + fmt(com_fixed_paths[i].delay_s * 1e9);
      dop += sep + fmt(com_fixed_paths[i].doppler_hz);
    }
    o << "path_gain_re = " << gre << "\npath_gain_im = " << gim
      << "\npath_delay_ns = " << dly << "\npath_doppler_hz = " << dop << "\n";
  }
  o << "[radar]\n";
  std::string r, v, gre, gim;
  for (std::size_t i = 0; i < radar_targets.size(); ++i) {
    const std::string sep = i ? "," : "";
    r += sep + fmt(radar_targets[i].range_m);
    v += sep + fmt(radar_targets[i].velocity_mps);
    gre += sep + fmt(radar_targets[i].gain.real());
    gim += sep + fmt(radar_targets[i].gain.imag());
  }
  o << "range_m = " << r << "\nvelocity_mps = " << v << "\ngain_re = " << gre
    << "\ngain_im = " << gim << "\n"
    << "[periodogram]\n"
    << "delay_size = " << periodogram.delay_bins(frame) << "\n"
    << "doppler_size = " << periodogram.doppler_bins(frame) << "\n"
    << "refine = " << (periodogram.refine ? "quadratic" : "none") << "\n"
    << "wipe_min_modulus = " << fmt(wipe_min_modulus) << "\n"
    << "mask_bins = " << mask_bins << "\n"
    << "[sweep]\nsnr_db = ";
  for (std::size_t i = 0; i < snr_sweep_db.size(); ++i)
    o << (i ? "," : "") << fmt(snr_sweep_db[i]);
  o << "\nsnr_com_db = " << fmt(snr_com_db) << "\ntrials = " << trials << "\n"
    << "[run]\n"
    << "seed = " << seed << "\n"
    << "mode = " << (mode == Waveform::ocdm ? "ocdm" : "ofdm") << "\n"
    << "equalizer = " << (equalizer == EqualizerKind::zf ? "zf" : "mmse") << "\n"
    << "estimation = " << (estimation == Estimation::ls ? "ls" : "perfect_csi") << "\n"
    << "symbols_source = "
    << (symbols_source == SymbolSource::decoded ? "decoded" : "truth") << "\n"
    << "id = " << id << "\n";
  return o.str();
}

std::uint64_t ExperimentConfig::hash() const {
  // FNV-1a over the canonical serialization.
  const std::string s = serialize();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace ocdm
