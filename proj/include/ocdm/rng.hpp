// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>

namespace ocdm {

/**
 * Small deterministic RNG (splitmix64 core) used everywhere instead of the
 * standard distributions so that results are bit-reproducible across
 * platforms, standard libraries and thread counts.  Instances are value
 * types; Monte Carlo code derives one independent stream per trial.
 */
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n] inclusive.
  std::uint64_t uniform_int(std::uint64_t n) { return next_u64() % (n + 1); }

  // Standard normal via Box-Muller.
  double gaussian() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.283185307179586476925286766559 * u2);
  }

  // Circularly symmetric complex Gaussian CN(0, 1).
  std::complex<double> cgaussian() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-std::log(u1));
    const double phi = 6.283185307179586476925286766559 * u2;
    return {r * std::cos(phi), r * std::sin(phi)};
  }

  bool bit() { return (next_u64() >> 63) != 0; }

  // Independent stream seed for sub-task `index` under `master`.
  static std::uint64_t derive(std::uint64_t master, std::uint64_t index) {
    Rng r(master ^ (0xD1B54A32D192ED03ULL * (index + 1)));
    return r.next_u64();
  }

 private:
  std::uint64_t state_;
};

}  // namespace ocdm
