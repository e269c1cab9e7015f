// SPDX-License-Identifier: Apache-2.0
#include "ocdm/frame.hpp"

#include <cmath>
#include <stdexcept>

namespace ocdm {

std::vector<int> FrameConfig::pilot_rows() const {
  std::vector<int> rows;
  if (pilot_count > 0) {
    rows.reserve(pilot_count);
    for (int k = 0; k < pilot_count; ++k) rows.push_back(k * group_len());
  }
  return rows;
}

std::vector<int> FrameConfig::data_rows() const {
  std::vector<int> rows;
  rows.reserve(data_count());
  for (int m = 0; m < subcarriers; ++m)
    if (!is_pilot_row(m)) rows.push_back(m);
  return rows;
}

void FrameConfig::validate() const {
  auto fail = [](const std::string& msg) {
    throw std::invalid_argument("FrameConfig: " + msg);
  };
  if (subcarriers < 2 || subcarriers % 2 != 0)
    fail("subcarriers must be even and >= 2, got " + std::to_string(subcarriers));
  if (symbols < 1) fail("symbols must be >= 1");
  if (bandwidth_hz <= 0) fail("bandwidth must be positive");
  if (carrier_hz <= 0) fail("carrier must be positive");
  if (pilot_count < 0) fail("pilot count must be >= 0");
  if (pilot_count > 0 && subcarriers % pilot_count != 0)
    fail("subcarriers (" + std::to_string(subcarriers) +
         ") must be divisible by pilot count (" + std::to_string(pilot_count) + ")");
  if (pilot_count >= subcarriers) fail("pilot count must be < subcarriers");
  if (cp_ratio <= 0 || cp_ratio >= 1) fail("cp_ratio must be in (0, 1)");
  const double lcp = cp_ratio * subcarriers;
  if (std::abs(lcp - std::lround(lcp)) > 1e-9)
    fail("cp_ratio * subcarriers must be an integer, got " + std::to_string(lcp));
  if (cp_len() < 1) fail("cyclic prefix must span at least one sample");
}

}  // namespace ocdm
