// Copyright 2026 The evhdr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include <algorithm>
#include <cmath>

#include "evhdr/crf.hpp"
#include "evhdr/errors.hpp"
#include "evhdr/log.hpp"

namespace evhdr {

namespace {

double interp(const std::array<double, kCrfLevels>& table, double pos) {
  pos = std::clamp(pos, 0.0, kMaxResponse);
  if (pos == kMaxResponse) return table.back();
  const int i = std::min(static_cast<int>(pos), kCrfLevels - 2);
  const double f = pos - i;
  return table[i] + f * (table[i + 1] - table[i]);
}

// Position (in sample units) where a non-decreasing table first reaches
// `value`; flat runs at either end resolve to their inner edge.
double invert_monotone(const std::array<double, kCrfLevels>& table, double value) {
  const double lo = table.front();
  const double hi = table.back();
  if (value <= lo) {
    int i = 0;
    while (i + 1 < kCrfLevels && table[i + 1] == lo) ++i;
    return i;
  }
  if (value >= hi) {
    int i = kCrfLevels - 1;
    while (i > 0 && table[i - 1] == hi) --i;
    return i;
  }
  const auto it = std::lower_bound(table.begin(), table.end(), value);
  const int i1 = static_cast<int>(it - table.begin());
  const int i0 = i1 - 1;
  const double span = table[i1] - table[i0];
  return span > 0 ? i0 + (value - table[i0]) / span : i1;
}

void require_monotone(const std::array<double, kCrfLevels>& table, const char* what) {
  for (int i = 1; i < kCrfLevels; ++i) {
    if (!(table[i] >= table[i - 1])) {
      throw ValidationError(std::string(what) + " must be non-decreasing");
    }
  }
}

}  // namespace

CrfTable CrfTable::from_response_curve(const std::function<double(double)>& crf) {
  CrfTable t;
  for (int i = 0; i < kCrfLevels; ++i) {
    t.forward_[i] = std::clamp(crf(i / kMaxResponse), 0.0, kMaxResponse);
  }
  require_monotone(t.forward_, "camera response");
  if (t.forward_.front() == t.forward_.back()) throw ValidationError("camera response is constant");
  for (int j = 0; j < kCrfLevels; ++j) {
    t.inverse_[j] = invert_monotone(t.forward_, j) / kMaxResponse;
  }
  t.finish(std::nullopt);
  return t;
}

CrfTable CrfTable::from_inverse(std::span<const double> irradiance_of_response,
                                std::optional<std::span<const double>> weights) {
  if (irradiance_of_response.size() != kCrfLevels) {
    throw ValidationError("inverse response table needs 256 samples");
  }
  CrfTable t;
  std::copy(irradiance_of_response.begin(), irradiance_of_response.end(), t.inverse_.begin());
  require_monotone(t.inverse_, "inverse response");
  if (t.inverse_.front() == t.inverse_.back()) throw ValidationError("inverse response is constant");
  for (int i = 0; i < kCrfLevels; ++i) {
    t.forward_[i] = invert_monotone(t.inverse_, i / kMaxResponse);
  }
  if (weights && weights->size() != kCrfLevels) {
    throw ValidationError("weighting table needs 256 samples");
  }
  t.finish(weights);
  return t;
}

void CrfTable::finish(std::optional<std::span<const double>> weights) {
  lo_level_ = 0;
  while (lo_level_ + 1 < kCrfLevels && inverse_[lo_level_ + 1] == inverse_.front()) ++lo_level_;
  hi_level_ = kCrfLevels - 1;
  while (hi_level_ > 0 && inverse_[hi_level_ - 1] == inverse_.back()) --hi_level_;

  if (weights) {
    double peak = 0.0;
    for (double w : *weights) {
      if (!(w >= 0) || !std::isfinite(w)) throw ValidationError("weights must be finite and >= 0");
      peak = std::max(peak, w);
    }
    if (peak <= 0) throw ValidationError("weighting table is identically zero");
    for (int j = 0; j < kCrfLevels; ++j) weight_[j] = std::max((*weights)[j] / peak, kWeightFloor);
    return;
  }

  // dCRF/dI at CRF^-1(j) is the reciprocal slope of the inverse table.
  std::array<double, kCrfLevels> raw{};
  double peak = 0.0;
  for (int j = lo_level_ + 1; j < hi_level_; ++j) {
    const double slope = 0.5 * (inverse_[j + 1] - inverse_[j - 1]);
    raw[j] = slope > 0 ? 1.0 / slope : 0.0;
    peak = std::max(peak, raw[j]);
  }
  for (int j = 0; j < kCrfLevels; ++j) {
    const bool interior = j > lo_level_ && j < hi_level_ && peak > 0;
    weight_[j] = interior ? std::max(raw[j] / peak, kWeightFloor) : kWeightFloor;
  }
}

double CrfTable::response(double irradiance) const {
  return interp(forward_, std::clamp(irradiance, 0.0, 1.0) * kMaxResponse);
}

double CrfTable::irradiance(double response) const { return interp(inverse_, response); }

double CrfTable::weighting(double response) const {
  if (response < 0.0 || response > kMaxResponse) {
    log_debug("weighting: response ", response, " outside [0, 255], clamped");
  }
  return std::max(interp(weight_, response), kWeightFloor);
}

bool CrfTable::saturated(double response) const {
  return response <= lo_level_ || response >= hi_level_;
}

}  // namespace evhdr
