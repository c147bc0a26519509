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
#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "evhdr/image.hpp"

namespace evhdr {

inline constexpr int kCrfLevels = 256;
inline constexpr double kMaxResponse = kCrfLevels - 1;
/// Lower bound applied to the weighting function so 1/f^w stays finite.
inline constexpr double kWeightFloor = 1e-3;

/// Sampled camera response function.
///
/// Irradiance is normalised to [0, 1]; responses are raw levels in [0, 255].
/// The table keeps the inverse response (irradiance per response level), the
/// forward response sampled on a uniform irradiance grid, and the weighting
/// function f^w = (dCRF/dI) o CRF^-1 renormalised to a maximum of one.
/// Response levels at or beyond either end of the reachable response range
/// are saturated and carry the floor weight.
class CrfTable {
 public:
  /// Samples `crf` (normalised irradiance -> response level) on 256 points.
  /// The curve must be non-decreasing.
  static CrfTable from_response_curve(const std::function<double(double)>& crf);

  /// Builds a table from the inverse response. Weights are derived from the
  /// inverse when not supplied.
  static CrfTable from_inverse(std::span<const double> irradiance_of_response,
                               std::optional<std::span<const double>> weights = std::nullopt);

  static CrfTable identity() {
    return from_response_curve([](double i) { return i * kMaxResponse; });
  }

  /// Forward response at normalised irradiance (clamped to [0, 1]).
  double response(double irradiance) const;
  /// Inverse response at a response level (clamped to [0, 255]).
  double irradiance(double response) const;
  /// Linear interpolation of the weighting table; out-of-domain responses are
  /// clamped to the nearest endpoint. Result is at least kWeightFloor.
  double weighting(double response) const;

  /// True when the response level lies in a saturated (flat) part of the CRF.
  bool saturated(double response) const;

  const std::array<double, kCrfLevels>& inverse_samples() const { return inverse_; }
  const std::array<double, kCrfLevels>& forward_samples() const { return forward_; }
  const std::array<double, kCrfLevels>& weight_samples() const { return weight_; }
  int lowest_responsive_level() const { return lo_level_; }
  int highest_responsive_level() const { return hi_level_; }

  /// Covariance saturation cap; unset means sigma2_im / kWeightFloor.
  std::optional<double> r_max() const { return r_max_; }
  void set_r_max(std::optional<double> r) { r_max_ = r; }

 private:
  CrfTable() = default;
  void finish(std::optional<std::span<const double>> weights);

  std::array<double, kCrfLevels> inverse_{};
  std::array<double, kCrfLevels> forward_{};
  std::array<double, kCrfLevels> weight_{};
  int lo_level_ = 0;
  int hi_level_ = kCrfLevels - 1;
  std::optional<double> r_max_;
};

/// One image of a static scene captured at a known exposure time.
struct ExposureSample {
  double exposure = 0.0;
  Image8 raw;
};

/// Raised when an exposure stack cannot determine the response curve.
class CrfFitError : public std::runtime_error {
 public:
  CrfFitError(const std::string& what, int uncovered_lo, int uncovered_hi)
      : std::runtime_error(what), uncovered_lo_(uncovered_lo), uncovered_hi_(uncovered_hi) {}
  int uncovered_lo() const { return uncovered_lo_; }
  int uncovered_hi() const { return uncovered_hi_; }

 private:
  int uncovered_lo_;
  int uncovered_hi_;
};

struct CrfFitOptions {
  /// Weight of the second-difference penalty on the log response.
  double smoothness = 100.0;
  /// Pixels sampled from the stack for the least-squares system.
  int max_pixels = 400;
  /// Levels spanned by the regression that estimates the weighting slope.
  int slope_window = 17;
  /// Gaps of unobserved levels up to this width are interpolated.
  int max_level_gap = 8;
};

/// Least-squares estimate of the log inverse response from an exposure
/// stack, with a smoothness penalty. Throws CrfFitError when fewer than three exposures are
/// given or the exposures do not overlap over the observed response range.
CrfTable fit_crf(std::span<const ExposureSample> stack, const CrfFitOptions& options = {});

}  // namespace evhdr
