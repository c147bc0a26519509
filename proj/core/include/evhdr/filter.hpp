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

#include <optional>
#include <string>

namespace evhdr {

/// Per-pixel estimate of log intensity and its covariance.
struct PixelFilterState {
  double l_hat = 0.0;
  double p_cov = 1.0;
  double t_last = 0.0;
};

enum class FilterMode { akf, constant_gain };

FilterMode parse_filter_mode(const std::string& name);
std::string to_string(FilterMode mode);

struct FilterConfig {
  double p0 = 1.0;
  FilterMode mode = FilterMode::akf;
  double k_const = 2.0;  // 1/s, constant-gain mode only
  /// Output sampling rate in Hz; unset samples at the frame timestamps.
  std::optional<double> output_rate;

  void validate() const;
};

/// Lower bound on P before it is inverted.
inline constexpr double kCovarianceFloor = 1e-12;

/// Closed-form solution of the Kalman-Bucy filter between updates, with the
/// frame covariance `r` held constant over [t_last, t]:
///   P(t)  = 1 / (1/P + dt/R)
///   L(t)  = (L - L^A(t_last)) * (1/P) / (1/P + dt/R) + L^A(t)
PixelFilterState decay_state(const PixelFilterState& state, double l_a_last, double l_a_now,
                             double r, double t);

/// Complementary-filter decay at a fixed gain k: the deviation from L^A
/// shrinks by exp(-k dt). The covariance is left untouched.
PixelFilterState decay_state_constant_gain(const PixelFilterState& state, double l_a_last,
                                           double l_a_now, double k, double t);

/// Discrete event update: L += increment, P += q.
inline PixelFilterState event_update(const PixelFilterState& state, double increment,
                                     double q) {
  return {state.l_hat + increment, state.p_cov + q, state.t_last};
}

/// K = P / R.
double kalman_gain(const PixelFilterState& state, double r);

}  // namespace evhdr
