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
#include "evhdr/filter.hpp"

#include <algorithm>
#include <cmath>

#include "evhdr/errors.hpp"

namespace evhdr {

FilterMode parse_filter_mode(const std::string& name) {
  if (name == "akf") return FilterMode::akf;
  if (name == "constant-gain" || name == "constant_gain" || name == "cf") {
    return FilterMode::constant_gain;
  }
  throw ValidationError("unknown filter mode '" + name + "' (expected akf or constant-gain)");
}

std::string to_string(FilterMode mode) {
  return mode == FilterMode::akf ? "akf" : "constant-gain";
}

void FilterConfig::validate() const {
  if (!(p0 > 0)) throw ValidationError("p0 must be positive");
  if (mode == FilterMode::constant_gain && !(k_const > 0)) {
    throw ValidationError("k_const must be positive in constant-gain mode");
  }
  if (output_rate && !(*output_rate > 0)) throw ValidationError("output rate must be positive");
}

PixelFilterState decay_state(const PixelFilterState& state, double l_a_last, double l_a_now,
                             double r, double t) {
  require(t >= state.t_last, "decay_state: time runs backwards");
  require(r > 0, "decay_state: frame covariance must be positive");
  const double dt = t - state.t_last;
  if (dt == 0.0) {
    const double l = l_a_last == l_a_now ? state.l_hat : (state.l_hat - l_a_last) + l_a_now;
    return {l, state.p_cov, t};
  }
  const double p_inv = 1.0 / std::max(state.p_cov, kCovarianceFloor);
  const double p_inv_new = p_inv + dt / r;
  return {(state.l_hat - l_a_last) * p_inv / p_inv_new + l_a_now, 1.0 / p_inv_new, t};
}

PixelFilterState decay_state_constant_gain(const PixelFilterState& state, double l_a_last,
                                           double l_a_now, double k, double t) {
  require(t >= state.t_last, "decay_state: time runs backwards");
  require(k > 0, "decay_state: gain must be positive");
  const double dt = t - state.t_last;
  return {(state.l_hat - l_a_last) * std::exp(-k * dt) + l_a_now, state.p_cov, t};
}

double kalman_gain(const PixelFilterState& state, double r) {
  require(r > 0, "kalman_gain: frame covariance must be positive");
  return state.p_cov / r;
}

}  // namespace evhdr
