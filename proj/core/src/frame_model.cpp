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

#include "evhdr/errors.hpp"
#include "evhdr/frame_model.hpp"

namespace evhdr {

void FrameNoiseParams::validate() const {
  if (!(sigma2_im > 0)) throw ValidationError("sigma2_im must be positive");
  if (!(i_offset > 0)) throw ValidationError("i_offset must be positive");
}

double frame_covariance(const CrfTable& crf, double response, const FrameNoiseParams& params) {
  const double cap = crf.r_max().value_or(params.sigma2_im / kWeightFloor);
  return std::min(params.sigma2_im / crf.weighting(response), cap);
}

double interpolate_covariance(double r_k, double r_k1, double tau_k, double tau_k1, double t) {
  require(tau_k < tau_k1, "interpolate_covariance: frame times must increase");
  require(t >= tau_k && t <= tau_k1, "interpolate_covariance: t outside [tau_k, tau_k1]");
  const double span = tau_k1 - tau_k;
  return ((t - tau_k) / span) * r_k1 + ((tau_k1 - t) / span) * r_k;
}

LogSample log_intensity_of(double irradiance, double rbar, double i_offset) {
  const double shifted = irradiance + i_offset;
  const double inv2 = 1.0 / (shifted * shifted);
  return {std::log(shifted) - 0.5 * rbar * inv2, rbar * inv2};
}

LogFrame to_log_frame(const FrameObservation& frame, const CrfTable& crf,
                      const FrameNoiseParams& params) {
  require(frame.exposure > 0, "to_log_frame: exposure must be positive");
  const int w = frame.raw.width(), h = frame.raw.height();
  LogFrame out{frame.tau, ImageF(w, h), ImageF(w, h), ImageF(w, h), ImageF(w, h)};
  for (std::size_t i = 0; i < frame.raw.size(); ++i) {
    const double response = frame.raw[i];
    const double irr = crf.irradiance(response);
    const double rbar = frame_covariance(crf, response, params);
    const LogSample s = log_intensity_of(irr, rbar, params.i_offset);
    out.irradiance[i] = irr;
    out.raw_covariance[i] = rbar;
    out.log_intensity[i] = s.log_intensity;
    out.covariance[i] = s.covariance;
  }
  return out;
}

}  // namespace evhdr
