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

#include "evhdr/crf.hpp"
#include "evhdr/image.hpp"

namespace evhdr {

struct FrameNoiseParams {
  double sigma2_im = 1e-4;           // base image noise variance (normalised irradiance^2)
  double i_offset = 1.0 / 255.0;     // log offset I_0 (normalised irradiance)

  void validate() const;
};

/// A raw frame: camera responses in [0, 255], mid-exposure time and exposure.
struct FrameObservation {
  double tau = 0.0;
  double exposure = 0.0;
  ImageF raw;

  double exposure_begin() const { return tau - 0.5 * exposure; }
  double exposure_end() const { return tau + 0.5 * exposure; }
};

/// Biased log intensity with its per-pixel covariance.
struct LogFrame {
  double t = 0.0;
  ImageF log_intensity;
  ImageF covariance;     // log domain, R
  ImageF irradiance;     // CRF^-1 of the raw response
  ImageF raw_covariance; // irradiance domain, R-bar
};

/// Irradiance-domain covariance sigma2_im / f^w(response), capped at r_max.
double frame_covariance(const CrfTable& crf, double response, const FrameNoiseParams& params);

/// Linear blend of two frame covariances for tau_k <= t <= tau_k1.
double interpolate_covariance(double r_k, double r_k1, double tau_k, double tau_k1, double t);

struct LogSample {
  double log_intensity = 0.0;
  double covariance = 0.0;
};

/// Second-order log mapping of an irradiance with covariance `rbar`:
/// L = log(I + I_0) - rbar / (2 (I + I_0)^2), R = rbar / (I + I_0)^2.
LogSample log_intensity_of(double irradiance, double rbar, double i_offset);

LogFrame to_log_frame(const FrameObservation& frame, const CrfTable& crf,
                      const FrameNoiseParams& params);

}  // namespace evhdr
