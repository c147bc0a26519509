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

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "evhdr/crf.hpp"
#include "evhdr/event.hpp"
#include "evhdr/frame_model.hpp"
#include "evhdr/image.hpp"

namespace evhdr {

/// Ground-truth linear irradiance (normalised to [0, 1]) sampled in time.
/// Between samples log(I + I_0) is linear in time.
struct GroundTruthVideo {
  std::vector<ImageF> frames;
  std::vector<double> timestamps;

  int width() const { return frames.empty() ? 0 : frames.front().width(); }
  int height() const { return frames.empty() ? 0 : frames.front().height(); }
  double begin() const { return timestamps.front(); }
  double end() const { return timestamps.back(); }
  void validate() const;
};

struct SimParams {
  double c_true = 0.1;
  /// Per-pixel multiplier on c_true; empty means 1 everywhere.
  ImageF threshold_scale;
  double refractory = 0.0;        // s
  double event_noise_rate = 0.0;  // spurious events per pixel per second
  CrfTable crf = CrfTable::identity();
  double exposure = 0.01;      // s
  double frame_period = 0.05;  // s
  double saturation_low = 100.0;
  double saturation_high = 160.0;
  double i_offset = 1.0 / 255.0;
  std::uint64_t seed = 1;
  /// Event timestamps are rounded to whole microseconds when true.
  bool quantize_us = true;

  void validate() const;
};

/// log(I + I_0) of the ground truth at one pixel and time.
double ground_truth_log(const GroundTruthVideo& video, std::size_t pixel, double t,
                        double i_offset);

/// Linear irradiance of the ground truth at time t.
ImageF ground_truth_frame(const GroundTruthVideo& video, double t, double i_offset);

/// Mid-exposure times of the LDR frames that fit inside the video.
std::vector<double> ldr_frame_times(const GroundTruthVideo& video, const SimParams& params);

/// Ideal DVS model on the piecewise log-linear ground truth: an event each
/// time log(I + I_0) moves s_p * c_true away from the last reference level,
/// dropped (but with the reference still advancing) when it follows the
/// previous emitted event by less than the refractory period. Spurious
/// events are Poisson in time with random polarity. Output is sorted by
/// (t, y, x) and strictly increasing per pixel.
std::vector<Event> generate_events(const GroundTruthVideo& video, const SimParams& params,
                                   int threads = 1);

/// Motion-blurred, CRF-mapped, 8-bit quantised and clipped LDR frames.
std::vector<FrameObservation> render_ldr_frames(const GroundTruthVideo& video,
                                                const SimParams& params);

/// The clipped CRF an LDR renderer with `params` effectively applies.
CrfTable clipped_crf(const SimParams& params);

/// Samples irradiance(x, y, t) on a regular grid of `fps` over [0, duration].
GroundTruthVideo render_video(int width, int height, double duration, double fps,
                              const std::function<double(double, double, double)>& irradiance);

/// Built-in procedural scenes: "static", "edge", "sinusoid", "hdr-texture".
GroundTruthVideo make_scene(const std::string& name, int width, int height, double duration,
                            double fps);

std::vector<std::string> scene_names();

}  // namespace evhdr
