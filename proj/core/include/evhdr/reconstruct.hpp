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
#include <span>
#include <vector>

#include "evhdr/augment.hpp"
#include "evhdr/crf.hpp"
#include "evhdr/event.hpp"
#include "evhdr/filter.hpp"
#include "evhdr/frame_model.hpp"
#include "evhdr/image.hpp"

namespace evhdr {

/// Order in which events are pushed through the per-pixel filters. Both
/// orders give bit-identical output.
enum class Schedule {
  per_pixel,  // each pixel's events as a batch, pixels split across threads
  streaming,  // the global time-sorted stream, one event at a time
};

struct ReconstructionParams {
  EventNoiseParams event_noise;
  FrameNoiseParams frame_noise;
  AugmentParams augment;
  FilterConfig filter;
  int threads = 1;
  Schedule schedule = Schedule::per_pixel;

  void validate() const;
};

struct ReconstructedFrame {
  double t = 0.0;
  ImageF log_intensity;
  ImageF covariance;
};

struct ReconstructionStats {
  std::size_t events_total = 0;
  std::size_t events_used = 0;
  std::size_t events_outside_span = 0;
  std::vector<double> skipped_outputs;
};

struct ReconstructionResult {
  std::vector<ReconstructedFrame> frames;
  ReconstructionStats stats;
};

/// Sample times used when none are given: the frame timestamps, or a fixed
/// rate across the data span when the filter config sets one.
std::vector<double> default_output_times(std::span<const FrameObservation> frames,
                                         const FilterConfig& config);

/// Full pipeline: event covariances, frame augmentation and per-pixel
/// asynchronous filtering, sampled at `output_times`. Events must be sorted
/// by time; events outside the frames' exposure span are ignored.
ReconstructionResult reconstruct(std::span<const Event> events,
                                 std::span<const FrameObservation> frames, const CrfTable& crf,
                                 const ReconstructionParams& params,
                                 std::optional<std::vector<double>> output_times = std::nullopt);

/// exp(L) - I_0, elementwise.
ImageF to_linear(const ImageF& log_intensity, double i_offset);

}  // namespace evhdr
