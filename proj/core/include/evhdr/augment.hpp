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
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "evhdr/crf.hpp"
#include "evhdr/event_index.hpp"
#include "evhdr/frame_model.hpp"
#include "evhdr/image.hpp"

namespace evhdr {

struct AugmentParams {
  double c_nominal = 0.1;  // nominal contrast threshold (log intensity)
  int n_min = 1;           // minimum |net event count| for calibration
  double eps_l = 1e-4;     // minimum |log change| for calibration
  /// Skip calibration when either boundary frame is saturated at the pixel.
  bool guard_saturated = true;
  /// Extra deblur passes that use the calibrated per-pixel thresholds in
  /// place of c_nominal. Zero deblurs once with c_nominal.
  int edi_refinements = 2;

  void validate() const;
};

/// Sharp log images at the start and end of one frame's exposure.
struct DeblurredFrame {
  double t_begin = 0.0;
  double t_end = 0.0;
  ImageF start;
  ImageF end;
};

struct DeblurredPixel {
  double start = 0.0;
  double end = 0.0;
};

/// Event double integral for one pixel. `log_blurry` is log(B + I_0) of the
/// blurry frame. Events in (t_begin, t_end] define E(t) = c * sum(polarity);
/// exp(E) is piecewise constant so the exposure average is summed exactly.
DeblurredPixel edi_deblur_pixel(double log_blurry, const PixelEventIndex& events,
                                std::size_t pixel, double t_begin, double t_end, double c);

DeblurredFrame edi_deblur(const FrameObservation& frame, const CrfTable& crf, double i_offset,
                          const PixelEventIndex& events, double c_nominal, int threads = 1);
/// Same with a threshold per pixel.
DeblurredFrame edi_deblur(const FrameObservation& frame, const CrfTable& crf, double i_offset,
                          const PixelEventIndex& events, const ImageF& thresholds,
                          int threads = 1);

/// Per-pixel contrast scale (L_end - L_start) / net_events with fallback to
/// c_nominal when the ratio is undetermined or not positive.
double calibrate_contrast(double l_start, double l_end, std::int32_t net_events,
                          const AugmentParams& params, bool reliable = true);
/// The ratio alone; empty where calibrate_contrast would fall back.
std::optional<double> contrast_ratio(double l_start, double l_end, std::int32_t net_events,
                                     const AugmentParams& params, bool reliable = true);

/// Exposure blend: weight (tau + T/2 - t) / T on the forward estimate.
double blend_exposure(double l_forward, double l_backward, double tau, double exposure,
                      double t);

/// Event-interpolated log intensity over [tau_k - T_k/2, tau_k1 + T_k1/2].
///
/// Queries read only the events inside the interval; the boundary running
/// sums are captured at construction.
class AugmentedFrame {
 public:
  AugmentedFrame(std::shared_ptr<const PixelEventIndex> events, double t_begin, double t_end,
                 ImageF deblurred_start, ImageF deblurred_end, ImageF contrast_scale);

  double interval_begin() const { return t_begin_; }
  double interval_end() const { return t_end_; }

  double deblurred_start(std::size_t p) const { return start_[p]; }
  double deblurred_end(std::size_t p) const { return end_[p]; }
  double contrast(std::size_t p) const { return contrast_[p]; }
  const ImageF& contrast_image() const { return contrast_; }

  /// Running polarity sums at the interval edges.
  std::int32_t count_at_begin(std::size_t p) const { return cum_begin_[p]; }
  std::int32_t count_at_end(std::size_t p) const { return cum_end_[p]; }
  std::int32_t net_events(std::size_t p) const { return cum_end_[p] - cum_begin_[p]; }

  /// Running polarity sum through time t, searched inside the interval only.
  std::int32_t count_through(std::size_t p, double t) const;

  double integrate_forward(std::size_t p, double t) const;
  double integrate_backward(std::size_t p, double t) const;

  /// Same as above given the running sum through t.
  double forward_from_count(std::size_t p, std::int32_t n) const {
    return start_[p] + contrast_[p] * (n - cum_begin_[p]);
  }
  double backward_from_count(std::size_t p, std::int32_t n) const {
    return end_[p] - contrast_[p] * (cum_end_[p] - n);
  }

  /// Own-interval blend of forward and backward estimates.
  double evaluate(std::size_t p, double t, double tau, double exposure) const;

 private:
  void check_time(double t) const;

  std::shared_ptr<const PixelEventIndex> events_;
  double t_begin_;
  double t_end_;
  ImageF start_;
  ImageF end_;
  ImageF contrast_;
  std::vector<std::int32_t> cum_begin_;
  std::vector<std::int32_t> cum_end_;
  std::vector<std::uint32_t> first_;  // first event index with t > t_begin
  std::vector<std::uint32_t> last_;   // first event index with t > t_end
};

/// Where a time falls in the frame sequence: inside exposure `frame` or in
/// the gap after it.
struct SignalRegion {
  int frame = 0;
  bool in_exposure = true;
};

/// The dense augmented signal L^A(t) over the whole frame sequence.
class AugmentedSignal {
 public:
  static AugmentedSignal build(std::shared_ptr<const PixelEventIndex> events,
                               std::span<const FrameObservation> frames, const CrfTable& crf,
                               const FrameNoiseParams& frame_params,
                               const AugmentParams& params, int threads = 1);

  double begin() const { return exposure_begin_.front(); }
  double end() const { return exposure_end_.back(); }
  int frame_count() const { return static_cast<int>(tau_.size()); }
  double tau(int k) const { return tau_[k]; }
  double exposure(int k) const { return exposure_[k]; }
  double exposure_begin(int k) const { return exposure_begin_[k]; }
  double exposure_end(int k) const { return exposure_end_[k]; }

  const AugmentedFrame& interval(int k) const { return intervals_[k]; }
  int interval_count() const { return static_cast<int>(intervals_.size()); }
  const DeblurredFrame& deblurred(int k) const { return deblurred_[k]; }
  const PixelEventIndex& events() const { return *events_; }

  SignalRegion locate(double t) const;

  /// L^A(t) with events at t included.
  double evaluate(std::size_t p, double t) const;
  /// Limit of L^A from the left at t (events at t excluded).
  double evaluate_left(std::size_t p, double t) const;
  /// O(1) evaluation given the pixel's running polarity sum through t.
  double evaluate_with_count(std::size_t p, double t, std::int32_t n, SignalRegion r) const;

  /// Jump of L^A caused by an event of polarity `sigma` at time t.
  double event_step(std::size_t p, double t, int sigma, SignalRegion r) const;

 private:
  AugmentedSignal() = default;

  std::shared_ptr<const PixelEventIndex> events_;
  std::vector<double> tau_;
  std::vector<double> exposure_;
  std::vector<double> exposure_begin_;
  std::vector<double> exposure_end_;
  std::vector<DeblurredFrame> deblurred_;
  std::vector<AugmentedFrame> intervals_;
};

}  // namespace evhdr
