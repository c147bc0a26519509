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
#include "evhdr/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "evhdr/errors.hpp"
#include "evhdr/event_index.hpp"
#include "evhdr/log.hpp"
#include "evhdr/parallel.hpp"

namespace evhdr {

void ReconstructionParams::validate() const {
  event_noise.validate();
  frame_noise.validate();
  augment.validate();
  filter.validate();
  if (threads < 1) throw ValidationError("threads must be >= 1");
}

std::vector<double> default_output_times(std::span<const FrameObservation> frames,
                                         const FilterConfig& config) {
  std::vector<double> times;
  if (frames.empty()) return times;
  if (!config.output_rate) {
    for (const auto& f : frames) times.push_back(f.tau);
    return times;
  }
  const double t0 = frames.front().exposure_begin();
  const double t1 = frames.back().exposure_end();
  const double period = 1.0 / *config.output_rate;
  for (long i = 0;; ++i) {
    const double t = t0 + static_cast<double>(i) * period;
    if (t > t1) break;
    times.push_back(t);
  }
  return times;
}

ImageF to_linear(const ImageF& log_intensity, double i_offset) {
  ImageF out(log_intensity.width(), log_intensity.height());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::exp(log_intensity[i]) - i_offset;
  return out;
}

namespace {

// Shared, read-only inputs of the per-pixel filters.
struct FilterContext {
  const AugmentedSignal* signal = nullptr;
  const PixelEventIndex* index = nullptr;
  const std::vector<LogFrame>* log_frames = nullptr;
  std::vector<double> tau;
  std::vector<double> knots;  // exposure edges and mid-exposure times
  FilterConfig config;

  double frame_covariance_at(std::size_t p, double t) const {
    const auto& lf = *log_frames;
    if (t <= tau.front()) return lf.front().covariance[p];
    if (t >= tau.back()) return lf.back().covariance[p];
    const auto it = std::upper_bound(tau.begin(), tau.end(), t);
    const std::size_t k = static_cast<std::size_t>(it - tau.begin()) - 1;
    return interpolate_covariance(lf[k].covariance[p], lf[k + 1].covariance[p], tau[k],
                                  tau[k + 1], t);
  }
};

// Filter state of one pixel plus the cursors needed to evaluate L^A in O(1).
class PixelTrack {
 public:
  PixelTrack() = default;
  PixelTrack(const FilterContext& ctx, std::size_t pixel) : pixel_(pixel) {
    const double t0 = ctx.signal->begin();
    state_ = {(*ctx.log_frames).front().log_intensity[pixel], ctx.config.p0, t0};
    la_last_ = ctx.signal->evaluate_with_count(pixel, t0, 0, ctx.signal->locate(t0));
    knot_ = static_cast<std::size_t>(
        std::upper_bound(ctx.knots.begin(), ctx.knots.end(), t0) - ctx.knots.begin());
  }

  // Decays to t with no event of this pixel in (t_last, t), splitting at knots.
  void advance(const FilterContext& ctx, double t) {
    while (knot_ < ctx.knots.size() && ctx.knots[knot_] < t) {
      if (ctx.knots[knot_] > state_.t_last) step_to(ctx, ctx.knots[knot_]);
      ++knot_;
    }
    step_to(ctx, t);
  }

  void apply_event(const FilterContext& ctx, double t, int sigma, double q) {
    advance(ctx, t);
    const SignalRegion r = ctx.signal->locate(t);
    const double step = ctx.signal->event_step(pixel_, t, sigma, r);
    state_ = event_update(state_, step, ctx.config.mode == FilterMode::akf ? q : 0.0);
    count_ += sigma;
    la_last_ = ctx.signal->evaluate_with_count(pixel_, t, count_, r);
  }

  const PixelFilterState& state() const { return state_; }

 private:
  void step_to(const FilterContext& ctx, double t) {
    const SignalRegion r = ctx.signal->locate(t);
    const double la_now = ctx.signal->evaluate_with_count(pixel_, t, count_, r);
    if (ctx.config.mode == FilterMode::akf) {
      state_ = decay_state(state_, la_last_, la_now, ctx.frame_covariance_at(pixel_, t), t);
    } else {
      state_ = decay_state_constant_gain(state_, la_last_, la_now, ctx.config.k_const, t);
    }
    la_last_ = la_now;
  }

  std::size_t pixel_ = 0;
  PixelFilterState state_;
  double la_last_ = 0.0;
  std::int32_t count_ = 0;
  std::size_t knot_ = 0;
};

void record(std::vector<ReconstructedFrame>& out, std::size_t o, std::size_t p,
            const PixelTrack& track) {
  out[o].log_intensity[p] = track.state().l_hat;
  out[o].covariance[p] = track.state().p_cov;
}

}  // namespace

ReconstructionResult reconstruct(std::span<const Event> events,
                                 std::span<const FrameObservation> frames, const CrfTable& crf,
                                 const ReconstructionParams& params,
                                 std::optional<std::vector<double>> output_times) {
  params.validate();
  if (frames.size() < 2) throw ValidationError("at least two frames are required");
  const int w = frames.front().raw.width(), h = frames.front().raw.height();
  if (w <= 0 || h <= 0) throw ValidationError("frames are empty");
  const double span_begin = frames.front().exposure_begin();
  const double span_end = frames.back().exposure_end();

  ReconstructionResult result;
  auto& stats = result.stats;
  stats.events_total = events.size();

  std::vector<Event> used;
  used.reserve(events.size());
  double t_prev = -std::numeric_limits<double>::infinity();
  for (const Event& e : events) {
    if (e.t < t_prev) throw StreamError("event stream is not sorted by time");
    t_prev = e.t;
    if (e.t > span_begin && e.t <= span_end) used.push_back(e);
  }
  stats.events_used = used.size();
  stats.events_outside_span = events.size() - used.size();
  if (stats.events_outside_span > 0) {
    log_info(stats.events_outside_span, " events outside the frame span were ignored");
  }

  const std::vector<double> q =
      compute_event_covariances(used, w, h, span_begin, params.event_noise);
  auto index = std::make_shared<const PixelEventIndex>(w, h, used, q);
  const AugmentedSignal signal = AugmentedSignal::build(
      index, frames, crf, params.frame_noise, params.augment, params.threads);

  std::vector<LogFrame> log_frames;
  log_frames.reserve(frames.size());
  for (const auto& f : frames) log_frames.push_back(to_log_frame(f, crf, params.frame_noise));

  FilterContext ctx;
  ctx.signal = &signal;
  ctx.index = index.get();
  ctx.log_frames = &log_frames;
  ctx.config = params.filter;
  for (const auto& f : frames) {
    ctx.tau.push_back(f.tau);
    ctx.knots.push_back(f.exposure_begin());
    ctx.knots.push_back(f.tau);
    ctx.knots.push_back(f.exposure_end());
  }
  std::sort(ctx.knots.begin(), ctx.knots.end());
  ctx.knots.erase(std::unique(ctx.knots.begin(), ctx.knots.end()), ctx.knots.end());

  std::vector<double> requested =
      output_times ? std::move(*output_times) : default_output_times(frames, params.filter);
  std::sort(requested.begin(), requested.end());
  std::vector<double> outputs;
  for (double t : requested) {
    if (t >= span_begin && t <= span_end) {
      outputs.push_back(t);
    } else {
      stats.skipped_outputs.push_back(t);
      log_warn("output time ", t, " outside data span [", span_begin, ", ", span_end,
               "], skipped");
    }
  }
  result.frames.reserve(outputs.size());
  for (double t : outputs) result.frames.push_back({t, ImageF(w, h), ImageF(w, h)});

  const std::size_t n_pix = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  if (params.schedule == Schedule::per_pixel) {
    parallel_for(n_pix, params.threads, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t p = lo; p < hi; ++p) {
        PixelTrack track(ctx, p);
        std::size_t o = 0;
        for (std::size_t i = index->begin(p); i < index->end(p); ++i) {
          const double t = index->time(i);
          for (; o < outputs.size() && outputs[o] < t; ++o) {
            PixelTrack sample = track;
            sample.advance(ctx, outputs[o]);
            record(result.frames, o, p, sample);
          }
          track.apply_event(ctx, t, index->polarity(i), index->covariance(i));
        }
        for (; o < outputs.size(); ++o) {
          PixelTrack sample = track;
          sample.advance(ctx, outputs[o]);
          record(result.frames, o, p, sample);
        }
      }
    });
  } else {
    std::vector<PixelTrack> tracks;
    tracks.reserve(n_pix);
    for (std::size_t p = 0; p < n_pix; ++p) tracks.emplace_back(ctx, p);
    EventNoiseModel noise(w, h, span_begin, params.event_noise);
    std::size_t o = 0;
    auto sample_all = [&](std::size_t out) {
      for (std::size_t p = 0; p < n_pix; ++p) {
        PixelTrack sample = tracks[p];
        sample.advance(ctx, outputs[out]);
        record(result.frames, out, p, sample);
      }
    };
    for (const Event& e : used) {
      for (; o < outputs.size() && outputs[o] < e.t; ++o) sample_all(o);
      const double qe = noise.q_total(e);
      tracks[static_cast<std::size_t>(e.y) * w + e.x].apply_event(ctx, e.t, e.polarity, qe);
    }
    for (; o < outputs.size(); ++o) sample_all(o);
  }

  for (const auto& f : result.frames) {
    for (std::size_t i = 0; i < f.log_intensity.size(); ++i) {
      if (!std::isfinite(f.log_intensity[i])) {
        throw NumericalError("reconstruction produced a non-finite value");
      }
    }
  }
  return result;
}

}  // namespace evhdr
