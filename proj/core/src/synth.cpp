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
#include "evhdr/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "evhdr/errors.hpp"
#include "evhdr/parallel.hpp"

namespace evhdr {

void GroundTruthVideo::validate() const {
  if (frames.size() < 2 || frames.size() != timestamps.size()) {
    throw ValidationError("ground-truth video needs at least two timestamped frames");
  }
  for (std::size_t k = 0; k < frames.size(); ++k) {
    if (!frames[k].same_shape(frames.front()) || frames[k].empty()) {
      throw ValidationError("ground-truth frames must share non-empty dimensions");
    }
    if (k > 0 && !(timestamps[k] > timestamps[k - 1])) {
      throw ValidationError("ground-truth timestamps must be strictly increasing");
    }
    for (double v : frames[k].pixels()) {
      if (!(v >= 0) || !std::isfinite(v)) {
        throw ValidationError("ground-truth irradiance must be finite and non-negative");
      }
    }
  }
}

void SimParams::validate() const {
  if (!(c_true > 0)) throw ValidationError("c_true must be positive");
  if (!(refractory >= 0)) throw ValidationError("refractory must be non-negative");
  if (!(event_noise_rate >= 0)) throw ValidationError("event_noise_rate must be non-negative");
  if (!(exposure > 0)) throw ValidationError("exposure must be positive");
  if (!(exposure <= frame_period)) throw ValidationError("exposure must not exceed frame period");
  if (!(saturation_low < saturation_high)) {
    throw ValidationError("saturation bounds must satisfy low < high");
  }
  if (!(i_offset > 0)) throw ValidationError("i_offset must be positive");
  for (double s : threshold_scale.pixels()) {
    if (!(s > 0)) throw ValidationError("threshold scales must be positive");
  }
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::size_t segment_of(const std::vector<double>& ts, double t) {
  if (t <= ts.front()) return 0;
  if (t >= ts.back()) return ts.size() - 2;
  const auto it = std::upper_bound(ts.begin(), ts.end(), t);
  return static_cast<std::size_t>(it - ts.begin()) - 1;
}

double log_sample(const GroundTruthVideo& v, std::size_t k, std::size_t p, double i_offset) {
  return std::log(v.frames[k][p] + i_offset);
}

struct PixelEvent {
  double t;
  std::int8_t polarity;
};

class EventEmitter {
 public:
  EventEmitter(const SimParams& params, std::vector<PixelEvent>& out)
      : params_(params), out_(out) {}

  void emit(double t, int polarity) {
    if (params_.quantize_us) t = from_microseconds(to_microseconds(t));
    if (have_last_ && t - last_ < params_.refractory) return;
    if (have_last_ && !(t > last_)) {
      t = params_.quantize_us ? from_microseconds(to_microseconds(last_) + 1)
                              : std::nextafter(last_, std::numeric_limits<double>::infinity());
    }
    out_.push_back({t, static_cast<std::int8_t>(polarity)});
    last_ = t;
    have_last_ = true;
  }

 private:
  const SimParams& params_;
  std::vector<PixelEvent>& out_;
  double last_ = 0.0;
  bool have_last_ = false;
};

void pixel_events(const GroundTruthVideo& video, const SimParams& params, std::size_t p,
                  std::vector<PixelEvent>& out) {
  out.clear();
  const double c = params.c_true * (params.threshold_scale.empty() ? 1.0 : params.threshold_scale[p]);
  const double base = log_sample(video, 0, p, params.i_offset);
  long level = 0;
  EventEmitter emitter(params, out);
  double l_a = base;
  for (std::size_t k = 0; k + 1 < video.frames.size(); ++k) {
    const double t_a = video.timestamps[k];
    const double t_b = video.timestamps[k + 1];
    const double l_b = log_sample(video, k + 1, p, params.i_offset);
    const double slope = (l_b - l_a) / (t_b - t_a);
    if (l_b > l_a) {
      while (base + (level + 1) * c <= l_b) {
        ++level;
        emitter.emit(t_a + (base + level * c - l_a) / slope, +1);
      }
    } else if (l_b < l_a) {
      while (base + (level - 1) * c >= l_b) {
        --level;
        emitter.emit(t_a + (base + level * c - l_a) / slope, -1);
      }
    }
    l_a = l_b;
  }

  if (params.event_noise_rate > 0) {
    std::mt19937_64 rng(splitmix64(params.seed ^ splitmix64(p + 1)));
    std::exponential_distribution<double> gap(params.event_noise_rate);
    std::bernoulli_distribution coin(0.5);
    const std::size_t n_signal = out.size();
    for (double t = video.begin() + gap(rng); t < video.end(); t += gap(rng)) {
      const double tq = params.quantize_us ? from_microseconds(to_microseconds(t)) : t;
      out.push_back({tq, static_cast<std::int8_t>(coin(rng) ? 1 : -1)});
    }
    std::inplace_merge(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(n_signal),
                       out.end(), [](const PixelEvent& a, const PixelEvent& b) { return a.t < b.t; });
    // Drop later duplicates so each pixel's timestamps stay strictly increasing.
    out.erase(std::unique(out.begin(), out.end(),
                          [](const PixelEvent& a, const PixelEvent& b) { return a.t == b.t; }),
              out.end());
  }
}

}  // namespace

double ground_truth_log(const GroundTruthVideo& video, std::size_t pixel, double t,
                        double i_offset) {
  const std::size_t k = segment_of(video.timestamps, t);
  const double t_a = video.timestamps[k], t_b = video.timestamps[k + 1];
  const double f = std::clamp((t - t_a) / (t_b - t_a), 0.0, 1.0);
  const double l_a = log_sample(video, k, pixel, i_offset);
  const double l_b = log_sample(video, k + 1, pixel, i_offset);
  return l_a + f * (l_b - l_a);
}

ImageF ground_truth_frame(const GroundTruthVideo& video, double t, double i_offset) {
  ImageF out(video.width(), video.height());
  for (std::size_t p = 0; p < out.size(); ++p) {
    out[p] = std::exp(ground_truth_log(video, p, t, i_offset)) - i_offset;
  }
  return out;
}

std::vector<double> ldr_frame_times(const GroundTruthVideo& video, const SimParams& params) {
  std::vector<double> times;
  const double half = 0.5 * params.exposure;
  for (long k = 0;; ++k) {
    const double tau = video.begin() + half + static_cast<double>(k) * params.frame_period;
    if (tau + half > video.end() + 1e-12) break;
    times.push_back(tau);
  }
  return times;
}

std::vector<Event> generate_events(const GroundTruthVideo& video, const SimParams& params,
                                   int threads) {
  video.validate();
  params.validate();
  const int w = video.width(), h = video.height();
  if (!params.threshold_scale.empty() &&
      (params.threshold_scale.width() != w || params.threshold_scale.height() != h)) {
    throw ValidationError("threshold scale map does not match the video size");
  }
  const std::size_t n_pix = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  std::vector<std::vector<PixelEvent>> per_pixel(n_pix);
  parallel_for(n_pix, threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t p = lo; p < hi; ++p) pixel_events(video, params, p, per_pixel[p]);
  });

  std::size_t total = 0;
  for (const auto& v : per_pixel) total += v.size();
  std::vector<Event> events;
  events.reserve(total);
  for (std::size_t p = 0; p < n_pix; ++p) {
    const auto x = static_cast<std::uint16_t>(p % static_cast<std::size_t>(w));
    const auto y = static_cast<std::uint16_t>(p / static_cast<std::size_t>(w));
    for (const PixelEvent& e : per_pixel[p]) events.push_back({e.t, x, y, e.polarity});
  }
  std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    if (a.t != b.t) return a.t < b.t;
    if (a.y != b.y) return a.y < b.y;
    return a.x < b.x;
  });
  return events;
}

std::vector<FrameObservation> render_ldr_frames(const GroundTruthVideo& video,
                                                const SimParams& params) {
  video.validate();
  params.validate();
  std::vector<FrameObservation> frames;
  const std::vector<double>& ts = video.timestamps;
  for (double tau : ldr_frame_times(video, params)) {
    FrameObservation f{tau, params.exposure, ImageF(video.width(), video.height())};
    const double t0 = f.exposure_begin(), t1 = f.exposure_end();
    for (std::size_t p = 0; p < f.raw.size(); ++p) {
      // Exact average of exp(L) over the window; L is linear per segment.
      double integral = 0.0;
      for (std::size_t k = segment_of(ts, t0); k + 1 < ts.size() && ts[k] < t1; ++k) {
        const double a = std::max(t0, ts[k]);
        const double b = std::min(t1, ts[k + 1]);
        if (b <= a) continue;
        const double la = ground_truth_log(video, p, a, params.i_offset);
        const double lb = ground_truth_log(video, p, b, params.i_offset);
        const double d = lb - la;
        integral += std::abs(d) < 1e-12 ? (b - a) * std::exp(0.5 * (la + lb))
                                        : (b - a) * (std::exp(lb) - std::exp(la)) / d;
      }
      const double blurred = integral / (t1 - t0) - params.i_offset;
      const double response = std::round(params.crf.response(blurred));
      f.raw[p] = std::clamp(response, params.saturation_low, params.saturation_high);
    }
    frames.push_back(std::move(f));
  }
  return frames;
}

CrfTable clipped_crf(const SimParams& params) {
  const CrfTable& base = params.crf;
  const double lo = params.saturation_low, hi = params.saturation_high;
  return CrfTable::from_response_curve(
      [&](double i) { return std::clamp(base.response(i), lo, hi); });
}

GroundTruthVideo render_video(int width, int height, double duration, double fps,
                              const std::function<double(double, double, double)>& irradiance) {
  require(width > 0 && height > 0 && duration > 0 && fps > 0, "render_video: bad arguments");
  GroundTruthVideo v;
  const long n = std::lround(duration * fps);
  for (long k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) / fps;
    ImageF img(width, height);
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) img(x, y) = std::max(0.0, irradiance(x, y, t));
    }
    v.frames.push_back(std::move(img));
    v.timestamps.push_back(t);
  }
  return v;
}

}  // namespace evhdr
