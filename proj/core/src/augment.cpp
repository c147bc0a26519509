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
#include "evhdr/augment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "evhdr/errors.hpp"
#include "evhdr/parallel.hpp"

namespace evhdr {

void AugmentParams::validate() const {
  if (!(c_nominal > 0)) throw ValidationError("c_nominal must be positive");
  if (n_min < 1) throw ValidationError("n_min must be >= 1");
  if (edi_refinements < 0) throw ValidationError("edi_refinements must be >= 0");
  if (!(eps_l >= 0)) throw ValidationError("eps_l must be non-negative");
}

DeblurredPixel edi_deblur_pixel(double log_blurry, const PixelEventIndex& events,
                                std::size_t pixel, double t_begin, double t_end, double c) {
  require(t_end > t_begin, "edi_deblur: exposure must be positive");
  const std::size_t first = events.upper(pixel, t_begin);
  const std::size_t last = events.upper(pixel, t_end);

  // log of (1/T) * sum_j len_j * exp(E_j), accumulated relative to the
  // largest exponent seen so far.
  double e_level = 0.0;
  double seg_start = t_begin;
  double max_e = 0.0;
  double acc = 0.0;
  auto add = [&](double length, double e) {
    if (length <= 0) return;
    if (acc == 0.0) {
      max_e = e;
      acc = length;
    } else if (e > max_e) {
      acc = acc * std::exp(max_e - e) + length;
      max_e = e;
    } else {
      acc += length * std::exp(e - max_e);
    }
  };
  for (std::size_t i = first; i < last; ++i) {
    const double t = events.time(i);
    add(t - seg_start, e_level);
    e_level += c * events.polarity(i);
    seg_start = t;
  }
  add(t_end - seg_start, e_level);
  const double log_mean = max_e + std::log(acc / (t_end - t_begin));
  DeblurredPixel out;
  out.start = log_blurry - log_mean;
  out.end = out.start + e_level;
  return out;
}

DeblurredFrame edi_deblur(const FrameObservation& frame, const CrfTable& crf, double i_offset,
                          const PixelEventIndex& events, const ImageF& thresholds, int threads) {
  require(frame.exposure > 0, "edi_deblur: exposure must be positive");
  require(frame.raw.width() == events.width() && frame.raw.height() == events.height(),
          "edi_deblur: frame and event sensor sizes differ");
  require(thresholds.same_shape(frame.raw), "edi_deblur: threshold image size differs");
  const int w = frame.raw.width(), h = frame.raw.height();
  DeblurredFrame out{frame.exposure_begin(), frame.exposure_end(), ImageF(w, h), ImageF(w, h)};
  parallel_for(frame.raw.size(), threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t p = b; p < e; ++p) {
      require(thresholds[p] > 0, "edi_deblur: contrast threshold must be positive");
      const double log_b = std::log(crf.irradiance(frame.raw[p]) + i_offset);
      const DeblurredPixel d =
          edi_deblur_pixel(log_b, events, p, out.t_begin, out.t_end, thresholds[p]);
      out.start[p] = d.start;
      out.end[p] = d.end;
    }
  });
  return out;
}

DeblurredFrame edi_deblur(const FrameObservation& frame, const CrfTable& crf, double i_offset,
                          const PixelEventIndex& events, double c_nominal, int threads) {
  require(c_nominal > 0, "edi_deblur: contrast threshold must be positive");
  return edi_deblur(frame, crf, i_offset, events,
                    ImageF(frame.raw.width(), frame.raw.height(), c_nominal), threads);
}

std::optional<double> contrast_ratio(double l_start, double l_end, std::int32_t net_events,
                                     const AugmentParams& params, bool reliable) {
  if (!reliable || std::abs(net_events) < params.n_min) return std::nullopt;
  const double numerator = l_end - l_start;
  if (std::abs(numerator) < params.eps_l) return std::nullopt;
  const double c = numerator / net_events;
  if (!(c > 0)) return std::nullopt;
  return c;
}

double calibrate_contrast(double l_start, double l_end, std::int32_t net_events,
                          const AugmentParams& params, bool reliable) {
  return contrast_ratio(l_start, l_end, net_events, params, reliable).value_or(params.c_nominal);
}

double blend_exposure(double l_forward, double l_backward, double tau, double exposure,
                      double t) {
  const double w = (tau + 0.5 * exposure - t) / exposure;
  return w * l_forward + (1.0 - w) * l_backward;
}

AugmentedFrame::AugmentedFrame(std::shared_ptr<const PixelEventIndex> events, double t_begin,
                               double t_end, ImageF deblurred_start, ImageF deblurred_end,
                               ImageF contrast_scale)
    : events_(std::move(events)), t_begin_(t_begin), t_end_(t_end),
      start_(std::move(deblurred_start)), end_(std::move(deblurred_end)),
      contrast_(std::move(contrast_scale)) {
  require(events_ != nullptr, "AugmentedFrame: missing event index");
  require(t_end_ > t_begin_, "AugmentedFrame: empty interval");
  require(start_.width() == events_->width() && start_.height() == events_->height() &&
              start_.same_shape(end_) && start_.same_shape(contrast_),
          "AugmentedFrame: image sizes differ");
  require(events_->event_count() < std::numeric_limits<std::uint32_t>::max(),
          "AugmentedFrame: too many events");
  const std::size_t n = start_.size();
  cum_begin_.resize(n);
  cum_end_.resize(n);
  first_.resize(n);
  last_.resize(n);
  for (std::size_t p = 0; p < n; ++p) {
    require(contrast_[p] > 0, "AugmentedFrame: contrast scale must be positive");
    const std::size_t f = events_->upper(p, t_begin_);
    const std::size_t l = events_->upper(p, t_end_);
    first_[p] = static_cast<std::uint32_t>(f);
    last_[p] = static_cast<std::uint32_t>(l);
    cum_begin_[p] = f == events_->begin(p) ? 0 : events_->cumulative(f - 1);
    cum_end_[p] = l == f ? cum_begin_[p] : events_->cumulative(l - 1);
  }
}

void AugmentedFrame::check_time(double t) const {
  if (!(t >= t_begin_ && t <= t_end_)) {
    std::ostringstream os;
    os.precision(17);
    os << "augmented frame query at t=" << t << " outside [" << t_begin_ << ", " << t_end_
       << "]";
    throw ContractViolation(os.str());
  }
}

std::int32_t AugmentedFrame::count_through(std::size_t p, double t) const {
  std::size_t lo = first_[p], hi = last_[p];
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (events_->time(mid) <= t) lo = mid + 1; else hi = mid;
  }
  return lo == first_[p] ? cum_begin_[p] : events_->cumulative(lo - 1);
}

double AugmentedFrame::integrate_forward(std::size_t p, double t) const {
  check_time(t);
  return forward_from_count(p, count_through(p, t));
}

double AugmentedFrame::integrate_backward(std::size_t p, double t) const {
  check_time(t);
  return backward_from_count(p, count_through(p, t));
}

double AugmentedFrame::evaluate(std::size_t p, double t, double tau, double exposure) const {
  check_time(t);
  const std::int32_t n = count_through(p, t);
  const double fwd = forward_from_count(p, n);
  const double bwd = backward_from_count(p, n);
  if (t < tau + 0.5 * exposure && t >= tau - 0.5 * exposure) {
    return blend_exposure(fwd, bwd, tau, exposure, t);
  }
  return bwd;
}

AugmentedSignal AugmentedSignal::build(std::shared_ptr<const PixelEventIndex> events,
                                       std::span<const FrameObservation> frames,
                                       const CrfTable& crf, const FrameNoiseParams& frame_params,
                                       const AugmentParams& params, int threads) {
  require(events != nullptr, "AugmentedSignal: missing event index");
  params.validate();
  frame_params.validate();
  if (frames.size() < 2) throw ValidationError("at least two frames are required");
  AugmentedSignal s;
  s.events_ = events;
  for (std::size_t k = 0; k < frames.size(); ++k) {
    const FrameObservation& f = frames[k];
    if (!(f.exposure > 0)) throw ValidationError("frame exposure must be positive");
    if (f.raw.width() != events->width() || f.raw.height() != events->height()) {
      throw ValidationError("frame size does not match the event sensor size");
    }
    if (k > 0) {
      if (!(f.tau > frames[k - 1].tau)) throw StreamError("frame timestamps must increase");
      if (f.exposure_begin() < frames[k - 1].exposure_end()) {
        throw ValidationError("frame exposures overlap");
      }
    }
    s.tau_.push_back(f.tau);
    s.exposure_.push_back(f.exposure);
    s.exposure_begin_.push_back(f.exposure_begin());
    s.exposure_end_.push_back(f.exposure_end());
  }

  const int w = events->width(), h = events->height();
  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  std::vector<ImageF> thresholds(frames.size(), ImageF(w, h, params.c_nominal));
  for (int pass = 0; pass <= params.edi_refinements; ++pass) {
    s.deblurred_.clear();
    for (std::size_t k = 0; k < frames.size(); ++k) {
      s.deblurred_.push_back(
          edi_deblur(frames[k], crf, frame_params.i_offset, *events, thresholds[k], threads));
    }
    // Calibrated ratio per interval, NaN where it falls back.
    std::vector<ImageF> ratios(frames.size() - 1, ImageF(w, h));
    for (std::size_t k = 0; k + 1 < frames.size(); ++k) {
      const DeblurredFrame& a = s.deblurred_[k];
      const DeblurredFrame& b = s.deblurred_[k + 1];
      parallel_for(n, threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t p = lo; p < hi; ++p) {
          const bool reliable = !params.guard_saturated ||
                                (!crf.saturated(frames[k].raw[p]) &&
                                 !crf.saturated(frames[k + 1].raw[p]));
          const std::int32_t net = events->net_polarity(p, a.t_begin, b.t_end);
          ratios[k][p] = contrast_ratio(a.start[p], b.end[p], net, params, reliable)
                             .value_or(std::numeric_limits<double>::quiet_NaN());
        }
      });
    }
    if (pass == params.edi_refinements) {
      s.intervals_.clear();
      for (std::size_t k = 0; k + 1 < frames.size(); ++k) {
        ImageF contrast = std::move(ratios[k]);
        for (double& c : contrast.pixels()) {
          if (std::isnan(c)) c = params.c_nominal;
        }
        s.intervals_.emplace_back(events, s.deblurred_[k].t_begin, s.deblurred_[k + 1].t_end,
                                  s.deblurred_[k].start, s.deblurred_[k + 1].end,
                                  std::move(contrast));
      }
      break;
    }
    // Each exposure lies inside the intervals on either side of it; deblur
    // it next time with whichever calibrated ratio rests on more events.
    for (std::size_t k = 0; k < frames.size(); ++k) {
      for (std::size_t p = 0; p < n; ++p) {
        double best = params.c_nominal;
        std::int32_t best_net = 0;
        for (std::size_t j : {k - 1, k}) {
          if (j >= ratios.size() || std::isnan(ratios[j][p])) continue;
          const std::int32_t net = std::abs(events->net_polarity(p, s.deblurred_[j].t_begin,
                                                                 s.deblurred_[j + 1].t_end));
          if (net > best_net) {
            best = ratios[j][p];
            best_net = net;
          }
        }
        thresholds[k][p] = best;
      }
    }
  }
  return s;
}

SignalRegion AugmentedSignal::locate(double t) const {
  const int last = frame_count() - 1;
  if (!(t >= begin() && t <= end())) {
    std::ostringstream os;
    os.precision(17);
    os << "augmented signal query at t=" << t << " outside [" << begin() << ", " << end() << "]";
    throw ContractViolation(os.str());
  }
  // Last exposure start <= t.
  const auto it = std::upper_bound(exposure_begin_.begin(), exposure_begin_.end(), t);
  const int k = static_cast<int>(it - exposure_begin_.begin()) - 1;
  if (k == last || t < exposure_end_[k]) return {k, true};
  return {k, false};
}

double AugmentedSignal::evaluate_with_count(std::size_t p, double t, std::int32_t n,
                                            SignalRegion r) const {
  const int last_interval = interval_count() - 1;
  if (!r.in_exposure) return intervals_[r.frame].backward_from_count(p, n);
  const AugmentedFrame& minus = intervals_[std::max(r.frame - 1, 0)];
  const AugmentedFrame& plus = intervals_[std::min(r.frame, last_interval)];
  return blend_exposure(minus.forward_from_count(p, n), plus.backward_from_count(p, n),
                        tau_[r.frame], exposure_[r.frame], t);
}

double AugmentedSignal::event_step(std::size_t p, double t, int sigma, SignalRegion r) const {
  const int last_interval = interval_count() - 1;
  if (!r.in_exposure) return intervals_[r.frame].contrast(p) * sigma;
  const double c_minus = intervals_[std::max(r.frame - 1, 0)].contrast(p);
  const double c_plus = intervals_[std::min(r.frame, last_interval)].contrast(p);
  return blend_exposure(c_minus, c_plus, tau_[r.frame], exposure_[r.frame], t) * sigma;
}

double AugmentedSignal::evaluate(std::size_t p, double t) const {
  const SignalRegion r = locate(t);
  return evaluate_with_count(p, t, events_->sum_through(p, t), r);
}

double AugmentedSignal::evaluate_left(std::size_t p, double t) const {
  const SignalRegion r = locate(t);
  const std::size_t u = events_->upper(p, t);
  std::int32_t n = u == events_->begin(p) ? 0 : events_->cumulative(u - 1);
  if (u > events_->begin(p) && events_->time(u - 1) == t) n -= events_->polarity(u - 1);
  return evaluate_with_count(p, t, n, r);
}

}  // namespace evhdr
