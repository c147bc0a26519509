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
#include <limits>
#include <sstream>

#include "evhdr/errors.hpp"
#include "evhdr/event.hpp"

namespace evhdr {

void EventNoiseParams::validate() const {
  if (!(sigma2_proc >= 0 && sigma2_iso >= 0 && sigma2_ref >= 0 && rho_bar >= 0)) {
    throw ValidationError("event noise variances and rho_bar must be non-negative");
  }
  if (neighborhood_radius < 1) throw ValidationError("neighborhood_radius must be >= 1");
  if (!(q_cap >= 0)) throw ValidationError("q_cap must be non-negative");
}

double q_process(double t_i, double t_prev, const EventNoiseParams& params) {
  require(t_i >= t_prev, "q_process: out-of-order event");
  return params.sigma2_proc * (t_i - t_prev);
}

double q_iso(double t_i, std::optional<double> t_star_neighborhood, double t_stream_start,
             const EventNoiseParams& params) {
  if (!t_star_neighborhood) {
    require(t_i >= t_stream_start, "q_iso: event precedes stream start");
    return std::min(params.sigma2_iso * (t_i - t_stream_start), params.q_cap);
  }
  require(*t_star_neighborhood <= t_i, "q_iso: neighbourhood time is after the event");
  return params.sigma2_iso * (t_i - *t_star_neighborhood);
}

double q_ref(double t_i, double t_prev, const EventNoiseParams& params) {
  require(t_i >= t_prev, "q_ref: out-of-order event");
  return (t_i - t_prev) > params.rho_bar ? 0.0 : params.sigma2_ref;
}

EventNoiseModel::EventNoiseModel(int width, int height, double t_stream_start,
                                 EventNoiseParams params)
    : width_(width), height_(height), t_start_(t_stream_start), params_(params) {
  require(width > 0 && height > 0, "EventNoiseModel: empty sensor");
  params_.validate();
  const auto n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  last_time_.assign(n, t_stream_start);
  fired_.assign(n, 0);
  neighbor_latest_.assign(n, std::numeric_limits<double>::quiet_NaN());
}

NoiseComponents EventNoiseModel::observe(const Event& e) {
  if (e.x >= width_ || e.y >= height_) {
    std::ostringstream os;
    os << "event at (" << e.x << "," << e.y << ") outside " << width_ << "x" << height_
       << " sensor";
    throw StreamError(os.str());
  }
  if (e.polarity != 1 && e.polarity != -1) throw StreamError("event polarity must be +1 or -1");
  const std::size_t p = pixel(e.x, e.y);
  const double t_prev = last_time_[p];
  if (fired_[p] ? !(e.t > t_prev) : !(e.t >= t_prev)) {
    std::ostringstream os;
    os.precision(17);
    os << "out-of-order event at pixel (" << e.x << "," << e.y << "): t=" << e.t
       << " after previous " << t_prev;
    throw StreamError(os.str());
  }

  NoiseComponents c;
  c.process = q_process(e.t, t_prev, params_);
  const double nb = neighbor_latest_[p];
  c.isolated = q_iso(e.t, std::isnan(nb) ? std::nullopt : std::optional<double>(nb), t_start_,
                     params_);
  c.refractory = q_ref(e.t, t_prev, params_);
  c.total = std::min(c.process + c.isolated + c.refractory, params_.q_cap);

  last_time_[p] = e.t;
  fired_[p] = 1;
  const int r = params_.neighborhood_radius;
  const int x0 = std::max(0, e.x - r), x1 = std::min(width_ - 1, e.x + r);
  const int y0 = std::max(0, e.y - r), y1 = std::min(height_ - 1, e.y + r);
  for (int y = y0; y <= y1; ++y) {
    double* row = neighbor_latest_.data() + static_cast<std::size_t>(y) * width_;
    for (int x = x0; x <= x1; ++x) {
      if (x == e.x && y == e.y) continue;
      row[x] = e.t;
    }
  }
  return c;
}

double EventNoiseModel::last_event_time(int x, int y) const { return last_time_[pixel(x, y)]; }

std::optional<double> EventNoiseModel::neighborhood_latest(int x, int y) const {
  const double v = neighbor_latest_[pixel(x, y)];
  if (std::isnan(v)) return std::nullopt;
  return v;
}

std::vector<double> compute_event_covariances(std::span<const Event> events, int width,
                                              int height, double t_stream_start,
                                              const EventNoiseParams& params) {
  EventNoiseModel model(width, height, t_stream_start, params);
  std::vector<double> q;
  q.reserve(events.size());
  double t_global = t_stream_start;
  for (const Event& e : events) {
    if (e.t < t_global) throw StreamError("event stream is not sorted by time");
    t_global = e.t;
    q.push_back(model.observe(e).total);
  }
  return q;
}

}  // namespace evhdr
