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

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace evhdr {

/// A single DVS event: a signed log-intensity impulse at one pixel.
struct Event {
  double t = 0.0;  // seconds
  std::uint16_t x = 0;
  std::uint16_t y = 0;
  std::int8_t polarity = 1;  // -1 or +1

  bool operator==(const Event&) const = default;
};

/// File formats carry integer microseconds; these are the only conversions.
inline std::int64_t to_microseconds(double seconds) { return std::llround(seconds * 1e6); }
inline double from_microseconds(std::int64_t us) { return static_cast<double>(us) / 1e6; }

/// Tuning of the three-part event noise covariance.
struct EventNoiseParams {
  double sigma2_proc = 0.01;  // 1/s, grows with time since the pixel's last event
  double sigma2_iso = 0.01;   // 1/s, grows with time since the last neighbour event
  double sigma2_ref = 0.01;   // charged when events arrive within rho_bar
  double rho_bar = 0.01;      // s, refractory upper bound
  int neighborhood_radius = 1;
  double q_cap = 1.0;  // maximum per-event covariance

  void validate() const;
};

double q_process(double t_i, double t_prev, const EventNoiseParams& params);

/// Isolated-pixel covariance. `t_star_neighborhood` is the latest event time
/// seen in the neighbourhood; when no neighbour has fired yet the age is
/// measured from the stream start and capped at q_cap.
double q_iso(double t_i, std::optional<double> t_star_neighborhood, double t_stream_start,
             const EventNoiseParams& params);

double q_ref(double t_i, double t_prev, const EventNoiseParams& params);

struct NoiseComponents {
  double process = 0.0;
  double isolated = 0.0;
  double refractory = 0.0;
  double total = 0.0;
};

/// Per-pixel timestamp bookkeeping for the event noise covariance.
///
/// Events must be fed in stream order. Within one pixel timestamps must be
/// strictly increasing; distinct pixels may share a timestamp. A neighbour
/// event that precedes the current event in stream order counts as "before
/// or at" the current time, so ties resolve by stream position.
class EventNoiseModel {
 public:
  EventNoiseModel(int width, int height, double t_stream_start, EventNoiseParams params);

  /// Computes the capped covariance for `event` and records it. Throws
  /// StreamError for out-of-bounds pixels, bad polarity, or per-pixel
  /// ordering violations.
  NoiseComponents observe(const Event& event);
  double q_total(const Event& event) { return observe(event).total; }

  double last_event_time(int x, int y) const;
  std::optional<double> neighborhood_latest(int x, int y) const;
  double stream_start() const { return t_start_; }
  const EventNoiseParams& params() const { return params_; }

 private:
  std::size_t pixel(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_;
  int height_;
  double t_start_;
  EventNoiseParams params_;
  std::vector<double> last_time_;
  std::vector<std::uint8_t> fired_;
  std::vector<double> neighbor_latest_;  // NaN until a neighbour fires
};

/// Computes q_total for every event of a globally time-sorted stream.
std::vector<double> compute_event_covariances(std::span<const Event> events, int width,
                                              int height, double t_stream_start,
                                              const EventNoiseParams& params);

}  // namespace evhdr
