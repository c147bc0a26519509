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

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "evhdr/event.hpp"

namespace evhdr {

/// Events regrouped per pixel (compressed rows), each pixel's events in time
/// order, with running polarity sums so any window sum is two lookups.
class PixelEventIndex {
 public:
  PixelEventIndex() = default;
  /// `covariances` is optional; when given it must match `events` in size.
  PixelEventIndex(int width, int height, std::span<const Event> events,
                  std::span<const double> covariances = {});

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixel_count() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t event_count() const { return times_.size(); }

  std::size_t begin(std::size_t pixel) const { return offsets_[pixel]; }
  std::size_t end(std::size_t pixel) const { return offsets_[pixel + 1]; }

  double time(std::size_t i) const { return times_[i]; }
  int polarity(std::size_t i) const { return polarity_[i]; }
  double covariance(std::size_t i) const { return q_.empty() ? 0.0 : q_[i]; }
  /// Sum of polarities of the pixel's events up to and including i.
  std::int32_t cumulative(std::size_t i) const { return cum_[i]; }

  /// First index in the pixel's range with time > t.
  std::size_t upper(std::size_t pixel, double t) const {
    const auto first = times_.begin() + static_cast<std::ptrdiff_t>(begin(pixel));
    const auto last = times_.begin() + static_cast<std::ptrdiff_t>(end(pixel));
    return static_cast<std::size_t>(std::upper_bound(first, last, t) - times_.begin());
  }

  /// Polarity sum over the pixel's events with time <= t.
  std::int32_t sum_through(std::size_t pixel, double t) const {
    const std::size_t u = upper(pixel, t);
    return u == begin(pixel) ? 0 : cum_[u - 1];
  }

  /// Polarity sum over the half-open window (a, b].
  std::int32_t net_polarity(std::size_t pixel, double a, double b) const {
    return sum_through(pixel, b) - sum_through(pixel, a);
  }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<double> times_;
  std::vector<std::int8_t> polarity_;
  std::vector<std::int32_t> cum_;
  std::vector<double> q_;
};

}  // namespace evhdr
