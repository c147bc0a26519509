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
#include "evhdr/event_index.hpp"

#include <sstream>

#include "evhdr/errors.hpp"

namespace evhdr {

PixelEventIndex::PixelEventIndex(int width, int height, std::span<const Event> events,
                                 std::span<const double> covariances)
    : width_(width), height_(height) {
  require(width > 0 && height > 0, "PixelEventIndex: empty sensor");
  require(covariances.empty() || covariances.size() == events.size(),
          "PixelEventIndex: covariance count mismatch");
  const std::size_t n_pix = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  offsets_.assign(n_pix + 1, 0);
  for (const Event& e : events) {
    if (e.x >= width || e.y >= height) throw StreamError("event outside sensor bounds");
    ++offsets_[static_cast<std::size_t>(e.y) * width + e.x + 1];
  }
  for (std::size_t p = 0; p < n_pix; ++p) offsets_[p + 1] += offsets_[p];

  times_.resize(events.size());
  polarity_.resize(events.size());
  cum_.resize(events.size());
  if (!covariances.empty()) q_.resize(events.size());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t k = 0; k < events.size(); ++k) {
    const Event& e = events[k];
    const std::size_t p = static_cast<std::size_t>(e.y) * width + e.x;
    const std::size_t slot = fill[p]++;
    if (slot > offsets_[p] && !(e.t > times_[slot - 1])) {
      std::ostringstream os;
      os << "events at pixel (" << e.x << "," << e.y << ") are not strictly increasing in time";
      throw StreamError(os.str());
    }
    times_[slot] = e.t;
    polarity_[slot] = e.polarity;
    cum_[slot] = (slot > offsets_[p] ? cum_[slot - 1] : 0) + e.polarity;
    if (!q_.empty()) q_[slot] = covariances[k];
  }
}

}  // namespace evhdr
