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
#include <cmath>
#include <numbers>

#include "evhdr/errors.hpp"
#include "evhdr/synth.hpp"

namespace evhdr {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double smoothstep_edge(double d, double width) { return 0.5 * (1.0 + std::tanh(d / width)); }

}  // namespace

std::vector<std::string> scene_names() { return {"static", "edge", "sinusoid", "hdr-texture"}; }

GroundTruthVideo make_scene(const std::string& name, int width, int height, double duration,
                            double fps) {
  const double w = width, h = height;
  if (name == "static") {
    return render_video(width, height, duration, fps, [=](double x, double y, double) {
      return 0.1 + 0.8 * (x + y) / std::max(1.0, w + h - 2.0);
    });
  }
  if (name == "edge") {
    // A soft bright bar sweeping left to right once over the clip.
    return render_video(width, height, duration, fps, [=](double x, double, double t) {
      const double pos = -0.1 * w + 1.2 * w * t / duration;
      return 0.1 + 0.7 * smoothstep_edge(x - pos, 1.5);
    });
  }
  if (name == "sinusoid") {
    return render_video(width, height, duration, fps, [=](double x, double y, double t) {
      const double spatial = 0.5 + 0.5 * std::sin(kTwoPi * (x / w + 0.5 * y / h));
      return (0.15 + 0.6 * spatial) * (1.0 + 0.3 * std::sin(kTwoPi * 2.0 * t));
    });
  }
  if (name == "hdr-texture") {
    // Log-domain texture covering roughly 0.02 to 1.0, drifting horizontally.
    const double lo = std::log(0.02), hi = std::log(1.0);
    return render_video(width, height, duration, fps, [=](double x, double y, double t) {
      const double u = (x - 0.25 * w * t / duration) / w;
      const double v = y / h;
      const double s = 0.5 + 0.25 * std::sin(kTwoPi * 2.0 * u) +
                       0.25 * std::sin(kTwoPi * (1.5 * v + 0.5 * u));
      return std::exp(lo + (hi - lo) * s);
    });
  }
  throw ValidationError("unknown scene: " + name);
}

}  // namespace evhdr
