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

// Seeded generators and small numerical oracles shared by the test suites.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "evhdr/event.hpp"
#include "evhdr/image.hpp"

namespace evhdr::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }
  int sign() { return coin() ? 1 : -1; }
  std::mt19937_64& engine() { return rng_; }

  ImageF image(int w, int h, double lo = 0.0, double hi = 1.0) {
    ImageF img(w, h);
    for (double& v : img.pixels()) v = uniform(lo, hi);
    return img;
  }

  /// Globally sorted stream with strictly increasing times per pixel. Times
  /// are whole microseconds, so ties across pixels are common.
  std::vector<Event> event_stream(int w, int h, std::size_t n, double t0, double duration) {
    std::vector<Event> out;
    out.reserve(n);
    const auto span_us = static_cast<std::int64_t>(duration * 1e6);
    std::vector<std::int64_t> stamps(n);
    for (auto& s : stamps) {
      s = std::uniform_int_distribution<std::int64_t>(0, span_us)(rng_);
    }
    std::sort(stamps.begin(), stamps.end());
    std::vector<std::int64_t> last(static_cast<std::size_t>(w * h), -1);
    for (std::int64_t s : stamps) {
      for (int attempt = 0; attempt < 64; ++attempt) {
        const int x = integer(0, w - 1), y = integer(0, h - 1);
        auto& l = last[static_cast<std::size_t>(y * w + x)];
        if (l == s) continue;
        l = s;
        out.push_back({t0 + from_microseconds(s), static_cast<std::uint16_t>(x),
                       static_cast<std::uint16_t>(y), static_cast<std::int8_t>(sign())});
        break;
      }
    }
    return out;
  }

 private:
  std::mt19937_64 rng_;
};

/// Classic fourth-order Runge-Kutta for a 2-state system y' = f(y).
inline std::pair<double, double> rk4(const std::function<std::pair<double, double>(double, double)>& f,
                                     double y0, double y1, double duration, long steps) {
  const double h = duration / static_cast<double>(steps);
  for (long i = 0; i < steps; ++i) {
    const auto [a0, a1] = f(y0, y1);
    const auto [b0, b1] = f(y0 + 0.5 * h * a0, y1 + 0.5 * h * a1);
    const auto [c0, c1] = f(y0 + 0.5 * h * b0, y1 + 0.5 * h * b1);
    const auto [d0, d1] = f(y0 + h * c0, y1 + h * c1);
    y0 += h / 6.0 * (a0 + 2 * b0 + 2 * c0 + d0);
    y1 += h / 6.0 * (a1 + 2 * b1 + 2 * c1 + d1);
  }
  return {y0, y1};
}

/// Integrates the filter ODE with constant L^A and R:
///   dL/dt = -(P/R) (L - L^A),  dP/dt = -P^2 / R.
/// Returns (L, P) after `duration`.
inline std::pair<double, double> rk4_filter(double l0, double p0, double l_a, double r,
                                            double duration, long steps) {
  return rk4(
      [&](double l, double p) {
        return std::pair<double, double>{-(p / r) * (l - l_a), -p * p / r};
      },
      l0, p0, duration, steps);
}

inline double relative_error(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

}  // namespace evhdr::testing
