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
#include "evhdr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "evhdr/errors.hpp"
#include "evhdr/log.hpp"
#include "evhdr/parallel.hpp"

namespace evhdr {

namespace {

void check_shapes(const ImageF& a, const ImageF& b) {
  if (!a.same_shape(b)) {
    throw ValidationError("image shapes differ: " + std::to_string(a.width()) + "x" +
                          std::to_string(a.height()) + " vs " + std::to_string(b.width()) +
                          "x" + std::to_string(b.height()));
  }
}

std::vector<double> gaussian_window(int size, double sigma) {
  std::vector<double> w(static_cast<std::size_t>(size) * static_cast<std::size_t>(size));
  const double c = 0.5 * (size - 1);
  double total = 0.0;
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const double r2 = (x - c) * (x - c) + (y - c) * (y - c);
      total += w[static_cast<std::size_t>(y * size + x)] = std::exp(-r2 / (2 * sigma * sigma));
    }
  }
  for (double& v : w) v /= total;
  return w;
}

}  // namespace

double mse(const ImageF& a, const ImageF& b) {
  check_shapes(a, b);
  if (a.empty()) throw ValidationError("mse of empty images");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc / static_cast<double>(a.size());
}

double ssim(const ImageF& a, const ImageF& b, const SsimParams& params) {
  check_shapes(a, b);
  const int n = params.window;
  if (n < 1 || a.width() < n || a.height() < n) {
    throw ValidationError("ssim needs images at least " + std::to_string(n) + " pixels per side");
  }
  const std::vector<double> w = gaussian_window(n, params.sigma);
  const double c1 = std::pow(params.k1 * params.dynamic_range, 2);
  const double c2 = std::pow(params.k2 * params.dynamic_range, 2);
  const int nx = a.width() - n + 1, ny = a.height() - n + 1;

  double total = 0.0;
  for (int y0 = 0; y0 < ny; ++y0) {
    for (int x0 = 0; x0 < nx; ++x0) {
      double mu_a = 0.0, mu_b = 0.0;
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
          const double wi = w[static_cast<std::size_t>(j * n + i)];
          mu_a += wi * a(x0 + i, y0 + j);
          mu_b += wi * b(x0 + i, y0 + j);
        }
      }
      double var_a = 0.0, var_b = 0.0, cov = 0.0;
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
          const double wi = w[static_cast<std::size_t>(j * n + i)];
          const double da = a(x0 + i, y0 + j) - mu_a;
          const double db = b(x0 + i, y0 + j) - mu_b;
          // Grouped so that swapping a and b, or passing a twice, is exact.
          var_a += wi * (da * da);
          var_b += wi * (db * db);
          cov += wi * (da * db);
        }
      }
      const double num = (2 * mu_a * mu_b + c1) * (2 * cov + c2);
      const double den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2);
      total += num / den;
    }
  }
  return total / (static_cast<double>(nx) * static_cast<double>(ny));
}

ImageF affine_log_align(const ImageF& image, const ImageF& reference, double i_offset) {
  check_shapes(image, reference);
  const double n = static_cast<double>(image.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < image.size(); ++i) {
    const double x = std::log(std::max(image[i], 0.0) + i_offset);
    const double y = std::log(std::max(reference[i], 0.0) + i_offset);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double var = sxx - sx * sx / n;
  const double gain = var > 1e-12 ? (sxy - sx * sy / n) / var : 1.0;
  const double offset = (sy - gain * sx) / n;
  ImageF out(image.width(), image.height());
  for (std::size_t i = 0; i < image.size(); ++i) {
    const double x = std::log(std::max(image[i], 0.0) + i_offset);
    out[i] = std::exp(gain * x + offset) - i_offset;
  }
  return out;
}

MetricReport evaluate_sequence(std::span<const TimedImage> reconstruction,
                               std::span<const TimedImage> reference,
                               const EvaluateOptions& options) {
  const std::size_t n = std::min(reconstruction.size(), reference.size());
  if (reconstruction.size() != reference.size()) {
    log_warn("evaluate: ", reconstruction.size(), " reconstructed vs ", reference.size(),
             " reference frames; scoring the first ", n);
  }
  MetricReport report;
  std::vector<std::size_t> todo;
  for (std::size_t k = 0; k < n; ++k) {
    check_shapes(reconstruction[k].image, reference[k].image);
    if (std::abs(reconstruction[k].t - reference[k].t) > options.timestamp_tolerance) {
      log_warn("evaluate: frame ", k, " timestamps differ (", reconstruction[k].t, " s vs ",
               reference[k].t, " s); skipped");
      report.skipped.push_back(k);
    } else {
      todo.push_back(k);
    }
  }

  report.frames.resize(todo.size());
  parallel_for(todo.size(), options.threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const std::size_t k = todo[i];
      ImageF rec = reconstruction[k].image;
      ImageF ref = reference[k].image;
      FrameMetric m;
      m.frame = k;
      m.t = reference[k].t;
      ImageF aligned;
      if (options.align) aligned = affine_log_align(rec, ref, options.i_offset);
      if (options.normalize) {
        const double peak = *std::max_element(ref.pixels().begin(), ref.pixels().end());
        if (peak > 0) {
          for (double& v : rec.pixels()) v /= peak;
          for (double& v : ref.pixels()) v /= peak;
          for (double& v : aligned.pixels()) v /= peak;
        }
      }
      m.mse = mse(rec, ref);
      m.ssim = ssim(rec, ref, options.ssim);
      if (options.align) {
        m.mse_aligned = mse(aligned, ref);
        m.ssim_aligned = ssim(aligned, ref, options.ssim);
      }
      report.frames[i] = std::move(m);
    }
  });

  if (!report.frames.empty()) {
    double sm = 0, ss = 0, sma = 0, ssa = 0;
    for (const FrameMetric& m : report.frames) {
      sm += m.mse;
      ss += m.ssim;
      if (options.align) {
        sma += *m.mse_aligned;
        ssa += *m.ssim_aligned;
      }
    }
    const double cnt = static_cast<double>(report.frames.size());
    report.mean_mse = sm / cnt;
    report.mean_ssim = ss / cnt;
    if (options.align) {
      report.mean_mse_aligned = sma / cnt;
      report.mean_ssim_aligned = ssa / cnt;
    }
  }
  return report;
}

}  // namespace evhdr
