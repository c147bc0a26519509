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

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "evhdr/image.hpp"

namespace evhdr {

struct SsimParams {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 1.0;
};

/// Mean squared difference. Throws ValidationError on shape mismatch.
double mse(const ImageF& a, const ImageF& b);

/// Mean local SSIM over every fully-contained window position.
double ssim(const ImageF& a, const ImageF& b, const SsimParams& params = {});

/// Fits gain and offset on log(I + i_offset) of `image` against `reference`
/// by least squares and returns the adjusted linear image.
ImageF affine_log_align(const ImageF& image, const ImageF& reference, double i_offset);

struct TimedImage {
  double t = 0.0;
  ImageF image;
};

struct FrameMetric {
  std::size_t frame = 0;
  double t = 0.0;
  double mse = 0.0;
  double ssim = 0.0;
  std::optional<double> mse_aligned;
  std::optional<double> ssim_aligned;
};

struct MetricReport {
  std::vector<FrameMetric> frames;
  std::vector<std::size_t> skipped;  // frame indices with mismatched timestamps
  double mean_mse = 0.0;
  double mean_ssim = 0.0;
  std::optional<double> mean_mse_aligned;
  std::optional<double> mean_ssim_aligned;

  std::size_t evaluated() const { return frames.size(); }
};

struct EvaluateOptions {
  double timestamp_tolerance = 1e-3;  // s
  /// Divide both images by the reference maximum before comparison.
  bool normalize = true;
  bool align = false;
  double i_offset = 1.0 / 255.0;
  int threads = 1;
  SsimParams ssim;
};

/// Pairs frames by position and scores each pair whose timestamps agree
/// within tolerance. Pairs with different shapes raise ValidationError.
MetricReport evaluate_sequence(std::span<const TimedImage> reconstruction,
                               std::span<const TimedImage> reference,
                               const EvaluateOptions& options = {});

}  // namespace evhdr
