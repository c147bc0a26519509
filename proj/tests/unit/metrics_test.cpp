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
#include <gtest/gtest.h>

#include <cmath>

#include "evhdr/errors.hpp"
#include "evhdr/metrics.hpp"
#include "support/generators.hpp"

namespace evhdr {
namespace {

constexpr double kC1 = 0.01 * 0.01;

ImageF pattern(int w, int h) {
  ImageF img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) img(x, y) = 0.5 + 0.3 * std::sin(0.7 * x) * std::cos(0.45 * y);
  }
  return img;
}

ImageF transform(const ImageF& in, bool flip_x, bool flip_y, bool transpose) {
  const int w = transpose ? in.height() : in.width();
  const int h = transpose ? in.width() : in.height();
  ImageF out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      int sx = transpose ? y : x, sy = transpose ? x : y;
      if (flip_x) sx = in.width() - 1 - sx;
      if (flip_y) sy = in.height() - 1 - sy;
      out(x, y) = in(sx, sy);
    }
  }
  return out;
}

TEST(Mse, Identity) {
  const ImageF a = pattern(13, 9);
  EXPECT_EQ(mse(a, a), 0.0);
}

TEST(Mse, ConstantOffset) {
  ImageF a(6, 5, 0.3), b(6, 5, 0.4);
  EXPECT_NEAR(mse(a, b), 0.01, 1e-15);
}

TEST(Mse, MatchesDoubleLoop) {
  testing::Gen gen(61);
  const ImageF a = gen.image(37, 23), b = gen.image(37, 23);
  double acc = 0.0;
  for (int y = 0; y < 23; ++y) {
    for (int x = 0; x < 37; ++x) acc += (a(x, y) - b(x, y)) * (a(x, y) - b(x, y));
  }
  EXPECT_NEAR(mse(a, b), acc / (37 * 23), 1e-12);
}

TEST(Mse, ZeroOnlyForEqualImages) {
  testing::Gen gen(62);
  ImageF a = gen.image(8, 8);
  ImageF b = a;
  b(3, 4) = std::nextafter(b(3, 4), 2.0);
  EXPECT_GT(mse(a, b), 0.0);
  EXPECT_EQ(mse(b, b), 0.0);
}

TEST(Mse, ShapeMismatch) { EXPECT_THROW(mse(ImageF(3, 3), ImageF(3, 4)), ValidationError); }

TEST(Ssim, SelfSimilarityIsExactlyOne) {
  testing::Gen gen(63);
  for (int i = 0; i < 5; ++i) {
    const ImageF a = gen.image(gen.integer(11, 40), gen.integer(11, 40));
    EXPECT_EQ(ssim(a, a), 1.0);
  }
  const ImageF flat(16, 16, 0.25);
  EXPECT_EQ(ssim(flat, flat), 1.0);
}

TEST(Ssim, NegativeImageAnticorrelates) {
  const ImageF a = pattern(32, 32);
  ImageF neg = a;
  for (double& v : neg.pixels()) v = 1.0 - v;
  EXPECT_LT(ssim(a, neg), 0.0);
}

TEST(Ssim, ConstantPatchClosedForm) {
  for (auto [u, v] : {std::pair{0.2, 0.7}, std::pair{0.5, 0.5}, std::pair{0.0, 1.0},
                      std::pair{0.01, 0.02}}) {
    const ImageF a(20, 15, u), b(20, 15, v);
    EXPECT_NEAR(ssim(a, b), (2 * u * v + kC1) / (u * u + v * v + kC1), 1e-9);
  }
}

TEST(Ssim, SymmetricAndBounded) {
  testing::Gen gen(64);
  for (int i = 0; i < 20; ++i) {
    const ImageF a = gen.image(18, 14), b = gen.image(18, 14);
    const double s = ssim(a, b);
    EXPECT_EQ(s, ssim(b, a));
    EXPECT_GE(s, -1.0);
    EXPECT_LE(s, 1.0);
  }
}

TEST(Ssim, InvariantToSharedFlipsAndTransposition) {
  testing::Gen gen(65);
  const ImageF a = gen.image(21, 17), b = gen.image(21, 17);
  const double s = ssim(a, b);
  for (int mask = 1; mask < 8; ++mask) {
    const bool fx = mask & 1, fy = mask & 2, tr = mask & 4;
    EXPECT_NEAR(ssim(transform(a, fx, fy, tr), transform(b, fx, fy, tr)), s, 1e-12);
  }
}

TEST(Ssim, Preconditions) {
  EXPECT_THROW(ssim(ImageF(10, 20), ImageF(10, 20)), ValidationError);
  EXPECT_THROW(ssim(ImageF(12, 12), ImageF(12, 13)), ValidationError);
}

TEST(Ssim, UsesValidWindowsOnly) {
  // A change at the very corner is seen by exactly one window position.
  ImageF a(11, 11, 0.5), b(11, 11, 0.5);
  b(0, 0) = 0.9;
  const double one_window = ssim(a, b);
  ImageF c(12, 11, 0.5), d(12, 11, 0.5);
  d(0, 0) = 0.9;
  EXPECT_NEAR(ssim(c, d), (one_window + 1.0) / 2.0, 1e-12);
}

TEST(AffineLogAlign, RecoversGainAndOffset) {
  testing::Gen gen(66);
  const double i0 = 1.0 / 255;
  const ImageF ref = gen.image(16, 16, 0.05, 1.0);
  ImageF distorted(16, 16);
  for (std::size_t i = 0; i < ref.size(); ++i) {
    distorted[i] = std::exp(0.8 * std::log(ref[i] + i0) - 0.3) - i0;
  }
  const ImageF aligned = affine_log_align(distorted, ref, i0);
  EXPECT_LT(mse(aligned, ref), 1e-20);
}

TEST(EvaluateSequence, IdentityGivesPerfectScores) {
  testing::Gen gen(67);
  std::vector<TimedImage> seq;
  for (int k = 0; k < 4; ++k) seq.push_back({0.1 * k, gen.image(16, 12)});
  const MetricReport r = evaluate_sequence(seq, seq);
  EXPECT_EQ(r.evaluated(), 4u);
  EXPECT_EQ(r.mean_mse, 0.0);
  EXPECT_EQ(r.mean_ssim, 1.0);
}

TEST(EvaluateSequence, ShuffledReferenceIsSkipped) {
  testing::Gen gen(68);
  std::vector<TimedImage> rec, ref;
  for (int k = 0; k < 4; ++k) rec.push_back({0.1 * k, gen.image(16, 12)});
  ref = rec;
  std::swap(ref[1], ref[3]);
  const MetricReport r = evaluate_sequence(rec, ref);
  EXPECT_EQ(r.skipped, (std::vector<std::size_t>{1, 3}));
  EXPECT_EQ(r.evaluated(), 2u);
}

TEST(EvaluateSequence, NormalisesByReferencePeak) {
  std::vector<TimedImage> rec = {{0.0, ImageF(12, 12, 2.0)}};
  std::vector<TimedImage> ref = {{0.0, ImageF(12, 12, 4.0)}};
  const MetricReport r = evaluate_sequence(rec, ref);
  EXPECT_DOUBLE_EQ(r.mean_mse, 0.25);
}

TEST(EvaluateSequence, ShapeMismatchIsAnError) {
  std::vector<TimedImage> rec = {{0.0, ImageF(12, 12)}};
  std::vector<TimedImage> ref = {{0.0, ImageF(12, 13)}};
  EXPECT_THROW(evaluate_sequence(rec, ref), ValidationError);
}

TEST(EvaluateSequence, ThreadsDoNotChangeResults) {
  testing::Gen gen(69);
  std::vector<TimedImage> rec, ref;
  for (int k = 0; k < 7; ++k) {
    rec.push_back({0.1 * k, gen.image(20, 15)});
    ref.push_back({0.1 * k, gen.image(20, 15)});
  }
  EvaluateOptions o;
  o.align = true;
  const MetricReport a = evaluate_sequence(rec, ref, o);
  o.threads = 4;
  const MetricReport b = evaluate_sequence(rec, ref, o);
  EXPECT_EQ(a.mean_mse, b.mean_mse);
  EXPECT_EQ(a.mean_ssim, b.mean_ssim);
  EXPECT_EQ(*a.mean_mse_aligned, *b.mean_mse_aligned);
}

}  // namespace
}  // namespace evhdr
