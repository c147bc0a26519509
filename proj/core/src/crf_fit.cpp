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
#include <initializer_list>
#include <numeric>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "evhdr/crf.hpp"
#include "evhdr/errors.hpp"

namespace evhdr {

namespace {

constexpr int kLow = 1;     // lowest unsaturated level used by the fit
constexpr int kHigh = 254;  // highest unsaturated level used by the fit
constexpr int kMaxLevel = kCrfLevels - 1;

// Triangular confidence in a response level; zero at the clipped ends.
double hat_weight(int z) {
  if (z < kLow || z > kHigh) return 0.0;
  return std::min(z, kMaxLevel - z) / 127.5;
}

struct DisjointSet {
  std::vector<int> parent;
  explicit DisjointSet(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

[[noreturn]] void fail(const std::string& reason, int lo, int hi) {
  std::ostringstream os;
  os << "CRF fit failed: " << reason << " (uncovered response range [" << lo << ", " << hi
     << "])";
  throw CrfFitError(os.str(), lo, hi);
}

// Every observed level must be tied to the others through pixels that are
// unsaturated in more than one exposure, otherwise the relative scale of the
// disconnected parts of the curve is undetermined.
void check_coverage(std::span<const ExposureSample> stack, const std::vector<long>& counts,
                    int max_gap) {
  DisjointSet sets(kCrfLevels);
  const std::size_t n = stack.front().raw.size();
  for (std::size_t p = 0; p < n; ++p) {
    int first = -1;
    for (const auto& s : stack) {
      const int z = s.raw[p];
      if (hat_weight(z) == 0.0) continue;
      if (first < 0) first = z; else sets.unite(first, z);
    }
  }
  int lo = -1, hi = -1;
  for (int z = kLow; z <= kHigh; ++z) {
    if (counts[z] == 0) continue;
    if (lo < 0) lo = z;
    hi = z;
  }
  if (lo < 0) fail("no unsaturated observations", kLow, kHigh);

  int gap_start = -1;
  for (int z = lo; z <= hi; ++z) {
    if (counts[z] == 0) {
      if (gap_start < 0) gap_start = z;
      if (z - gap_start + 1 > max_gap) {
        int end = z;
        while (end + 1 <= hi && counts[end + 1] == 0) ++end;
        fail("response levels never observed", gap_start, end);
      }
    } else {
      gap_start = -1;
    }
  }

  const int root = sets.find(lo);
  int prev_connected = lo;
  for (int z = lo; z <= hi; ++z) {
    if (counts[z] == 0) continue;
    if (sets.find(z) != root) {
      fail("exposures do not overlap", prev_connected, z);
    }
    prev_connected = z;
  }
}

// Pixels spread evenly over the scene's brightness order, so every part of
// the response range contributes.
std::vector<std::size_t> pick_pixels(std::span<const ExposureSample> stack, int max_pixels) {
  const std::size_t n = stack.front().raw.size();
  std::vector<long> key(n, 0);
  for (const auto& s : stack) {
    for (std::size_t p = 0; p < n; ++p) key[p] += s.raw[p];
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return key[a] < key[b]; });
  const std::size_t m = std::min(n, static_cast<std::size_t>(std::max(2, max_pixels)));
  std::vector<std::size_t> picked;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t p = order[m == 1 ? 0 : i * (n - 1) / (m - 1)];
    if (picked.empty() || picked.back() != p) picked.push_back(p);
  }
  return picked;
}

}  // namespace

CrfTable fit_crf(std::span<const ExposureSample> stack, const CrfFitOptions& options) {
  if (stack.size() < 3) fail("at least three exposures are required", 0, kCrfLevels - 1);
  for (const auto& s : stack) {
    if (!(s.exposure > 0)) throw ValidationError("exposure times must be positive");
    if (!s.raw.same_shape(stack.front().raw) || s.raw.empty()) {
      throw ValidationError("exposure stack images must share non-empty dimensions");
    }
  }
  if (!(options.smoothness > 0)) throw ValidationError("CRF fit smoothness must be positive");

  const std::size_t n = stack.front().raw.size();
  std::vector<long> counts(kCrfLevels, 0);
  for (const auto& s : stack) {
    for (std::size_t p = 0; p < n; ++p) ++counts[s.raw[p]];
  }
  check_coverage(stack, counts, options.max_level_gap);

  int lo = kLow, hi = kHigh;
  while (counts[lo] == 0) ++lo;
  while (counts[hi] == 0) --hi;

  // Least squares over g = log inverse response and the log irradiance of
  // each sampled pixel: w(z) (g(z) - log E_i - log t_j) for every sample,
  // plus a second-difference penalty on g and g(128) = 0. Rows have at most
  // three entries, so the normal matrix is accumulated directly.
  const std::vector<std::size_t> pixels = pick_pixels(stack, options.max_pixels);
  const int unknowns = kCrfLevels + static_cast<int>(pixels.size());
  Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(unknowns, unknowns);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(unknowns);
  auto add_row = [&](std::initializer_list<std::pair<int, double>> row, double b) {
    for (const auto& [i, a] : row) {
      for (const auto& [j, c] : row) normal(i, j) += a * c;
      rhs(i) += a * b;
    }
  };
  for (std::size_t k = 0; k < pixels.size(); ++k) {
    const int e = kCrfLevels + static_cast<int>(k);
    for (const auto& s : stack) {
      const int z = s.raw[pixels[k]];
      const double w = hat_weight(z);
      if (w > 0) add_row({{z, w}, {e, -w}}, w * std::log(s.exposure));
    }
  }
  add_row({{128, 1.0}}, 0.0);
  for (int z = 1; z < kCrfLevels - 1; ++z) {
    const double w = options.smoothness * hat_weight(z) + 1e-3;
    add_row({{z - 1, w}, {z, -2 * w}, {z + 1, w}}, 0.0);
  }
  // Pixels never seen unsaturated only appear through their own diagonal.
  for (int i = kCrfLevels; i < unknowns; ++i) {
    if (normal(i, i) == 0.0) normal(i, i) = 1.0;
  }
  const Eigen::LDLT<Eigen::MatrixXd> solver(normal);
  if (solver.info() != Eigen::Success) throw NumericalError("CRF fit system is singular");
  const Eigen::VectorXd x = solver.solve(rhs);

  std::vector<double> inverse(kCrfLevels);
  for (int z = 0; z < kCrfLevels; ++z) inverse[z] = std::exp(x(z));
  const double top = inverse.back();
  if (!(top > 0) || !std::isfinite(top)) throw NumericalError("CRF fit produced a degenerate curve");
  for (double& v : inverse) v /= top;
  for (int z = 1; z < kCrfLevels; ++z) inverse[z] = std::max(inverse[z], inverse[z - 1]);

  // Weights from a least-squares slope over a window of levels; a plain
  // central difference of a fitted curve is too noisy to normalise by its
  // peak. Near the ends of the observed range the window is held in place
  // rather than truncated.
  std::vector<double> weights(kCrfLevels, 0.0);
  const int reach = std::max(1, options.slope_window / 2);
  for (int z = lo; z <= hi; ++z) {
    const int centre = hi - lo >= 2 * reach ? std::clamp(z, lo + reach, hi - reach) : (lo + hi) / 2;
    const int a = std::max(0, centre - reach), b = std::min(kCrfLevels - 1, centre + reach);
    double mz = 0.0, mg = 0.0;
    for (int k = a; k <= b; ++k) {
      mz += k;
      mg += inverse[k];
    }
    mz /= b - a + 1;
    mg /= b - a + 1;
    double szz = 0.0, szg = 0.0;
    for (int k = a; k <= b; ++k) {
      szz += (k - mz) * (k - mz);
      szg += (k - mz) * (inverse[k] - mg);
    }
    if (szg > 0) weights[z] = szz / szg;
  }
  return CrfTable::from_inverse(inverse, std::span<const double>(weights));
}

}  // namespace evhdr
