// Copyright 2026 The gradspec Authors.
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

#include "gradspec/thresholding.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "gradspec/error.h"

namespace gradspec {

std::string_view ModeName(ThresholdMode mode) {
  return mode == ThresholdMode::kValley ? "valley" : "fallback";
}

double SilvermanBandwidth(std::span<const double> scores) {
  if (scores.size() < 2) throw Error("degenerate distribution: fewer than 2 scores");
  // Welford's update.
  double mean = 0.0;
  double m2 = 0.0;
  size_t n = 0;
  for (double x : scores) {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }
  const double sd = std::sqrt(m2 / static_cast<double>(n - 1));
  if (!(sd > 0.0)) throw Error("degenerate distribution: zero spread");
  return 1.06 * sd * std::pow(static_cast<double>(n), -0.2);
}

std::vector<double> UniformGrid(int n) {
  if (n < 2) throw Error("grid needs at least 2 points");
  std::vector<double> grid(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) grid[i] = static_cast<double>(i) / (n - 1);
  return grid;
}

std::vector<double> KdeDensity(std::span<const double> scores, double bandwidth,
                               std::span<const double> grid) {
  if (scores.empty()) throw Error("kde needs at least one score");
  if (!(bandwidth > 0.0)) throw Error("kde bandwidth must be > 0");
  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());

  constexpr double kCutoff = 10.0;
  const double norm = 1.0 / (static_cast<double>(sorted.size()) * bandwidth *
                             std::sqrt(2.0 * std::numbers::pi));
  std::vector<double> density(grid.size());
  for (size_t g = 0; g < grid.size(); ++g) {
    const double x = grid[g];
    auto lo = std::lower_bound(sorted.begin(), sorted.end(), x - kCutoff * bandwidth);
    auto hi = std::upper_bound(lo, sorted.end(), x + kCutoff * bandwidth);
    double sum = 0.0;
    for (auto it = lo; it != hi; ++it) {
      const double u = (x - *it) / bandwidth;
      sum += std::exp(-0.5 * u * u);
    }
    density[g] = sum * norm;
  }
  return density;
}

KdeModel FitKde(std::span<const double> scores, int grid_size) {
  KdeModel model;
  model.bandwidth = SilvermanBandwidth(scores);
  model.grid = UniformGrid(grid_size);
  model.density = KdeDensity(scores, model.bandwidth, model.grid);
  model.n_samples = static_cast<int>(scores.size());
  return model;
}

double PeakProminence(std::span<const double> density, size_t peak) {
  const double height = density[peak];
  // Walk each side until the density rises above the peak or the grid ends;
  // the side's base is the lowest point passed. A side with no points is
  // ignored so endpoint peaks are measured against their single flank.
  auto side_base = [&](bool leftward) -> std::optional<double> {
    std::optional<double> base;
    for (size_t i = peak; leftward ? i-- > 0 : ++i < density.size();) {
      if (density[i] > height) break;
      base = base ? std::min(*base, density[i]) : density[i];
    }
    return base;
  };
  const std::optional<double> left = side_base(true);
  const std::optional<double> right = side_base(false);
  if (!left && !right) return height;
  const double base = left && right ? std::max(*left, *right) : (left ? *left : *right);
  return height - base;
}

std::optional<Valley> FindValley(const KdeModel &model, double prominence_fraction) {
  const auto &d = model.density;
  const size_t n = d.size();
  if (n < 3 || model.grid.size() != n) return std::nullopt;

  const double global_max = *std::max_element(d.begin(), d.end());
  if (!(global_max > 0.0)) return std::nullopt;
  const double min_prominence = prominence_fraction * global_max;

  std::vector<size_t> peaks;
  for (size_t i = 0; i < n; ++i) {
    const bool above_left = i == 0 || d[i] > d[i - 1];
    const bool above_right = i + 1 == n || d[i] > d[i + 1];
    if (above_left && above_right && PeakProminence(d, i) >= min_prominence) {
      peaks.push_back(i);
    }
  }
  if (peaks.size() < 2) return std::nullopt;

  const size_t left = peaks.front();
  const size_t right = peaks.back();
  size_t best = left + 1;
  for (size_t i = left + 2; i < right; ++i) {
    if (d[i] < d[best]) best = i;
  }
  Valley v;
  v.tau = model.grid[best];
  v.peak_low = model.grid[left];
  v.peak_high = model.grid[right];
  v.tau_index = best;
  return v;
}

ThresholdResult SelectThreshold(std::span<const double> scores,
                                const FilterConfig &config) {
  config.Validate();
  if (scores.empty()) throw Error("empty score list");
  for (double s : scores) {
    if (!(s >= 0.0 && s <= 1.0)) {
      throw Error("score " + std::to_string(s) + " outside [0, 1]");
    }
  }
  ThresholdResult result;
  result.tau = config.fallback_tau;
  result.mode = ThresholdMode::kFallback;
  if (scores.size() < static_cast<size_t>(config.min_samples_for_kde)) return result;

  try {
    result.model = FitKde(scores, config.kde_grid_size);
  } catch (const Error &) {
    // Zero spread: no bandwidth, no model.
    return result;
  }
  if (auto valley = FindValley(*result.model, config.peak_prominence_fraction)) {
    result.tau = valley->tau;
    result.mode = ThresholdMode::kValley;
    result.peak_low = valley->peak_low;
    result.peak_high = valley->peak_high;
  }
  return result;
}

}  // namespace gradspec
