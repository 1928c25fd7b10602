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

// Threshold selection over one-dimensional entropy scores: a Gaussian KDE with
// Silverman bandwidth on a fixed [0, 1] grid, then the density minimum between
// the outermost qualifying peaks. Falls back to a configured constant when the
// distribution shows no usable two-peak structure.

#ifndef GRADSPEC_THRESHOLDING_H_
#define GRADSPEC_THRESHOLDING_H_

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "gradspec/error.h"
#include "gradspec/filter_config.h"

namespace gradspec {

struct KdeModel {
  double bandwidth = 0.0;
  std::vector<double> grid;     // ascending, grid.front() == 0, grid.back() == 1
  std::vector<double> density;  // density at each grid point
  int n_samples = 0;
};

enum class ThresholdMode { kValley, kFallback };

std::string_view ModeName(ThresholdMode mode);

struct Valley {
  double tau = 0.0;
  double peak_low = 0.0;
  double peak_high = 0.0;
  size_t tau_index = 0;
};

struct ThresholdResult {
  double tau = 0.0;
  ThresholdMode mode = ThresholdMode::kFallback;
  std::optional<double> peak_low;
  std::optional<double> peak_high;
  std::optional<KdeModel> model;  // present whenever a KDE was fitted
};

// h = 1.06 * sd * N^(-1/5) with the (N - 1) sample standard deviation.
// Throws "degenerate distribution" for N < 2 or zero spread.
double SilvermanBandwidth(std::span<const double> scores);

// n evenly spaced points covering [0, 1] inclusive.
std::vector<double> UniformGrid(int n);

// Gaussian KDE evaluated at each grid point. Kernels are truncated at 10
// bandwidths, well below double resolution.
std::vector<double> KdeDensity(std::span<const double> scores, double bandwidth,
                               std::span<const double> grid);

KdeModel FitKde(std::span<const double> scores, int grid_size);

// Topographic prominence of the local maximum at `peak`: its height minus the
// higher of the two lowest points separating it from higher ground (or from
// the grid end) on either side.
double PeakProminence(std::span<const double> density, size_t peak);

// Peaks are strict local maxima of the grid density (an endpoint qualifies if
// it strictly exceeds its only neighbour) whose prominence is at least
// prominence_fraction of the global maximum. With two or more such peaks, the
// threshold is the lowest grid density strictly between the peak nearest 0 and
// the peak nearest 1 (lowest index on ties).
std::optional<Valley> FindValley(const KdeModel &model,
                                 double prominence_fraction = 0.05);

ThresholdResult SelectThreshold(std::span<const double> scores,
                                const FilterConfig &config);

}  // namespace gradspec

#endif  // GRADSPEC_THRESHOLDING_H_
