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

// Wall-clock timing of the scoring and threshold stages.

#ifndef GRADSPEC_BENCH_H_
#define GRADSPEC_BENCH_H_

#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "gradspec/error.h"
#include "gradspec/filter_config.h"

namespace gradspec {

struct BenchSize {
  int n_samples = 0;
  int rows = 0;
  int cols = 0;
};

struct BenchRow {
  int n_samples = 0;
  int rows = 0;
  int cols = 0;
  int k = 0;
  int threads = 1;
  double wall_time_total = 0.0;       // seconds, median over repetitions
  double wall_time_per_sample = 0.0;  // milliseconds
  double threshold_time = 0.0;        // seconds, median over repetitions
};

// Least-squares line through (n_samples, wall_time_total) for one dims/threads
// group.
struct BenchFit {
  int rows = 0;
  int cols = 0;
  int threads = 1;
  double slope = 0.0;  // seconds per sample
  double intercept = 0.0;
  double r_squared = 0.0;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  std::vector<BenchFit> fits;  // groups with at least two distinct N
};

// Ordinary least squares y = a + b x; returns {intercept, slope, r_squared}.
// R^2 is 1 when y has no variance and the fit is exact.
struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r_squared = 0.0;
};
LinearFit FitLine(std::span<const double> x, std::span<const double> y);

// Median-of-`repetitions` timings after one discarded warm-up run. Inputs are
// synthetic (90% clean, 10% poisoned profiles); scoring cycles through a pool
// of at most 64 distinct matrices so memory stays flat in N. Throws
// "repetitions >= 3" and "empty sizes".
BenchReport RunBench(std::span<const BenchSize> sizes, const FilterConfig &config,
                     int repetitions, std::span<const int> thread_counts);

nlohmann::json BenchToJson(const BenchReport &report);
std::string BenchToTable(const BenchReport &report);

}  // namespace gradspec

#endif  // GRADSPEC_BENCH_H_
