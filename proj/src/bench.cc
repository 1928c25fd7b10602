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

#include "gradspec/bench.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <map>
#include <thread>
#include <tuple>

#include <fmt/format.h>

#include "gradspec/entropy.h"
#include "gradspec/synth.h"
#include "gradspec/thresholding.h"

namespace gradspec {
namespace {

using Clock = std::chrono::steady_clock;

constexpr size_t kPoolSize = 64;

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Scores n samples drawn cyclically from pool; returns the scores.
std::vector<double> ScoreCycling(const std::vector<GradientRecord> &pool, int n,
                                 const FilterConfig &config, int threads) {
  std::vector<double> scores(static_cast<size_t>(n));
  auto work = [&](size_t i) {
    scores[i] = ScoreSample(pool[i % pool.size()], config).normalized_entropy;
  };
  if (threads <= 1) {
    for (size_t i = 0; i < scores.size(); ++i) work(i);
    return scores;
  }
  std::atomic<size_t> next{0};
  std::vector<std::jthread> workers;
  for (int t = 0; t < threads; ++t) {
    workers.emplace_back([&] {
      for (size_t i = next.fetch_add(1); i < scores.size(); i = next.fetch_add(1)) work(i);
    });
  }
  return scores;
}

}  // namespace

LinearFit FitLine(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw Error("fit needs >= 2 points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw Error("fit needs >= 2 distinct x values");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += r * r;
  }
  fit.r_squared = syy == 0.0 ? (ss_res == 0.0 ? 1.0 : 0.0) : 1.0 - ss_res / syy;
  return fit;
}

BenchReport RunBench(std::span<const BenchSize> sizes, const FilterConfig &config,
                     int repetitions, std::span<const int> thread_counts) {
  if (repetitions < 3) throw Error("repetitions >= 3 required");
  if (sizes.empty()) throw Error("empty sizes");
  config.Validate();
  const std::vector<int> threads_list =
      thread_counts.empty() ? std::vector<int>{1}
                            : std::vector<int>(thread_counts.begin(), thread_counts.end());

  BenchReport report;
  for (const BenchSize &size : sizes) {
    if (size.n_samples < 1) throw Error("bench sizes need n_samples >= 1");
    EnsembleSpec spec;
    const int pool = static_cast<int>(std::min<size_t>(kPoolSize, size.n_samples));
    spec.n_poison = pool / 10;
    spec.n_clean = pool - spec.n_poison;
    spec.rows = size.rows;
    spec.cols = size.cols;
    spec.subsample_divisor = config.subsample_divisor;
    const int block = std::min(size.rows, size.cols) / config.subsample_divisor;
    spec.clean_profile.length = std::min(spec.clean_profile.length, block);
    spec.poison_profile.length = std::min(spec.poison_profile.length, block);
    spec.seed = config.seed;
    const GradientDataset data = GenerateEnsemble(spec);

    for (int threads : threads_list) {
      ScoreCycling(data.records, size.n_samples, config, threads);  // warm-up
      std::vector<double> score_times, threshold_times;
      for (int rep = 0; rep < repetitions; ++rep) {
        const auto t0 = Clock::now();
        const std::vector<double> scores =
            ScoreCycling(data.records, size.n_samples, config, threads);
        const auto t1 = Clock::now();
        SelectThreshold(scores, config);
        const auto t2 = Clock::now();
        score_times.push_back(std::chrono::duration<double>(t1 - t0).count());
        threshold_times.push_back(std::chrono::duration<double>(t2 - t1).count());
      }
      BenchRow row;
      row.n_samples = size.n_samples;
      row.rows = size.rows;
      row.cols = size.cols;
      row.k = config.k;
      row.threads = threads;
      row.wall_time_total = Median(score_times);
      row.wall_time_per_sample = 1e3 * row.wall_time_total / size.n_samples;
      row.threshold_time = Median(threshold_times);
      report.rows.push_back(row);
    }
  }

  std::map<std::tuple<int, int, int>, std::pair<std::vector<double>, std::vector<double>>>
      groups;
  for (const BenchRow &r : report.rows) {
    auto &g = groups[{r.rows, r.cols, r.threads}];
    g.first.push_back(r.n_samples);
    g.second.push_back(r.wall_time_total);
  }
  for (const auto &[key, xy] : groups) {
    const auto &[x, y] = xy;
    if (std::count(x.begin(), x.end(), x.front()) == static_cast<long>(x.size())) continue;
    const LinearFit f = FitLine(x, y);
    report.fits.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key),
                           f.slope, f.intercept, f.r_squared});
  }
  return report;
}

nlohmann::json BenchToJson(const BenchReport &report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const BenchRow &r : report.rows) {
    rows.push_back({{"n_samples", r.n_samples},
                    {"rows", r.rows},
                    {"cols", r.cols},
                    {"k", r.k},
                    {"threads", r.threads},
                    {"wall_time_total_s", r.wall_time_total},
                    {"wall_time_per_sample_ms", r.wall_time_per_sample},
                    {"threshold_time_s", r.threshold_time}});
  }
  nlohmann::json fits = nlohmann::json::array();
  for (const BenchFit &f : report.fits) {
    fits.push_back({{"rows", f.rows},
                    {"cols", f.cols},
                    {"threads", f.threads},
                    {"slope_s_per_sample", f.slope},
                    {"intercept_s", f.intercept},
                    {"r_squared", f.r_squared}});
  }
  return {{"rows", std::move(rows)}, {"fits", std::move(fits)}};
}

std::string BenchToTable(const BenchReport &report) {
  std::string out = fmt::format("{:>8} {:>11} {:>4} {:>7} {:>12} {:>14} {:>14}\n", "N",
                                "dims", "k", "threads", "total [s]", "per-sample [ms]",
                                "threshold [ms]");
  for (const BenchRow &r : report.rows) {
    out += fmt::format("{:>8} {:>11} {:>4} {:>7} {:>12.4f} {:>15.4f} {:>14.3f}\n",
                       r.n_samples, fmt::format("{}x{}", r.rows, r.cols), r.k,
                       r.threads, r.wall_time_total, r.wall_time_per_sample,
                       1e3 * r.threshold_time);
  }
  for (const BenchFit &f : report.fits) {
    out += fmt::format("linear fit {}x{} threads={}: {:.4f} ms/sample, R^2 = {:.4f}\n",
                       f.rows, f.cols, f.threads, 1e3 * f.slope, f.r_squared);
  }
  return out;
}

}  // namespace gradspec
