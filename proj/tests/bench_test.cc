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

#include <Eigen/QR>
#include <gtest/gtest.h>

namespace gradspec {
namespace {

TEST(FitLineTest, MatchesNormalEquations) {
  const std::vector<double> x{100, 200, 400, 800};
  const std::vector<double> y{0.11, 0.19, 0.42, 0.79};
  const LinearFit f = FitLine(x, y);
  // Normal equations solved with Eigen's QR.
  Eigen::MatrixXd a(4, 2);
  Eigen::VectorXd b(4);
  for (int i = 0; i < 4; ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = x[i];
    b(i) = y[i];
  }
  const Eigen::VectorXd coef = a.colPivHouseholderQr().solve(b);
  EXPECT_NEAR(f.intercept, coef(0), 1e-12);
  EXPECT_NEAR(f.slope, coef(1), 1e-15);
  const Eigen::VectorXd resid = b - a * coef;
  const double mean = b.mean();
  const double r2 = 1.0 - resid.squaredNorm() / (b.array() - mean).square().sum();
  EXPECT_NEAR(f.r_squared, r2, 1e-12);

  const LinearFit exact = FitLine(std::vector<double>{1, 2, 3}, std::vector<double>{2, 4, 6});
  EXPECT_NEAR(exact.r_squared, 1.0, 1e-15);
  EXPECT_THROW(FitLine(std::vector<double>{1, 1}, std::vector<double>{2, 3}), Error);
}

TEST(RunBenchTest, RejectsTooFewRepetitions) {
  const std::vector<BenchSize> sizes{{10, 128, 128}};
  const std::vector<int> threads{1};
  try {
    RunBench(sizes, FilterConfig{}, 1, threads);
    FAIL();
  } catch (const Error &e) {
    EXPECT_NE(std::string(e.what()).find("repetitions >= 3"), std::string::npos);
  }
  EXPECT_THROW(RunBench({}, FilterConfig{}, 3, threads), Error);
}

TEST(RunBenchTest, ReportShape) {
  const std::vector<BenchSize> sizes{{20, 128, 128}, {40, 128, 128}};
  const std::vector<int> threads{1, 2};
  const BenchReport r = RunBench(sizes, FilterConfig{}, 3, threads);
  ASSERT_EQ(r.rows.size(), 4u);
  for (const BenchRow &row : r.rows) {
    EXPECT_EQ(row.k, 16);
    EXPECT_GT(row.wall_time_total, 0.0);
    EXPECT_NEAR(row.wall_time_per_sample, 1e3 * row.wall_time_total / row.n_samples, 1e-12);
  }
  EXPECT_EQ(r.fits.size(), 2u);
  const auto j = BenchToJson(r);
  EXPECT_EQ(j.at("rows").size(), 4u);
  EXPECT_NE(BenchToTable(r).find("R^2"), std::string::npos);
}

TEST(RunBenchTest, SingleLargeSampleWithinLatencyBound) {
  const std::vector<BenchSize> sizes{{1, 512, 512}};
  const std::vector<int> threads{1};
  const BenchReport r = RunBench(sizes, FilterConfig{}, 3, threads);
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_LE(r.rows[0].wall_time_per_sample, 50.0);
}

}  // namespace
}  // namespace gradspec
