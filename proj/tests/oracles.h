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

// Reference computations for tests. Each one is written the slow, obvious way
// and shares no code with the library path it checks.

#ifndef GRADSPEC_TESTS_ORACLES_H_
#define GRADSPEC_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Core>

namespace gradspec::oracle {

// Direct entropy in long double: p_j = max(s_j, eps) / sum, H = -sum p ln p,
// divided by ln(len).
inline long double NormalizedEntropy(const std::vector<double> &sigma, double eps = 1e-12) {
  long double total = 0.0L;
  for (double s : sigma) total += std::max<long double>(s, eps);
  long double h = 0.0L;
  for (double s : sigma) {
    const long double p = std::max<long double>(s, eps) / total;
    h -= p * std::log(p);
  }
  return h / std::log(static_cast<long double>(sigma.size()));
}

// Two-pass sample standard deviation.
inline double SampleStdDev(const std::vector<double> &x) {
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

inline double Silverman(const std::vector<double> &x) {
  return 1.06 * SampleStdDev(x) * std::pow(static_cast<double>(x.size()), -0.2);
}

// Naive O(N * grid) Gaussian KDE.
inline double KdeAt(const std::vector<double> &scores, double h, double x) {
  double sum = 0.0;
  for (double s : scores) {
    const double u = (x - s) / h;
    sum += std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
  }
  return sum / (static_cast<double>(scores.size()) * h);
}

inline std::vector<double> Kde(const std::vector<double> &scores, double h,
                               const std::vector<double> &grid) {
  std::vector<double> out;
  for (double x : grid) out.push_back(KdeAt(scores, h, x));
  return out;
}

// argmin of the naive KDE on a grid `factor` times finer than an n-point
// [0, 1] grid, restricted to [lo, hi].
inline double FineArgmin(const std::vector<double> &scores, double h, double lo,
                         double hi, int n, int factor = 10) {
  const int fine = (n - 1) * factor + 1;
  double best_x = lo, best = INFINITY;
  for (int i = 0; i < fine; ++i) {
    const double x = static_cast<double>(i) / (fine - 1);
    if (x < lo || x > hi) continue;
    const double d = KdeAt(scores, h, x);
    if (d < best) {
      best = d;
      best_x = x;
    }
  }
  return best_x;
}

inline double FrobeniusSquared(const Eigen::MatrixXd &m) {
  long double s = 0.0L;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) s += static_cast<long double>(m(i, j)) * m(i, j);
  }
  return static_cast<double>(s);
}

inline Eigen::MatrixXd Gaussian(Eigen::Index rows, Eigen::Index cols, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
  }
  return m;
}

// Orthonormal matrix by classical Gram-Schmidt (run twice) on Gaussian columns.
inline Eigen::MatrixXd RandomRotation(Eigen::Index n, unsigned seed) {
  Eigen::MatrixXd q = Gaussian(n, n, seed);
  for (int pass = 0; pass < 2; ++pass) {
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < j; ++i) q.col(j) -= q.col(i).dot(q.col(j)) * q.col(i);
      q.col(j).normalize();
    }
  }
  return q;
}

}  // namespace gradspec::oracle

#endif  // GRADSPEC_TESTS_ORACLES_H_
