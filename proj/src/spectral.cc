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

#include "gradspec/spectral.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include <Eigen/QR>
#include <Eigen/SVD>

namespace gradspec {
namespace {

void RequireFinite(const Eigen::Ref<const Eigen::MatrixXd> &m) {
  if (!m.allFinite()) throw Error("non-finite input");
}

// Orthonormal basis for the column space of y (thin Q of a Householder QR).
Eigen::MatrixXd Orthonormalize(const Eigen::MatrixXd &y) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
  return qr.householderQ() * Eigen::MatrixXd::Identity(y.rows(), y.cols());
}

}  // namespace

Eigen::MatrixXd Subsample(const Eigen::Ref<const Eigen::MatrixXd> &matrix,
                          int divisor) {
  if (divisor < 1) throw Error("subsample divisor must be positive");
  const Eigen::Index rows = matrix.rows() / divisor;
  const Eigen::Index cols = matrix.cols() / divisor;
  if (rows < 1 || cols < 1) {
    throw Error("dimension would be 0: " + std::to_string(matrix.rows()) + "x" +
                std::to_string(matrix.cols()) + " / " + std::to_string(divisor));
  }
  return matrix.topLeftCorner(rows, cols);
}

Eigen::MatrixXd SubsampleRecord(const GradientRecord &record, int divisor) {
  if (divisor < 1) throw Error("subsample divisor must be positive");
  const Eigen::Index rows = record.rows / divisor;
  const Eigen::Index cols = record.cols / divisor;
  if (rows < 1 || cols < 1) {
    throw Error("dimension would be 0: " + std::to_string(record.rows) + "x" +
                std::to_string(record.cols) + " / " + std::to_string(divisor));
  }
  return record.matrix().topLeftCorner(rows, cols).cast<double>();
}

std::vector<double> JacobiSingularValues(Eigen::MatrixXd a) {
  const Eigen::Index n = a.cols();
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  constexpr int kMaxSweeps = 60;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double alpha = a.col(i).squaredNorm();
        const double beta = a.col(j).squaredNorm();
        const double gamma = a.col(i).dot(a.col(j));
        if (alpha == 0.0 || beta == 0.0) continue;
        if (std::abs(gamma) <= kEps * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        const Eigen::VectorXd ci = a.col(i);
        a.col(i) = c * ci - s * a.col(j);
        a.col(j) = s * ci + c * a.col(j);
      }
    }
    if (!rotated) break;
  }
  std::vector<double> sigma(static_cast<size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) sigma[i] = a.col(i).norm();
  std::sort(sigma.begin(), sigma.end(), std::greater<>());
  return sigma;
}

SingularSpectrum TruncatedSvd(const Eigen::Ref<const Eigen::MatrixXd> &matrix,
                              int k, std::uint64_t seed,
                              const TruncatedSvdOptions &options) {
  if (k < 1) throw Error("k must be >= 1");
  if (matrix.size() == 0) throw Error("empty matrix");
  RequireFinite(matrix);

  const Eigen::Index min_dim = std::min(matrix.rows(), matrix.cols());
  const Eigen::Index k_eff = std::min<Eigen::Index>(k, min_dim);
  const Eigen::Index sketch =
      std::min<Eigen::Index>(k_eff + std::max(options.oversampling, 0), min_dim);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd omega(matrix.cols(), sketch);
  for (Eigen::Index j = 0; j < omega.cols(); ++j) {
    for (Eigen::Index i = 0; i < omega.rows(); ++i) omega(i, j) = normal(rng);
  }

  // Singular values of the projection Q^T A, computed on its transpose so the
  // Jacobi sweep runs over `sketch` columns.
  auto project = [&](const Eigen::MatrixXd &q) {
    const Eigen::MatrixXd bt = matrix.transpose() * q;
    std::vector<double> s = JacobiSingularValues(bt);
    s.resize(static_cast<size_t>(k_eff));
    return s;
  };

  Eigen::MatrixXd q = Orthonormalize(matrix * omega);
  std::vector<double> estimate = project(q);
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  for (int it = 1; it <= options.max_power_iterations; ++it) {
    const Eigen::MatrixXd z = Orthonormalize(matrix.transpose() * q);
    q = Orthonormalize(matrix * z);
    std::vector<double> next = project(q);
    bool settled = true;
    const double floor = 64.0 * kEps * next.front();
    for (size_t j = 0; j < next.size(); ++j) {
      if (std::abs(next[j] - estimate[j]) > options.rtol * next[j] + floor) {
        settled = false;
        break;
      }
    }
    estimate = std::move(next);
    if (it >= options.min_power_iterations && settled) break;
  }

  SingularSpectrum out;
  out.sigma = std::move(estimate);
  out.k_requested = k;
  out.k_effective = static_cast<int>(k_eff);
  return out;
}

SingularSpectrum DenseSvdOracle(const Eigen::Ref<const Eigen::MatrixXd> &matrix) {
  if (matrix.size() == 0) throw Error("empty matrix");
  const Eigen::Index min_dim = std::min(matrix.rows(), matrix.cols());
  if (min_dim > kDenseOracleLimit) {
    throw Error("guardrail exceeded: min dimension " + std::to_string(min_dim) +
                " > " + std::to_string(kDenseOracleLimit));
  }
  RequireFinite(matrix);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(matrix);
  SingularSpectrum out;
  const Eigen::VectorXd &s = svd.singularValues();
  out.sigma.assign(s.data(), s.data() + s.size());
  std::sort(out.sigma.begin(), out.sigma.end(), std::greater<>());
  out.k_requested = static_cast<int>(min_dim);
  out.k_effective = static_cast<int>(min_dim);
  return out;
}

}  // namespace gradspec
