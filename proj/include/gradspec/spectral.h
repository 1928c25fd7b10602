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

#ifndef GRADSPEC_SPECTRAL_H_
#define GRADSPEC_SPECTRAL_H_

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "gradspec/gradient_store.h"

namespace gradspec {

// Leading singular values of a matrix, non-increasing.
struct SingularSpectrum {
  std::vector<double> sigma;
  int k_requested = 0;
  int k_effective = 0;  // min(k_requested, min(rows, cols))
};

// Leading-block subsampling: keeps G[:rows/divisor, :cols/divisor] (floor).
// Throws "dimension would be 0" when either kept dimension is empty.
Eigen::MatrixXd Subsample(const Eigen::Ref<const Eigen::MatrixXd> &matrix,
                          int divisor = 8);

// Same slice taken directly from a stored record, widened to double. Only the
// kept block is touched.
Eigen::MatrixXd SubsampleRecord(const GradientRecord &record, int divisor = 8);

struct TruncatedSvdOptions {
  int oversampling = 8;
  // At least this many power iterations are always run; more are added until
  // the top-k estimates settle, up to max_power_iterations.
  int min_power_iterations = 2;
  int max_power_iterations = 100;
  double rtol = 1e-9;
};

// Randomized range-finder SVD (Gaussian sketch, subspace iteration with
// re-orthonormalisation) returning the top min(k, min(m, n)) singular values.
// Deterministic for a fixed seed.
SingularSpectrum TruncatedSvd(const Eigen::Ref<const Eigen::MatrixXd> &matrix,
                              int k, std::uint64_t seed,
                              const TruncatedSvdOptions &options = {});

// All min(m, n) singular values from a dense bidiagonal divide-and-conquer
// SVD. Intended as a test oracle and for small inputs; refuses matrices with
// min(m, n) > kDenseOracleLimit.
inline constexpr Eigen::Index kDenseOracleLimit = 2048;
SingularSpectrum DenseSvdOracle(const Eigen::Ref<const Eigen::MatrixXd> &matrix);

// One-sided (Hestenes) Jacobi singular values of a small matrix, sorted
// non-increasing. Used on the projected sketch inside TruncatedSvd.
std::vector<double> JacobiSingularValues(Eigen::MatrixXd matrix);

}  // namespace gradspec

#endif  // GRADSPEC_SPECTRAL_H_
