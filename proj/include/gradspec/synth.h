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

// Synthetic gradient matrices with prescribed singular spectra.
//
// A matrix is built as U * diag(sigma) * V^T with U, V orthonormal columns
// taken from QR of seeded Gaussian draws. Ensembles embed that matrix in the
// leading (rows/divisor) x (cols/divisor) block of a zero matrix so the
// pipeline's subsampling step keeps exactly the structured part.

#ifndef GRADSPEC_SYNTH_H_
#define GRADSPEC_SYNTH_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gradspec/gradient_store.h"

namespace gradspec {

enum class SpectrumRule {
  kGeometric,  // sigma_j = sigma0 * ratio^j * (1 + u_j)
  kFlat,       // sigma_j = sigma0 * (1 + u_j)
};

// u_j is drawn uniformly from [-jitter_scale, jitter_scale]; the jittered
// values are sorted non-increasing.
struct SpectrumProfile {
  std::string name;
  SpectrumRule rule = SpectrumRule::kGeometric;
  double sigma0 = 1.0;
  double ratio = 0.45;
  int length = 16;
  double jitter_scale = 0.0;

  static SpectrumProfile Geometric(double ratio, double jitter_scale, int length = 16);
  static SpectrumProfile Flat(double jitter_scale, int length = 16);

  void Validate() const;
  std::vector<double> Generate(std::uint64_t seed) const;
};

SpectrumProfile DefaultCleanProfile();   // geometric, ratio 0.45, 5% jitter
SpectrumProfile DefaultPoisonProfile();  // flat, 2% jitter

// m x n matrix whose non-zero singular values are exactly `sigma` (any order,
// non-negative). Throws when sigma is longer than min(m, n).
Eigen::MatrixXd MakeMatrixWithSpectrum(int m, int n, std::span<const double> sigma,
                                       std::uint64_t seed);
Eigen::MatrixXd MakeMatrixWithSpectrum(int m, int n, const SpectrumProfile &profile,
                                       std::uint64_t seed);

struct EnsembleSpec {
  int n_clean = 900;
  int n_poison = 100;
  SpectrumProfile clean_profile = DefaultCleanProfile();
  SpectrumProfile poison_profile = DefaultPoisonProfile();
  int rows = 128;
  int cols = 128;
  int subsample_divisor = 8;
  std::uint64_t seed = 0;
};

// Labeled, shuffled dataset. Identical specs give byte-identical output.
GradientDataset GenerateEnsemble(const EnsembleSpec &spec);

// splitmix64 finaliser, used to derive independent per-record seeds.
std::uint64_t MixSeed(std::uint64_t seed, std::uint64_t stream);

}  // namespace gradspec

#endif  // GRADSPEC_SYNTH_H_
