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

#ifndef GRADSPEC_ENTROPY_H_
#define GRADSPEC_ENTROPY_H_

#include <span>
#include <string>
#include <vector>

#include "gradspec/filter_config.h"
#include "gradspec/gradient_store.h"
#include "gradspec/spectral.h"

namespace gradspec {

struct EntropyScore {
  std::string sample_id;
  std::vector<double> p;
  double raw_entropy = 0.0;         // nats
  double normalized_entropy = 0.0;  // raw / ln(k_effective), in [0, 1]
  int k_requested = 0;
  int k_effective = 0;
  bool degenerate = false;  // every singular value was below eps
};

// p_j = max(sigma_j, eps) / sum_l max(sigma_l, eps).
std::vector<double> NormalizeSpectrum(std::span<const double> sigma,
                                      double eps = 1e-12);

// Shannon entropy in nats. Entries must be strictly positive.
double SpectralEntropy(std::span<const double> p);

// H / ln k. Values within 1e-9 of the [0, 1] range are clamped; k < 2 throws.
double NormalizedEntropy(double h, int k);

// Entropy score of an already computed spectrum. Normalisation uses the
// spectrum's k_effective, not the requested rank.
EntropyScore ScoreSpectrum(const SingularSpectrum &spectrum, double eps);

// subsample -> truncated SVD -> normalise -> entropy, all in double.
EntropyScore ScoreSample(const GradientRecord &record, const FilterConfig &config);

}  // namespace gradspec

#endif  // GRADSPEC_ENTROPY_H_
