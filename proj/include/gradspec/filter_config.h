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

#ifndef GRADSPEC_FILTER_CONFIG_H_
#define GRADSPEC_FILTER_CONFIG_H_

#include <cstdint>

namespace gradspec {

// Knobs for scoring and thresholding. Defaults are the reference setting:
// rank 16, 1/8 leading-block subsampling, eps 1e-12, fallback threshold 0.7.
struct FilterConfig {
  int k = 16;
  int subsample_divisor = 8;
  double eps = 1e-12;
  double fallback_tau = 0.7;
  int kde_grid_size = 1024;
  double peak_prominence_fraction = 0.05;
  int min_samples_for_kde = 20;
  std::uint64_t seed = 0;

  // Throws Error listing the first violated constraint.
  void Validate() const;
};

}  // namespace gradspec

#endif  // GRADSPEC_FILTER_CONFIG_H_
