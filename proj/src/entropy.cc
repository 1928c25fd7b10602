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

#include "gradspec/entropy.h"

#include <algorithm>
#include <cmath>

namespace gradspec {

void FilterConfig::Validate() const {
  if (k < 2) throw Error("config: k must be >= 2");
  if (subsample_divisor < 1) throw Error("config: subsample divisor must be >= 1");
  if (!(eps > 0.0)) throw Error("config: eps must be > 0");
  if (!(fallback_tau > 0.0 && fallback_tau < 1.0)) {
    throw Error("config: fallback tau must lie in (0, 1)");
  }
  if (kde_grid_size < 3) throw Error("config: kde grid needs >= 3 points");
  if (!(peak_prominence_fraction >= 0.0 && peak_prominence_fraction <= 1.0)) {
    throw Error("config: prominence fraction must lie in [0, 1]");
  }
  if (min_samples_for_kde < 2) throw Error("config: min samples for kde must be >= 2");
}

std::vector<double> NormalizeSpectrum(std::span<const double> sigma, double eps) {
  if (sigma.empty()) throw Error("empty spectrum");
  std::vector<double> p(sigma.size());
  double total = 0.0;
  for (size_t j = 0; j < sigma.size(); ++j) {
    p[j] = std::max(sigma[j], eps);
    total += p[j];
  }
  for (double &v : p) v /= total;
  return p;
}

double SpectralEntropy(std::span<const double> p) {
  double h = 0.0;
  for (double v : p) {
    if (!(v > 0.0)) throw Error("probability entries must be > 0");
    h -= v * std::log(v);
  }
  return std::max(h, 0.0);
}

double NormalizedEntropy(double h, int k) {
  if (k < 2) throw Error("k = " + std::to_string(k) + ": normalized entropy undefined");
  constexpr double kSlack = 1e-9;
  const double value = h / std::log(static_cast<double>(k));
  if (value < -kSlack || value > 1.0 + kSlack) {
    throw Error("entropy " + std::to_string(h) + " outside [0, ln k]");
  }
  return std::clamp(value, 0.0, 1.0);
}

EntropyScore ScoreSpectrum(const SingularSpectrum &spectrum, double eps) {
  EntropyScore score;
  score.k_requested = spectrum.k_requested;
  score.k_effective = spectrum.k_effective;
  score.degenerate = std::all_of(spectrum.sigma.begin(), spectrum.sigma.end(),
                                 [eps](double s) { return s < eps; });
  score.p = NormalizeSpectrum(spectrum.sigma, eps);
  score.raw_entropy = SpectralEntropy(score.p);
  score.normalized_entropy = NormalizedEntropy(score.raw_entropy, spectrum.k_effective);
  return score;
}

EntropyScore ScoreSample(const GradientRecord &record, const FilterConfig &config) {
  const Eigen::MatrixXd block = SubsampleRecord(record, config.subsample_divisor);
  const SingularSpectrum spectrum = TruncatedSvd(block, config.k, config.seed);
  EntropyScore score = ScoreSpectrum(spectrum, config.eps);
  score.sample_id = record.sample_id;
  return score;
}

}  // namespace gradspec
