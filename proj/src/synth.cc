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

#include "gradspec/synth.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/QR>
#include <fmt/format.h>

namespace gradspec {
namespace {

Eigen::MatrixXd RandomOrthonormal(Eigen::Index rows, Eigen::Index cols,
                                  std::mt19937_64 &rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) g(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  return qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
}

}  // namespace

std::uint64_t MixSeed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

SpectrumProfile SpectrumProfile::Geometric(double ratio, double jitter_scale, int length) {
  SpectrumProfile p;
  p.name = fmt::format("geometric-r{}", ratio);
  p.rule = SpectrumRule::kGeometric;
  p.ratio = ratio;
  p.jitter_scale = jitter_scale;
  p.length = length;
  return p;
}

SpectrumProfile SpectrumProfile::Flat(double jitter_scale, int length) {
  SpectrumProfile p;
  p.name = "flat";
  p.rule = SpectrumRule::kFlat;
  p.ratio = 1.0;
  p.jitter_scale = jitter_scale;
  p.length = length;
  return p;
}

void SpectrumProfile::Validate() const {
  if (length < 1) throw Error("profile '" + name + "': length must be >= 1");
  if (!(sigma0 > 0.0)) throw Error("profile '" + name + "': sigma0 must be > 0");
  if (rule == SpectrumRule::kGeometric && !(ratio > 0.0 && ratio <= 1.0)) {
    throw Error("profile '" + name + "': ratio must lie in (0, 1]");
  }
  if (!(jitter_scale >= 0.0 && jitter_scale < 1.0)) {
    throw Error("profile '" + name + "': jitter must lie in [0, 1)");
  }
}

std::vector<double> SpectrumProfile::Generate(std::uint64_t seed) const {
  Validate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-jitter_scale, jitter_scale);
  std::vector<double> sigma(static_cast<size_t>(length));
  double base = sigma0;
  for (auto &s : sigma) {
    const double u = jitter_scale > 0.0 ? jitter(rng) : 0.0;
    s = base * (1.0 + u);
    if (rule == SpectrumRule::kGeometric) base *= ratio;
  }
  std::sort(sigma.begin(), sigma.end(), std::greater<>());
  return sigma;
}

SpectrumProfile DefaultCleanProfile() { return SpectrumProfile::Geometric(0.45, 0.05); }

SpectrumProfile DefaultPoisonProfile() { return SpectrumProfile::Flat(0.02); }

Eigen::MatrixXd MakeMatrixWithSpectrum(int m, int n, std::span<const double> sigma,
                                       std::uint64_t seed) {
  if (m < 1 || n < 1) throw Error("matrix dimensions must be positive");
  const auto len = static_cast<Eigen::Index>(sigma.size());
  if (len == 0) throw Error("empty spectrum");
  if (len > std::min(m, n)) {
    throw Error(fmt::format("profile longer than min(m, n): {} > {}", len, std::min(m, n)));
  }
  for (double s : sigma) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw Error("singular values must be finite and >= 0");
  }
  std::mt19937_64 rng(seed);
  const Eigen::MatrixXd u = RandomOrthonormal(m, len, rng);
  const Eigen::MatrixXd v = RandomOrthonormal(n, len, rng);
  const Eigen::Map<const Eigen::VectorXd> s(sigma.data(), len);
  return u * s.asDiagonal() * v.transpose();
}

Eigen::MatrixXd MakeMatrixWithSpectrum(int m, int n, const SpectrumProfile &profile,
                                       std::uint64_t seed) {
  const std::vector<double> sigma = profile.Generate(MixSeed(seed, 0));
  return MakeMatrixWithSpectrum(m, n, sigma, MixSeed(seed, 1));
}

GradientDataset GenerateEnsemble(const EnsembleSpec &spec) {
  if (spec.n_clean < 0 || spec.n_poison < 0) throw Error("negative ensemble size");
  const int total = spec.n_clean + spec.n_poison;
  if (total == 0) throw Error("empty ensemble");
  if (spec.subsample_divisor < 1) throw Error("subsample divisor must be >= 1");
  const int block_rows = spec.rows / spec.subsample_divisor;
  const int block_cols = spec.cols / spec.subsample_divisor;
  const int block_min = std::min(block_rows, block_cols);
  for (const SpectrumProfile *p : {&spec.clean_profile, &spec.poison_profile}) {
    p->Validate();
    if (p->length > block_min) {
      throw Error(fmt::format(
          "incompatible dims: {}x{} / {} leaves a {}x{} block, profile '{}' needs {}",
          spec.rows, spec.cols, spec.subsample_divisor, block_rows, block_cols,
          p->name, p->length));
    }
  }

  std::vector<int> order(static_cast<size_t>(total));
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 shuffle_rng(MixSeed(spec.seed, 0xC0FFEE));
  std::shuffle(order.begin(), order.end(), shuffle_rng);

  GradientDataset dataset;
  dataset.records.reserve(order.size());
  for (size_t pos = 0; pos < order.size(); ++pos) {
    const int index = order[pos];
    const bool poisoned = index >= spec.n_clean;
    const SpectrumProfile &profile = poisoned ? spec.poison_profile : spec.clean_profile;
    const Eigen::MatrixXd block = MakeMatrixWithSpectrum(
        block_rows, block_cols, profile, MixSeed(spec.seed, static_cast<std::uint64_t>(index)));

    GradientRecord r;
    r.sample_id = fmt::format("syn-{:06d}", pos);
    r.truth_label = poisoned ? TruthLabel::kPoisoned : TruthLabel::kClean;
    r.rows = static_cast<std::uint32_t>(spec.rows);
    r.cols = static_cast<std::uint32_t>(spec.cols);
    r.values.assign(static_cast<size_t>(spec.rows) * spec.cols, 0.0f);
    for (int i = 0; i < block_rows; ++i) {
      for (int j = 0; j < block_cols; ++j) {
        r.values[static_cast<size_t>(i) * spec.cols + j] = static_cast<float>(block(i, j));
      }
    }
    dataset.records.push_back(std::move(r));
  }
  return dataset;
}

}  // namespace gradspec
