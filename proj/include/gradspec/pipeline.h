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

// End-to-end filtering: score every record, pick a threshold from the score
// distribution, classify, and (when ground truth exists) count hits.

#ifndef GRADSPEC_PIPELINE_H_
#define GRADSPEC_PIPELINE_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gradspec/entropy.h"
#include "gradspec/filter_config.h"
#include "gradspec/gradient_store.h"
#include "gradspec/thresholding.h"

namespace gradspec {

enum class Decision { kClean, kPoisoned };

std::string_view DecisionName(Decision decision);

// Poisoned iff score > tau; a score equal to tau is kept as clean.
Decision Classify(double score, double tau);

// What the pipeline keeps per sample once the spectrum is reduced to a score.
struct SampleScore {
  std::string sample_id;
  TruthLabel truth_label = TruthLabel::kUnknown;
  double normalized_entropy = 0.0;
  double raw_entropy = 0.0;
  int k_effective = 0;
  bool degenerate = false;
};

struct ReportEntry {
  std::string sample_id;
  double normalized_entropy = 0.0;
  Decision decision = Decision::kClean;
  bool degenerate = false;
  TruthLabel truth_label = TruthLabel::kUnknown;
};

// Confusion counts over labeled records; the positive class is "poisoned".
// Vacuous ratios are 1.0: recall with no poisoned records, precision with
// nothing flagged, clean_retention with no clean records.
struct Metrics {
  long true_positive = 0;
  long false_positive = 0;
  long true_negative = 0;
  long false_negative = 0;
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
  double clean_retention = 0.0;  // TN / (TN + FP)
};

// Entries with an unknown label are skipped. Throws "no labeled records".
Metrics ComputeMetrics(std::span<const Decision> decisions,
                       std::span<const TruthLabel> labels);
Metrics ComputeMetrics(std::span<const ReportEntry> entries);

struct FilterReport {
  FilterConfig config;
  ThresholdResult threshold;
  std::vector<ReportEntry> entries;  // input order
  std::optional<Metrics> metrics;    // present iff any record is labeled

  size_t poisoned_count() const;
};

// Scores records with up to `threads` workers. Output order matches input.
// The first failing record (lowest index) aborts with its sample_id.
std::vector<SampleScore> ScoreAll(std::span<const GradientRecord> records,
                                  const FilterConfig &config, int threads = 1);

// Scores a GSG1 file one record at a time; only the scores are retained.
std::vector<SampleScore> ScoreFile(const std::string &path, const FilterConfig &config);

// Threshold selection, classification and metrics over finished scores.
FilterReport Decide(std::vector<SampleScore> scores, const FilterConfig &config);

FilterReport RunFilter(const GradientDataset &dataset, const FilterConfig &config,
                       int threads = 1);

}  // namespace gradspec

#endif  // GRADSPEC_PIPELINE_H_
