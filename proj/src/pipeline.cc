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

#include "gradspec/pipeline.h"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <thread>

namespace gradspec {
namespace {

SampleScore Reduce(const GradientRecord &record, const FilterConfig &config) {
  try {
    const EntropyScore s = ScoreSample(record, config);
    return {record.sample_id, record.truth_label, s.normalized_entropy,
            s.raw_entropy, s.k_effective, s.degenerate};
  } catch (const Error &e) {
    throw Error("sample '" + record.sample_id + "': " + e.what());
  }
}

double Ratio(long num, long den) {
  return den == 0 ? 1.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::string_view DecisionName(Decision decision) {
  return decision == Decision::kPoisoned ? "poisoned" : "clean";
}

Decision Classify(double score, double tau) {
  return score > tau ? Decision::kPoisoned : Decision::kClean;
}

Metrics ComputeMetrics(std::span<const Decision> decisions,
                       std::span<const TruthLabel> labels) {
  if (decisions.size() != labels.size()) {
    throw Error("decisions and labels differ in length");
  }
  Metrics m;
  bool any = false;
  for (size_t i = 0; i < decisions.size(); ++i) {
    if (labels[i] == TruthLabel::kUnknown) continue;
    any = true;
    const bool flagged = decisions[i] == Decision::kPoisoned;
    if (labels[i] == TruthLabel::kPoisoned) {
      ++(flagged ? m.true_positive : m.false_negative);
    } else {
      ++(flagged ? m.false_positive : m.true_negative);
    }
  }
  if (!any) throw Error("no labeled records");
  m.recall = Ratio(m.true_positive, m.true_positive + m.false_negative);
  m.precision = Ratio(m.true_positive, m.true_positive + m.false_positive);
  m.f1 = m.precision + m.recall > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  m.clean_retention = Ratio(m.true_negative, m.true_negative + m.false_positive);
  return m;
}

Metrics ComputeMetrics(std::span<const ReportEntry> entries) {
  std::vector<Decision> decisions;
  std::vector<TruthLabel> labels;
  for (const auto &e : entries) {
    decisions.push_back(e.decision);
    labels.push_back(e.truth_label);
  }
  return ComputeMetrics(decisions, labels);
}

size_t FilterReport::poisoned_count() const {
  return static_cast<size_t>(std::count_if(
      entries.begin(), entries.end(),
      [](const ReportEntry &e) { return e.decision == Decision::kPoisoned; }));
}

std::vector<SampleScore> ScoreAll(std::span<const GradientRecord> records,
                                  const FilterConfig &config, int threads) {
  config.Validate();
  std::vector<SampleScore> out(records.size());
  const size_t workers =
      std::clamp<size_t>(threads < 1 ? 1 : static_cast<size_t>(threads), 1,
                         std::max<size_t>(records.size(), 1));
  if (workers == 1) {
    for (size_t i = 0; i < records.size(); ++i) out[i] = Reduce(records[i], config);
    return out;
  }

  std::atomic<size_t> next{0};
  // Lowest failing index wins so the reported error does not depend on
  // scheduling. Workers stop claiming work past a known failure.
  std::atomic<size_t> first_failure{records.size()};
  std::mutex mu;
  std::string failure_message;
  {
    std::vector<std::jthread> pool;
    for (size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const size_t i = next.fetch_add(1);
          if (i >= records.size() || i > first_failure.load()) return;
          try {
            out[i] = Reduce(records[i], config);
          } catch (const Error &e) {
            std::lock_guard<std::mutex> lock(mu);
            if (i < first_failure.load()) {
              first_failure.store(i);
              failure_message = e.what();
            }
          }
        }
      });
    }
  }
  if (first_failure.load() < records.size()) throw Error(failure_message);
  return out;
}

std::vector<SampleScore> ScoreFile(const std::string &path, const FilterConfig &config) {
  config.Validate();
  DatasetReader reader(path);
  std::vector<SampleScore> out;
  out.reserve(static_cast<size_t>(std::min<std::uint64_t>(reader.record_count(), 1 << 20)));
  GradientRecord record;
  while (reader.Next(&record)) out.push_back(Reduce(record, config));
  return out;
}

FilterReport Decide(std::vector<SampleScore> scores, const FilterConfig &config) {
  config.Validate();
  if (scores.empty()) throw Error("empty dataset");
  std::vector<double> values;
  values.reserve(scores.size());
  for (const auto &s : scores) values.push_back(s.normalized_entropy);

  FilterReport report;
  report.config = config;
  report.threshold = SelectThreshold(values, config);
  report.entries.reserve(scores.size());
  bool labeled = false;
  for (auto &s : scores) {
    labeled |= s.truth_label != TruthLabel::kUnknown;
    report.entries.push_back({std::move(s.sample_id), s.normalized_entropy,
                              Classify(s.normalized_entropy, report.threshold.tau),
                              s.degenerate, s.truth_label});
  }
  if (labeled) report.metrics = ComputeMetrics(report.entries);
  return report;
}

FilterReport RunFilter(const GradientDataset &dataset, const FilterConfig &config,
                       int threads) {
  if (dataset.records.empty()) throw Error("empty dataset");
  return Decide(ScoreAll(dataset.records, config, threads), config);
}

}  // namespace gradspec
