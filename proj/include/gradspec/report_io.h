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

// Report serialisation: the JSON filter report, per-sample CSVs and the
// label-split score histogram used for plotting.

#ifndef GRADSPEC_REPORT_IO_H_
#define GRADSPEC_REPORT_IO_H_

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "gradspec/pipeline.h"

namespace gradspec {

nlohmann::json ConfigToJson(const FilterConfig &config);
nlohmann::json ReportToJson(const FilterReport &report);

// Entropy scores before thresholding.
nlohmann::json ScoresToJson(const std::vector<SampleScore> &scores);
std::string ScoresToCsv(const std::vector<SampleScore> &scores);

// id,entropy,decision per line, with header.
std::string EntriesToCsv(const FilterReport &report);

// The subset of a JSON report needed downstream.
struct ReportSummary {
  std::optional<double> tau;  // absent for a report with no entries
  std::vector<ReportEntry> entries;
};

// Throws Error("malformed report: ...") on schema violations.
ReportSummary ParseReport(const nlohmann::json &report);

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  long clean = 0;      // labeled clean, or every entry when unlabeled
  long poisoned = 0;
  long unlabeled = 0;  // only when labeled and unlabeled entries are mixed
};

struct Histogram {
  bool labeled = false;
  bool mixed = false;
  std::vector<HistogramBin> bins;
  std::optional<double> tau;
};

// Uniform bins over [0, 1]; a score of exactly 1 lands in the last bin.
Histogram BuildHistogram(const ReportSummary &summary, int bins = 50);
std::string HistogramToCsv(const Histogram &histogram);

void WriteTextFile(const std::string &path, const std::string &contents);
std::string ReadTextFile(const std::string &path);

}  // namespace gradspec

#endif  // GRADSPEC_REPORT_IO_H_
