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

#include "gradspec/report_io.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace gradspec {
namespace {

using nlohmann::json;

json OptionalNumber(const std::optional<double> &v) {
  return v ? json(*v) : json(nullptr);
}

// Shortest text that round-trips the double.
std::string Num(double v) { return fmt::format("{}", v); }

TruthLabel ParseLabel(const std::string &s) {
  if (s == "clean") return TruthLabel::kClean;
  if (s == "poisoned") return TruthLabel::kPoisoned;
  if (s == "unknown") return TruthLabel::kUnknown;
  throw Error("malformed report: bad label '" + s + "'");
}

}  // namespace

json ConfigToJson(const FilterConfig &c) {
  return {{"k", c.k},
          {"subsample_divisor", c.subsample_divisor},
          {"eps", c.eps},
          {"fallback_tau", c.fallback_tau},
          {"kde_grid_size", c.kde_grid_size},
          {"peak_prominence_fraction", c.peak_prominence_fraction},
          {"min_samples_for_kde", c.min_samples_for_kde},
          {"seed", c.seed}};
}

json ReportToJson(const FilterReport &report) {
  const ThresholdResult &t = report.threshold;
  json threshold = {
      {"tau", t.tau},
      {"mode", std::string(ModeName(t.mode))},
      {"peak_low", OptionalNumber(t.peak_low)},
      {"peak_high", OptionalNumber(t.peak_high)},
      {"bandwidth", t.model ? json(t.model->bandwidth) : json(nullptr)}};

  json entries = json::array();
  for (const auto &e : report.entries) {
    json entry = {{"id", e.sample_id},
                  {"entropy", e.normalized_entropy},
                  {"decision", std::string(DecisionName(e.decision))},
                  {"degenerate", e.degenerate}};
    if (e.truth_label != TruthLabel::kUnknown) {
      entry["label"] = std::string(LabelName(e.truth_label));
    }
    entries.push_back(std::move(entry));
  }

  json out = {{"config", ConfigToJson(report.config)},
              {"threshold", std::move(threshold)},
              {"entries", std::move(entries)}};
  if (report.metrics) {
    const Metrics &m = *report.metrics;
    out["metrics"] = {{"true_positive", m.true_positive},
                      {"false_positive", m.false_positive},
                      {"true_negative", m.true_negative},
                      {"false_negative", m.false_negative},
                      {"recall", m.recall},
                      {"precision", m.precision},
                      {"f1", m.f1},
                      {"clean_retention", m.clean_retention}};
  }
  return out;
}

json ScoresToJson(const std::vector<SampleScore> &scores) {
  json arr = json::array();
  for (const auto &s : scores) {
    json e = {{"id", s.sample_id},
              {"entropy", s.normalized_entropy},
              {"raw_entropy", s.raw_entropy},
              {"k_effective", s.k_effective},
              {"degenerate", s.degenerate}};
    if (s.truth_label != TruthLabel::kUnknown) {
      e["label"] = std::string(LabelName(s.truth_label));
    }
    arr.push_back(std::move(e));
  }
  return {{"scores", std::move(arr)}};
}

std::string ScoresToCsv(const std::vector<SampleScore> &scores) {
  std::string out = "id,entropy,raw_entropy,k_effective,degenerate\n";
  for (const auto &s : scores) {
    out += fmt::format("{},{},{},{},{}\n", s.sample_id, Num(s.normalized_entropy),
                       Num(s.raw_entropy), s.k_effective, s.degenerate ? 1 : 0);
  }
  return out;
}

std::string EntriesToCsv(const FilterReport &report) {
  std::string out = "id,entropy,decision\n";
  for (const auto &e : report.entries) {
    out += fmt::format("{},{},{}\n", e.sample_id, Num(e.normalized_entropy),
                       DecisionName(e.decision));
  }
  return out;
}

ReportSummary ParseReport(const json &report) {
  ReportSummary summary;
  try {
    const json &entries = report.at("entries");
    if (!entries.is_array()) throw Error("malformed report: entries is not an array");
    const json &tau = report.at("threshold").at("tau");
    if (!tau.is_null()) summary.tau = tau.get<double>();
    for (const json &e : entries) {
      ReportEntry entry;
      entry.sample_id = e.at("id").get<std::string>();
      entry.normalized_entropy = e.at("entropy").get<double>();
      const auto decision = e.at("decision").get<std::string>();
      if (decision == "poisoned") {
        entry.decision = Decision::kPoisoned;
      } else if (decision == "clean") {
        entry.decision = Decision::kClean;
      } else {
        throw Error("malformed report: bad decision '" + decision + "'");
      }
      entry.degenerate = e.value("degenerate", false);
      if (e.contains("label")) entry.truth_label = ParseLabel(e.at("label").get<std::string>());
      summary.entries.push_back(std::move(entry));
    }
  } catch (const json::exception &e) {
    throw Error(std::string("malformed report: ") + e.what());
  }
  return summary;
}

Histogram BuildHistogram(const ReportSummary &summary, int bins) {
  if (bins < 1) throw Error("histogram needs at least one bin");
  Histogram h;
  h.tau = summary.tau;
  bool any_labeled = false;
  bool any_unlabeled = false;
  for (const auto &e : summary.entries) {
    (e.truth_label == TruthLabel::kUnknown ? any_unlabeled : any_labeled) = true;
  }
  h.labeled = any_labeled;
  h.mixed = any_labeled && any_unlabeled;
  if (summary.entries.empty()) return h;

  h.bins.resize(static_cast<size_t>(bins));
  for (int b = 0; b < bins; ++b) {
    h.bins[b].lo = static_cast<double>(b) / bins;
    h.bins[b].hi = static_cast<double>(b + 1) / bins;
  }
  for (const auto &e : summary.entries) {
    const double x = std::clamp(e.normalized_entropy, 0.0, 1.0);
    const int b = std::min(static_cast<int>(x * bins), bins - 1);
    HistogramBin &bin = h.bins[b];
    switch (e.truth_label) {
      case TruthLabel::kPoisoned:
        ++bin.poisoned;
        break;
      case TruthLabel::kUnknown:
        ++(h.labeled ? bin.unlabeled : bin.clean);
        break;
      case TruthLabel::kClean:
        ++bin.clean;
        break;
    }
  }
  return h;
}

std::string HistogramToCsv(const Histogram &h) {
  std::string out;
  if (!h.labeled) {
    out = "bin_lo,bin_hi,count\n";
  } else if (h.mixed) {
    out = "bin_lo,bin_hi,clean_count,poison_count,unlabeled_count\n";
  } else {
    out = "bin_lo,bin_hi,clean_count,poison_count\n";
  }
  for (const auto &b : h.bins) {
    if (!h.labeled) {
      out += fmt::format("{},{},{}\n", Num(b.lo), Num(b.hi), b.clean);
    } else if (h.mixed) {
      out += fmt::format("{},{},{},{},{}\n", Num(b.lo), Num(b.hi), b.clean,
                         b.poisoned, b.unlabeled);
    } else {
      out += fmt::format("{},{},{},{}\n", Num(b.lo), Num(b.hi), b.clean, b.poisoned);
    }
  }
  if (!h.bins.empty() && h.tau) out += fmt::format("# tau={}\n", Num(*h.tau));
  return out;
}

void WriteTextFile(const std::string &path, const std::string &contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << contents;
  out.close();
  if (!out) throw Error("write failed for '" + path + "'");
}

std::string ReadTextFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace gradspec
