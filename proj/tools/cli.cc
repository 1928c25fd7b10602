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

#include "cli.h"

#include <algorithm>
#include <ostream>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "gradspec/bench.h"
#include "gradspec/gradient_store.h"
#include "gradspec/pipeline.h"
#include "gradspec/report_io.h"
#include "gradspec/synth.h"

namespace gradspec {
namespace {

bool EndsWith(const std::string &s, const std::string &suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void AddConfigFlags(CLI::App *cmd, FilterConfig *config, int *threads) {
  cmd->add_option("--k", config->k, "Truncated SVD rank")->capture_default_str();
  cmd->add_option("--subsample", config->subsample_divisor,
                  "Keep the leading rows/N x cols/N block")
      ->capture_default_str();
  cmd->add_option("--eps", config->eps, "Singular value floor")->capture_default_str();
  cmd->add_option("--fallback-tau", config->fallback_tau,
                  "Threshold used when no valley is found")
      ->capture_default_str();
  cmd->add_option("--grid", config->kde_grid_size, "KDE grid points over [0,1]")
      ->capture_default_str();
  cmd->add_option("--prominence", config->peak_prominence_fraction,
                  "Minimum peak height as a fraction of the density maximum")
      ->capture_default_str();
  cmd->add_option("--min-kde-n", config->min_samples_for_kde,
                  "Minimum sample count for KDE thresholding")
      ->capture_default_str();
  cmd->add_option("--seed", config->seed, "Seed for the randomized SVD")
      ->capture_default_str();
  cmd->add_option("--threads", *threads, "Scoring worker threads")->capture_default_str();
}

std::vector<SampleScore> Score(const std::string &input, const FilterConfig &config,
                               int threads) {
  if (threads > 1) return ScoreAll(ReadDataset(input).records, config, threads);
  return ScoreFile(input, config);
}

void WriteOrPrint(const std::string &path, const std::string &text, std::ostream &out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    WriteTextFile(path, text);
  }
}

std::string Summary(const FilterReport &report) {
  const ThresholdResult &t = report.threshold;
  std::string s;
  if (t.mode == ThresholdMode::kValley) {
    s += fmt::format("threshold: valley τ={} (peaks at {:.4f} and {:.4f}, h={:.4g})\n",
                     t.tau, *t.peak_low, *t.peak_high, t.model->bandwidth);
  } else {
    s += fmt::format("threshold: fallback τ={}\n", t.tau);
  }
  const size_t flagged = report.poisoned_count();
  s += fmt::format("samples: {} total, {} kept clean, {} flagged poisoned\n",
                   report.entries.size(), report.entries.size() - flagged, flagged);
  if (report.metrics) {
    const Metrics &m = *report.metrics;
    s += fmt::format("metrics: TP={} FP={} TN={} FN={} recall={:.3f} precision={:.3f} "
                     "f1={:.3f} clean_retention={:.3f}\n",
                     m.true_positive, m.false_positive, m.true_negative,
                     m.false_negative, m.recall, m.precision, m.f1, m.clean_retention);
  }
  return s;
}

void EmitClean(const std::string &input, const FilterReport &report,
               const std::string &path) {
  const size_t kept = report.entries.size() - report.poisoned_count();
  DatasetReader reader(input);
  DatasetWriter writer(path, kept);
  GradientRecord record;
  for (size_t i = 0; reader.Next(&record); ++i) {
    if (report.entries.at(i).decision == Decision::kClean) writer.Append(record);
  }
  writer.Finish();
}

std::vector<int> ParseIntList(const std::string &s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception &) {
      throw CLI::ValidationError("--sizes", "not an integer: '" + item + "'");
    }
  }
  return out;
}

}  // namespace

int RunCli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Spectral-entropy filter for per-sample gradient datasets", "gradspec"};
  app.require_subcommand(1);

  FilterConfig config;
  int threads = 1;
  std::string input, output, emit_clean, csv_path;

  CLI::App *score = app.add_subcommand("score", "Per-sample entropy scores, no thresholding");
  score->add_option("--input", input, "GSG1 dataset")->required();
  score->add_option("--output", output, "Scores file (.json or CSV); stdout if omitted");
  AddConfigFlags(score, &config, &threads);

  CLI::App *filter = app.add_subcommand("filter", "Score, threshold and classify");
  filter->add_option("--input", input, "GSG1 dataset")->required();
  filter->add_option("--output", output, "JSON report path")->required();
  filter->add_option("--emit-clean", emit_clean, "Write records kept as clean (GSG1)");
  filter->add_option("--csv", csv_path, "Per-sample id,entropy,decision CSV");
  AddConfigFlags(filter, &config, &threads);

  EnsembleSpec ens;
  double clean_ratio = ens.clean_profile.ratio;
  double clean_jitter = ens.clean_profile.jitter_scale;
  double poison_jitter = ens.poison_profile.jitter_scale;
  int profile_length = ens.clean_profile.length;
  CLI::App *synth = app.add_subcommand("synth", "Generate a labeled synthetic ensemble");
  synth->add_option("--output", output, "GSG1 output path")->required();
  synth->add_option("--n-clean", ens.n_clean)->capture_default_str();
  synth->add_option("--n-poison", ens.n_poison)->capture_default_str();
  synth->add_option("--rows", ens.rows)->capture_default_str();
  synth->add_option("--cols", ens.cols)->capture_default_str();
  synth->add_option("--subsample", ens.subsample_divisor)->capture_default_str();
  synth->add_option("--clean-ratio", clean_ratio, "Geometric decay of clean spectra")
      ->capture_default_str();
  synth->add_option("--clean-jitter", clean_jitter)->capture_default_str();
  synth->add_option("--poison-jitter", poison_jitter)->capture_default_str();
  synth->add_option("--profile-length", profile_length)->capture_default_str();
  synth->add_option("--seed", ens.seed)->capture_default_str();

  std::string sizes_arg = "100,200,400,800";
  int bench_rows = 256, bench_cols = 256, repetitions = 5;
  int bench_threads = 0;
  CLI::App *bench = app.add_subcommand("bench", "Time scoring and thresholding");
  bench->add_option("--sizes", sizes_arg, "Comma-separated sample counts")
      ->capture_default_str();
  bench->add_option("--rows", bench_rows)->capture_default_str();
  bench->add_option("--cols", bench_cols)->capture_default_str();
  bench->add_option("--repetitions", repetitions)->capture_default_str();
  bench->add_option("--threads", bench_threads,
                    "Thread count; default runs 1 and hardware concurrency");
  bench->add_option("--output", output, "JSON report path");
  bench->add_option("--k", config.k)->capture_default_str();
  bench->add_option("--subsample", config.subsample_divisor)->capture_default_str();
  bench->add_option("--seed", config.seed)->capture_default_str();

  int bins = 50;
  CLI::App *report = app.add_subcommand("report", "Histogram CSV from a JSON report");
  report->add_option("--input", input, "JSON report")->required();
  report->add_option("--output", output, "Histogram CSV; stdout if omitted");
  report->add_option("--bins", bins)->capture_default_str();

  std::vector<int> sizes;
  try {
    std::vector<std::string> rev(args.size() > 1 ? args.begin() + 1 : args.end(),
                                 args.end());
    std::reverse(rev.begin(), rev.end());
    app.parse(rev);
    if (bench->parsed()) {
      sizes = ParseIntList(sizes_arg);
      if (sizes.empty()) throw CLI::ValidationError("--sizes", "empty list");
    }
    if (report->parsed() && bins < 1) throw CLI::ValidationError("--bins", "must be >= 1");
    if (threads < 1) throw CLI::ValidationError("--threads", "must be >= 1");
    if (score->parsed() || filter->parsed() || bench->parsed()) config.Validate();
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError &e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error &e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (score->parsed()) {
      const std::vector<SampleScore> scores = Score(input, config, threads);
      const std::string text = EndsWith(output, ".json") ? ScoresToJson(scores).dump(2) + "\n"
                                                         : ScoresToCsv(scores);
      WriteOrPrint(output, text, out);
    } else if (filter->parsed()) {
      const FilterReport result = Decide(Score(input, config, threads), config);
      WriteTextFile(output, ReportToJson(result).dump(2) + "\n");
      if (!csv_path.empty()) WriteTextFile(csv_path, EntriesToCsv(result));
      if (!emit_clean.empty()) EmitClean(input, result, emit_clean);
      out << Summary(result);
    } else if (synth->parsed()) {
      ens.clean_profile = SpectrumProfile::Geometric(clean_ratio, clean_jitter, profile_length);
      ens.poison_profile = SpectrumProfile::Flat(poison_jitter, profile_length);
      const GradientDataset data = GenerateEnsemble(ens);
      WriteDataset(data, output);
      out << fmt::format("wrote {} records ({} clean, {} poisoned) to {}\n",
                         data.records.size(), ens.n_clean, ens.n_poison, output);
    } else if (bench->parsed()) {
      std::vector<BenchSize> bench_sizes;
      for (int n : sizes) bench_sizes.push_back({n, bench_rows, bench_cols});
      std::vector<int> thread_counts{1};
      if (bench_threads > 0) {
        thread_counts = {bench_threads};
      } else if (const int hw = static_cast<int>(std::thread::hardware_concurrency()); hw > 1) {
        thread_counts.push_back(hw);
      }
      const BenchReport result = RunBench(bench_sizes, config, repetitions, thread_counts);
      out << BenchToTable(result);
      if (!output.empty()) WriteTextFile(output, BenchToJson(result).dump(2) + "\n");
    } else if (report->parsed()) {
      nlohmann::json parsed;
      try {
        parsed = nlohmann::json::parse(ReadTextFile(input));
      } catch (const nlohmann::json::exception &e) {
        throw Error("malformed report '" + input + "': " + e.what());
      }
      const Histogram h = BuildHistogram(ParseReport(parsed), bins);
      WriteOrPrint(output, HistogramToCsv(h), out);
    }
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace gradspec
