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

// Per-sample gradient datasets and the GSG1 binary container.
//
// GSG1 layout, all integers little-endian:
//   magic "GSG1" | version u32 (=1) | record_count u64
//   per record: id_len u16 | id bytes (UTF-8) | label u8 | rows u32 |
//               cols u32 | rows*cols float32, row-major
//
// DatasetReader streams records one at a time so a dataset never has to be
// resident in memory; ReadDataset/WriteDataset are the whole-file helpers.

#ifndef GRADSPEC_GRADIENT_STORE_H_
#define GRADSPEC_GRADIENT_STORE_H_

#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <Eigen/Core>

#include "gradspec/error.h"

namespace gradspec {

enum class TruthLabel : std::uint8_t { kUnknown = 0, kClean = 1, kPoisoned = 2 };

std::string_view LabelName(TruthLabel label);

using RowMajorMatrixXf =
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// One sample's gradient matrix.
struct GradientRecord {
  std::string sample_id;
  TruthLabel truth_label = TruthLabel::kUnknown;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<float> values;  // row-major, rows * cols

  Eigen::Map<const RowMajorMatrixXf> matrix() const {
    return {values.data(), static_cast<Eigen::Index>(rows),
            static_cast<Eigen::Index>(cols)};
  }

  bool operator==(const GradientRecord &) const = default;
};

struct GradientDataset {
  static constexpr std::uint32_t kFormatVersion = 1;

  std::vector<GradientRecord> records;
  std::uint32_t format_version = kFormatVersion;

  bool operator==(const GradientDataset &) const = default;
};

// Throws Error naming every violated invariant ("empty sample_id",
// "length mismatch", "non-finite value", ...).
void ValidateRecord(const GradientRecord &record);

// Validates every record and checks id uniqueness.
void ValidateDataset(const GradientDataset &dataset);

// Encodes a dataset into GSG1 bytes. Output is a pure function of the input.
std::string SerializeDataset(const GradientDataset &dataset);
GradientDataset DeserializeDataset(std::string_view bytes);

void WriteDataset(const GradientDataset &dataset, const std::string &path);
GradientDataset ReadDataset(const std::string &path);

// Streaming reader. Validates the header on open and each record as it is
// returned; duplicate ids are detected across the whole stream. Trailing
// bytes after the declared record count are reported by Next() once the
// last record has been consumed.
class DatasetReader {
 public:
  explicit DatasetReader(const std::string &path);

  std::uint64_t record_count() const { return record_count_; }
  std::uint32_t format_version() const { return version_; }

  // Reads the next record into *record. Returns false at end of data.
  bool Next(GradientRecord *record);

 private:
  std::string path_;
  std::ifstream in_;
  std::uint32_t version_ = 0;
  std::uint64_t record_count_ = 0;
  std::uint64_t consumed_ = 0;
  std::unordered_set<std::string> seen_ids_;
};

// Streaming writer. The record count is fixed up front and checked on
// Finish(); records are validated as they are appended.
class DatasetWriter {
 public:
  DatasetWriter(const std::string &path, std::uint64_t record_count);
  ~DatasetWriter();

  DatasetWriter(const DatasetWriter &) = delete;
  DatasetWriter &operator=(const DatasetWriter &) = delete;

  void Append(const GradientRecord &record);
  void Finish();

 private:
  std::string path_;
  std::ofstream out_;
  std::uint64_t expected_ = 0;
  std::uint64_t written_ = 0;
  bool finished_ = false;
  std::unordered_set<std::string> seen_ids_;
};

}  // namespace gradspec

#endif  // GRADSPEC_GRADIENT_STORE_H_
