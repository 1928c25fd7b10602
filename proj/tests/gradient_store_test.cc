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

#include "gradspec/gradient_store.h"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <limits>
#include <random>

#include <unistd.h>

#include <gtest/gtest.h>

namespace gradspec {
namespace {

std::string TempPath(const std::string &name) {
  return (std::filesystem::temp_directory_path() /
          ("gradspec_store_" + std::to_string(::getpid()) + "_" + name))
      .string();
}

GradientRecord MakeRecord(std::string id, TruthLabel label, std::uint32_t rows,
                          std::uint32_t cols, float start = 0.0f) {
  GradientRecord r{std::move(id), label, rows, cols, {}};
  for (std::uint32_t i = 0; i < rows * cols; ++i) r.values.push_back(start + 0.5f * i);
  return r;
}

template <typename Fn>
std::string ErrorOf(Fn &&fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.what();
  }
  return "";
}

TEST(GradientStoreTest, EmptyDatasetIsHeaderOnly) {
  const std::string bytes = SerializeDataset({});
  ASSERT_EQ(bytes.size(), 16u);
  EXPECT_EQ(bytes.substr(0, 4), "GSG1");
  EXPECT_EQ(DeserializeDataset(bytes), GradientDataset{});

  const std::string path = TempPath("empty.gsg");
  WriteDataset({}, path);
  EXPECT_TRUE(ReadDataset(path).records.empty());
  std::filesystem::remove(path);
}

TEST(GradientStoreTest, IdentityRecordRoundTrip) {
  GradientDataset d;
  d.records.push_back({"eye", TruthLabel::kUnknown, 2, 2, {1.0f, 0.0f, 0.0f, 1.0f}});
  const std::string path = TempPath("eye.gsg");
  WriteDataset(d, path);
  const GradientDataset back = ReadDataset(path);
  ASSERT_EQ(back.records.size(), 1u);
  EXPECT_EQ(std::memcmp(back.records[0].values.data(), d.records[0].values.data(),
                        4 * sizeof(float)),
            0);
  EXPECT_EQ(back, d);
  std::filesystem::remove(path);
}

TEST(GradientStoreTest, ExactByteLayout) {
  GradientDataset d;
  d.records.push_back({"ab", TruthLabel::kPoisoned, 1, 1, {1.0f}});
  const std::string bytes = SerializeDataset(d);
  const unsigned char expected[] = {'G', 'S', 'G', '1', 1, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0,
                                    2,   0,   'a', 'b', 2, 1, 0, 0, 0, 1, 0, 0, 0,
                                    0x00, 0x00, 0x80, 0x3f};
  ASSERT_EQ(bytes.size(), sizeof(expected));
  EXPECT_EQ(std::memcmp(bytes.data(), expected, sizeof(expected)), 0);
}

TEST(GradientStoreTest, MixedLabelsPreserveOrderAndBytes) {
  GradientDataset d;
  d.records.push_back(MakeRecord("c", TruthLabel::kClean, 2, 3));
  d.records.push_back(MakeRecord("a", TruthLabel::kPoisoned, 1, 4, -2.0f));
  d.records.push_back(MakeRecord("b", TruthLabel::kUnknown, 3, 1, 7.0f));
  const std::string path = TempPath("mixed.gsg");
  WriteDataset(d, path);
  const GradientDataset back = ReadDataset(path);
  EXPECT_EQ(back, d);
  // Re-serialising what was read gives the same buffer.
  EXPECT_EQ(SerializeDataset(back), SerializeDataset(d));
  std::filesystem::remove(path);
}

TEST(GradientStoreTest, RandomizedRoundTripAndDeterminism) {
  std::mt19937 rng(1234);
  for (int trial = 0; trial < 40; ++trial) {
    GradientDataset d;
    const int n = std::uniform_int_distribution<int>(0, 6)(rng);
    for (int i = 0; i < n; ++i) {
      const auto rows = std::uniform_int_distribution<std::uint32_t>(1, 9)(rng);
      const auto cols = std::uniform_int_distribution<std::uint32_t>(1, 9)(rng);
      GradientRecord r;
      r.sample_id = "id-" + std::to_string(trial) + "-" + std::to_string(i) + "-é";
      r.truth_label = static_cast<TruthLabel>(std::uniform_int_distribution<int>(0, 2)(rng));
      r.rows = rows;
      r.cols = cols;
      std::normal_distribution<float> normal(0.0f, 100.0f);
      for (std::uint32_t j = 0; j < rows * cols; ++j) r.values.push_back(normal(rng));
      d.records.push_back(std::move(r));
    }
    const std::string a = SerializeDataset(d);
    EXPECT_EQ(a, SerializeDataset(d));
    EXPECT_EQ(DeserializeDataset(a), d);
  }
}

TEST(GradientStoreTest, RejectsBadMagic) {
  std::string bytes = SerializeDataset({});
  bytes[0] = 'X';
  EXPECT_EQ(ErrorOf([&] { DeserializeDataset(bytes); }), "bad magic");
}

TEST(GradientStoreTest, RejectsOversizedDimensions) {
  GradientDataset d;
  d.records.push_back(MakeRecord("r", TruthLabel::kClean, 2, 2));
  std::string bytes = SerializeDataset(d);
  // rows field sits after header(16) + id_len(2) + id(1) + label(1).
  bytes[20] = 100;
  EXPECT_NE(ErrorOf([&] { DeserializeDataset(bytes); }).find("truncated payload"),
            std::string::npos);
}

TEST(GradientStoreTest, EverySingleFieldCorruptionIsRejected) {
  GradientDataset d;
  d.records.push_back(MakeRecord("first", TruthLabel::kClean, 3, 2));
  d.records.push_back(MakeRecord("second", TruthLabel::kPoisoned, 2, 2));
  const std::string good = SerializeDataset(d);

  struct Field {
    const char *name;
    size_t offset;
    size_t width;
  };
  const size_t rec1 = 16;
  const size_t rec2 = rec1 + 2 + 5 + 1 + 4 + 4 + 6 * 4;
  const Field fields[] = {{"magic", 0, 4},          {"version", 4, 4},
                          {"count", 8, 8},          {"rows1", rec1 + 8, 4},
                          {"cols1", rec1 + 12, 4},  {"rows2", rec2 + 9, 4},
                          {"cols2", rec2 + 13, 4},  {"id_len1", rec1, 2}};
  for (const Field &f : fields) {
    for (int delta : {-1, 1, 7}) {
      std::string bad = good;
      // Perturb the low byte of the little-endian field.
      bad[f.offset] = static_cast<char>(static_cast<unsigned char>(bad[f.offset]) + delta);
      if (bad == good) continue;
      EXPECT_THROW(DeserializeDataset(bad), Error) << f.name << " delta " << delta;
    }
  }
  EXPECT_THROW(DeserializeDataset(good + "x"), Error);
  EXPECT_THROW(DeserializeDataset(good.substr(0, good.size() - 1)), Error);
}

TEST(GradientStoreTest, RejectsDuplicateIdsAndNonFiniteValues) {
  GradientDataset d;
  d.records.push_back(MakeRecord("dup", TruthLabel::kClean, 1, 1));
  d.records.push_back(MakeRecord("dup", TruthLabel::kClean, 1, 1));
  EXPECT_NE(ErrorOf([&] { SerializeDataset(d); }).find("duplicate sample_id"),
            std::string::npos);

  GradientDataset ok;
  ok.records.push_back(MakeRecord("x", TruthLabel::kClean, 1, 2));
  std::string bytes = SerializeDataset(ok);
  const float nan = std::numeric_limits<float>::quiet_NaN();
  std::memcpy(&bytes[bytes.size() - 4], &nan, 4);
  EXPECT_NE(ErrorOf([&] { DeserializeDataset(bytes); }).find("non-finite value"),
            std::string::npos);
}

TEST(ValidateRecordTest, NamesEachViolation) {
  EXPECT_NO_THROW(ValidateRecord(MakeRecord("ok", TruthLabel::kClean, 2, 2)));

  GradientRecord nan = MakeRecord("n", TruthLabel::kClean, 2, 2);
  nan.values[1] = std::nanf("");
  EXPECT_NE(ErrorOf([&] { ValidateRecord(nan); }).find("non-finite value"), std::string::npos);

  GradientRecord short_values = MakeRecord("s", TruthLabel::kClean, 2, 2);
  short_values.values.resize(3);
  EXPECT_NE(ErrorOf([&] { ValidateRecord(short_values); }).find("length mismatch"),
            std::string::npos);

  GradientRecord both{"", TruthLabel::kClean, 2, 2, {1.0f, INFINITY, 0.0f}};
  const std::string msg = ErrorOf([&] { ValidateRecord(both); });
  EXPECT_NE(msg.find("empty sample_id"), std::string::npos);
  EXPECT_NE(msg.find("length mismatch"), std::string::npos);
  EXPECT_NE(msg.find("non-finite value"), std::string::npos);

  GradientRecord bad_utf8 = MakeRecord("\xff\xfe", TruthLabel::kClean, 1, 1);
  EXPECT_NE(ErrorOf([&] { ValidateRecord(bad_utf8); }).find("not UTF-8"), std::string::npos);
}

TEST(DatasetReaderTest, StreamsRecordsAndDetectsTrailingBytes) {
  GradientDataset d;
  for (int i = 0; i < 5; ++i) d.records.push_back(MakeRecord("r" + std::to_string(i), TruthLabel::kClean, 2, 2));
  const std::string path = TempPath("stream.gsg");
  WriteDataset(d, path);
  {
    DatasetReader reader(path);
    EXPECT_EQ(reader.record_count(), 5u);
    GradientRecord r;
    int n = 0;
    while (reader.Next(&r)) EXPECT_EQ(r, d.records[n++]);
    EXPECT_EQ(n, 5);
  }
  {
    std::FILE *f = std::fopen(path.c_str(), "ab");
    std::fputc(0, f);
    std::fclose(f);
    DatasetReader reader(path);
    GradientRecord r;
    for (int i = 0; i < 5; ++i) ASSERT_TRUE(reader.Next(&r));
    EXPECT_THROW(reader.Next(&r), Error);
  }
  std::filesystem::remove(path);
}

TEST(DatasetReaderTest, MissingFileNamesPath) {
  const std::string msg = ErrorOf([] { DatasetReader reader("/nonexistent/x.gsg"); });
  EXPECT_NE(msg.find("/nonexistent/x.gsg"), std::string::npos);
}

TEST(DatasetWriterTest, CountMismatchIsAnError) {
  const std::string path = TempPath("count.gsg");
  DatasetWriter writer(path, 2);
  writer.Append(MakeRecord("a", TruthLabel::kClean, 1, 1));
  EXPECT_THROW(writer.Finish(), Error);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace gradspec
