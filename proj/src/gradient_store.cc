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

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

namespace gradspec {
namespace {

constexpr char kMagic[4] = {'G', 'S', 'G', '1'};

bool IsValidUtf8(std::string_view s) {
  size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    size_t extra;
    std::uint32_t cp;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      extra = 1;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      extra = 2;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      extra = 3;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + extra >= s.size()) return false;
    for (size_t j = 1; j <= extra; ++j) {
      const auto cc = static_cast<unsigned char>(s[i + j]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // Overlong encodings, surrogates and out-of-range code points.
    if ((extra == 1 && cp < 0x80) || (extra == 2 && cp < 0x800) ||
        (extra == 3 && cp < 0x10000) || cp > 0x10FFFF ||
        (cp >= 0xD800 && cp <= 0xDFFF)) {
      return false;
    }
    i += extra + 1;
  }
  return true;
}

void PutU8(std::string *out, std::uint8_t v) { out->push_back(static_cast<char>(v)); }

void PutU16(std::string *out, std::uint16_t v) {
  for (int i = 0; i < 2; ++i) PutU8(out, static_cast<std::uint8_t>(v >> (8 * i)));
}

void PutU32(std::string *out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) PutU8(out, static_cast<std::uint8_t>(v >> (8 * i)));
}

void PutU64(std::string *out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) PutU8(out, static_cast<std::uint8_t>(v >> (8 * i)));
}

std::string EncodeHeader(std::uint64_t count) {
  std::string out(kMagic, sizeof(kMagic));
  PutU32(&out, GradientDataset::kFormatVersion);
  PutU64(&out, count);
  return out;
}

std::string EncodeRecord(const GradientRecord &record) {
  std::string out;
  out.reserve(2 + record.sample_id.size() + 9 + 4 * record.values.size());
  PutU16(&out, static_cast<std::uint16_t>(record.sample_id.size()));
  out.append(record.sample_id);
  PutU8(&out, static_cast<std::uint8_t>(record.truth_label));
  PutU32(&out, record.rows);
  PutU32(&out, record.cols);
  for (float v : record.values) PutU32(&out, std::bit_cast<std::uint32_t>(v));
  return out;
}

template <typename T>
T LoadLittleEndian(const unsigned char *p) {
  T v = 0;
  for (size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(p[i]) << (8 * i);
  return v;
}

// Minimal byte source shared by the in-memory and streaming decoders.
class ByteSource {
 public:
  virtual ~ByteSource() = default;
  // Reads exactly n bytes or returns false.
  virtual bool Read(void *dst, size_t n) = 0;
  // True when no further bytes are available.
  virtual bool AtEnd() = 0;

  template <typename T>
  T Get() {
    unsigned char buf[sizeof(T)];
    if (!Read(buf, sizeof(T))) throw Error("truncated payload");
    return LoadLittleEndian<T>(buf);
  }
};

class StringSource : public ByteSource {
 public:
  explicit StringSource(std::string_view bytes) : bytes_(bytes) {}
  bool Read(void *dst, size_t n) override {
    if (bytes_.size() - pos_ < n) return false;
    std::memcpy(dst, bytes_.data() + pos_, n);
    pos_ += n;
    return true;
  }
  bool AtEnd() override { return pos_ == bytes_.size(); }

 private:
  std::string_view bytes_;
  size_t pos_ = 0;
};

class StreamSource : public ByteSource {
 public:
  explicit StreamSource(std::istream *in) : in_(in) {}
  bool Read(void *dst, size_t n) override {
    in_->read(static_cast<char *>(dst), static_cast<std::streamsize>(n));
    return static_cast<size_t>(in_->gcount()) == n;
  }
  bool AtEnd() override {
    return in_->peek() == std::char_traits<char>::eof();
  }

 private:
  std::istream *in_;
};

struct Header {
  std::uint32_t version;
  std::uint64_t count;
};

Header DecodeHeader(ByteSource *src) {
  char magic[4];
  if (!src->Read(magic, sizeof(magic))) throw Error("truncated payload: header");
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw Error("bad magic");
  Header h;
  h.version = src->Get<std::uint32_t>();
  if (h.version != GradientDataset::kFormatVersion) {
    throw Error("unsupported version " + std::to_string(h.version));
  }
  h.count = src->Get<std::uint64_t>();
  return h;
}

void DecodeRecord(ByteSource *src, GradientRecord *record) {
  const auto id_len = src->Get<std::uint16_t>();
  record->sample_id.assign(id_len, '\0');
  if (!src->Read(record->sample_id.data(), id_len)) throw Error("truncated payload");
  const auto label = src->Get<std::uint8_t>();
  if (label > 2) {
    throw Error("sample '" + record->sample_id + "': bad label " +
                std::to_string(label));
  }
  record->truth_label = static_cast<TruthLabel>(label);
  record->rows = src->Get<std::uint32_t>();
  record->cols = src->Get<std::uint32_t>();
  const std::uint64_t n =
      static_cast<std::uint64_t>(record->rows) * record->cols;
  // Cap the up-front allocation; a lying header must fail as truncation, not
  // as an out-of-memory condition.
  constexpr std::uint64_t kChunk = 1 << 20;
  record->values.clear();
  std::vector<unsigned char> buf;
  for (std::uint64_t done = 0; done < n;) {
    const std::uint64_t take = std::min(kChunk, n - done);
    buf.resize(take * 4);
    if (!src->Read(buf.data(), buf.size())) throw Error("truncated payload");
    for (std::uint64_t i = 0; i < take; ++i) {
      record->values.push_back(
          std::bit_cast<float>(LoadLittleEndian<std::uint32_t>(&buf[4 * i])));
    }
    done += take;
  }
  ValidateRecord(*record);
}

void CheckUnique(std::unordered_set<std::string> *seen, const std::string &id) {
  if (!seen->insert(id).second) throw Error("duplicate sample_id '" + id + "'");
}

}  // namespace

std::string_view LabelName(TruthLabel label) {
  switch (label) {
    case TruthLabel::kClean:
      return "clean";
    case TruthLabel::kPoisoned:
      return "poisoned";
    case TruthLabel::kUnknown:
      break;
  }
  return "unknown";
}

void ValidateRecord(const GradientRecord &record) {
  std::vector<std::string> problems;
  if (record.sample_id.empty()) problems.emplace_back("empty sample_id");
  if (record.sample_id.size() > std::numeric_limits<std::uint16_t>::max()) {
    problems.emplace_back("sample_id longer than 65535 bytes");
  }
  if (!IsValidUtf8(record.sample_id)) problems.emplace_back("sample_id not UTF-8");
  if (static_cast<std::uint8_t>(record.truth_label) > 2) {
    problems.emplace_back("bad label");
  }
  if (record.rows == 0 || record.cols == 0) problems.emplace_back("zero dimension");
  if (record.values.size() !=
      static_cast<std::uint64_t>(record.rows) * record.cols) {
    problems.emplace_back("length mismatch");
  }
  for (float v : record.values) {
    if (!std::isfinite(v)) {
      problems.emplace_back("non-finite value");
      break;
    }
  }
  if (problems.empty()) return;
  std::ostringstream msg;
  msg << "sample '" << record.sample_id << "': ";
  for (size_t i = 0; i < problems.size(); ++i) {
    if (i) msg << "; ";
    msg << problems[i];
  }
  throw Error(msg.str());
}

void ValidateDataset(const GradientDataset &dataset) {
  if (dataset.format_version != GradientDataset::kFormatVersion) {
    throw Error("unsupported version " + std::to_string(dataset.format_version));
  }
  std::unordered_set<std::string> seen;
  for (const auto &r : dataset.records) {
    ValidateRecord(r);
    CheckUnique(&seen, r.sample_id);
  }
}

std::string SerializeDataset(const GradientDataset &dataset) {
  ValidateDataset(dataset);
  std::string out = EncodeHeader(dataset.records.size());
  for (const auto &r : dataset.records) out += EncodeRecord(r);
  return out;
}

GradientDataset DeserializeDataset(std::string_view bytes) {
  StringSource src(bytes);
  const Header h = DecodeHeader(&src);
  GradientDataset dataset;
  dataset.format_version = h.version;
  std::unordered_set<std::string> seen;
  for (std::uint64_t i = 0; i < h.count; ++i) {
    GradientRecord r;
    DecodeRecord(&src, &r);
    CheckUnique(&seen, r.sample_id);
    dataset.records.push_back(std::move(r));
  }
  if (!src.AtEnd()) throw Error("trailing data after last record");
  return dataset;
}

void WriteDataset(const GradientDataset &dataset, const std::string &path) {
  DatasetWriter writer(path, dataset.records.size());
  for (const auto &r : dataset.records) writer.Append(r);
  writer.Finish();
}

GradientDataset ReadDataset(const std::string &path) {
  DatasetReader reader(path);
  GradientDataset dataset;
  dataset.format_version = reader.format_version();
  GradientRecord r;
  while (reader.Next(&r)) dataset.records.push_back(std::move(r));
  return dataset;
}

DatasetReader::DatasetReader(const std::string &path)
    : path_(path), in_(path, std::ios::binary) {
  if (!in_) throw Error("cannot open '" + path + "' for reading");
  StreamSource src(&in_);
  const Header h = DecodeHeader(&src);
  version_ = h.version;
  record_count_ = h.count;
}

bool DatasetReader::Next(GradientRecord *record) {
  StreamSource src(&in_);
  if (consumed_ == record_count_) {
    if (!src.AtEnd()) throw Error("trailing data after last record");
    return false;
  }
  DecodeRecord(&src, record);
  CheckUnique(&seen_ids_, record->sample_id);
  ++consumed_;
  return true;
}

DatasetWriter::DatasetWriter(const std::string &path, std::uint64_t record_count)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc),
      expected_(record_count) {
  if (!out_) throw Error("cannot open '" + path + "' for writing");
  const std::string header = EncodeHeader(record_count);
  out_.write(header.data(), static_cast<std::streamsize>(header.size()));
}

DatasetWriter::~DatasetWriter() = default;

void DatasetWriter::Append(const GradientRecord &record) {
  if (written_ == expected_) throw Error("more records than declared count");
  ValidateRecord(record);
  CheckUnique(&seen_ids_, record.sample_id);
  const std::string bytes = EncodeRecord(record);
  out_.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out_) throw Error("write failed for '" + path_ + "'");
  ++written_;
}

void DatasetWriter::Finish() {
  if (finished_) return;
  if (written_ != expected_) {
    throw Error("declared " + std::to_string(expected_) + " records, wrote " +
                std::to_string(written_));
  }
  out_.flush();
  if (!out_) throw Error("write failed for '" + path_ + "'");
  out_.close();
  finished_ = true;
}

}  // namespace gradspec
