// Copyright 2026 The AMSS Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// File plumbing: atomic text writes, a small RFC 4180 CSV reader, and
// RIFF/WAVE PCM reading and writing (16/24-bit integer, 32-bit float).

#ifndef AMSS_IO_HPP_
#define AMSS_IO_HPP_

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "amss/common.hpp"

namespace amss {

// Writes `contents` to a sibling temp file and renames it over `path`, so
// readers never observe a partially written output.
inline void WriteFileAtomic(const std::filesystem::path& path,
                            std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot rename into " + path.string());
  }
}

inline std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// CSV

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  // 1-based line number of each row in the source, for error messages.
  std::vector<int> line_numbers;

  // Column index by name, or -1.
  int Column(std::string_view name) const {
    for (size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
  }

  int RequireColumn(std::string_view name) const {
    const int c = Column(name);
    if (c < 0) throw ValidationError("missing CSV column '" + std::string(name) + "'");
    return c;
  }
};

namespace internal {

inline std::vector<std::string> SplitCsvRecord(std::string_view line,
                                               int line_number) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) {
    throw ValidationError("line " + std::to_string(line_number) +
                          ": unterminated quoted field");
  }
  fields.push_back(std::move(cur));
  return fields;
}

inline std::string Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace internal

// Parses CSV text with a mandatory header row. Blank lines are skipped;
// every row must have as many fields as the header.
inline CsvTable ParseCsv(std::string_view text) {
  CsvTable table;
  int line_number = 0;
  bool have_header = false;
  size_t pos = 0;
  if (text.substr(0, 3) == "\xEF\xBB\xBF") pos = 3;  // UTF-8 BOM
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_number;
    pos = end + 1;
    if (internal::Trim(line).empty()) {
      if (end == text.size()) break;
      continue;
    }
    auto fields = internal::SplitCsvRecord(line, line_number);
    for (auto& f : fields) f = internal::Trim(f);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
    } else {
      if (fields.size() != table.header.size()) {
        throw ValidationError("line " + std::to_string(line_number) + ": expected " +
                              std::to_string(table.header.size()) +
                              " fields, got " + std::to_string(fields.size()));
      }
      table.rows.push_back(std::move(fields));
      table.line_numbers.push_back(line_number);
    }
    if (end == text.size()) break;
  }
  if (!have_header) throw ValidationError("CSV has no header row");
  return table;
}

inline CsvTable ReadCsv(const std::filesystem::path& path) {
  return ParseCsv(ReadFile(path));
}

inline double ParseDouble(const std::string& s, std::string_view what) {
  try {
    size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("invalid number for " + std::string(what) + ": '" + s + "'");
  }
}

inline int ParseInt(const std::string& s, std::string_view what) {
  try {
    size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("invalid integer for " + std::string(what) + ": '" + s + "'");
  }
}

// ---------------------------------------------------------------------------
// WAV

enum class PcmFormat { kInt16, kInt24, kFloat32 };

// Deinterleaved audio, samples at full scale +-1.0.
struct AudioFile {
  double sample_rate = 0.0;
  std::vector<std::vector<double>> channels;

  size_t frames() const { return channels.empty() ? 0 : channels.front().size(); }
};

namespace internal {

inline uint32_t ReadLe32(const unsigned char* p) {
  return uint32_t{p[0]} | (uint32_t{p[1]} << 8) | (uint32_t{p[2]} << 16) |
         (uint32_t{p[3]} << 24);
}
inline uint16_t ReadLe16(const unsigned char* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}
inline void PutLe32(std::string& s, uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
inline void PutLe16(std::string& s, uint16_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>(v >> 8));
}

constexpr uint16_t kWaveFormatPcm = 1;
constexpr uint16_t kWaveFormatFloat = 3;
constexpr uint16_t kWaveFormatExtensible = 0xFFFE;

}  // namespace internal

inline AudioFile DecodeWav(std::string_view bytes) {
  using internal::ReadLe16;
  using internal::ReadLe32;
  const auto* b = reinterpret_cast<const unsigned char*>(bytes.data());
  if (bytes.size() < 12 || std::memcmp(b, "RIFF", 4) != 0 ||
      std::memcmp(b + 8, "WAVE", 4) != 0) {
    throw ValidationError("not a RIFF/WAVE file");
  }
  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  const unsigned char* data = nullptr;
  size_t data_size = 0;
  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const uint32_t size = ReadLe32(b + pos + 4);
    const size_t body = pos + 8;
    const size_t avail = bytes.size() - body;
    if (std::memcmp(b + pos, "fmt ", 4) == 0) {
      if (size < 16 || size > avail) throw ValidationError("truncated fmt chunk");
      format = ReadLe16(b + body);
      channels = ReadLe16(b + body + 2);
      rate = ReadLe32(b + body + 4);
      bits = ReadLe16(b + body + 14);
      if (format == internal::kWaveFormatExtensible && size >= 40) {
        format = ReadLe16(b + body + 24);  // sub-format GUID leading tag
      }
    } else if (std::memcmp(b + pos, "data", 4) == 0) {
      data = b + body;
      data_size = std::min<size_t>(size, avail);  // tolerate streamed sizes
    }
    pos = body + size + (size & 1);
  }
  if (channels == 0 || rate == 0) throw ValidationError("missing or empty fmt chunk");
  if (data == nullptr) throw ValidationError("missing data chunk");

  const bool is_float = format == internal::kWaveFormatFloat && bits == 32;
  const bool is_int = format == internal::kWaveFormatPcm && (bits == 16 || bits == 24);
  if (!is_float && !is_int) {
    throw ValidationError("unsupported WAV encoding (format " + std::to_string(format) +
                          ", " + std::to_string(bits) + " bits)");
  }
  const size_t bytes_per_sample = bits / 8;
  const size_t frame_bytes = bytes_per_sample * channels;
  const size_t frames = data_size / frame_bytes;

  AudioFile out;
  out.sample_rate = rate;
  out.channels.assign(channels, std::vector<double>(frames));
  for (size_t f = 0; f < frames; ++f) {
    for (size_t c = 0; c < channels; ++c) {
      const unsigned char* p = data + f * frame_bytes + c * bytes_per_sample;
      double v = 0.0;
      if (is_float) {
        float x;
        uint32_t u = ReadLe32(p);
        std::memcpy(&x, &u, 4);
        v = x;
      } else if (bits == 16) {
        v = static_cast<int16_t>(ReadLe16(p)) / 32768.0;
      } else {
        int32_t x = static_cast<int32_t>(uint32_t{p[0]} << 8 | uint32_t{p[1]} << 16 |
                                         uint32_t{p[2]} << 24) >> 8;
        v = x / 8388608.0;
      }
      out.channels[c][f] = v;
    }
  }
  return out;
}

inline AudioFile ReadWav(const std::filesystem::path& path) {
  try {
    return DecodeWav(ReadFile(path));
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

inline std::string EncodeWav(const AudioFile& audio,
                             PcmFormat format = PcmFormat::kFloat32) {
  using internal::PutLe16;
  using internal::PutLe32;
  if (audio.channels.empty()) throw ArgumentError("no channels to encode");
  const size_t frames = audio.frames();
  for (const auto& ch : audio.channels) {
    if (ch.size() != frames) throw ArgumentError("channels differ in length");
  }
  const uint16_t channels = static_cast<uint16_t>(audio.channels.size());
  const uint16_t bits = format == PcmFormat::kInt16 ? 16 : format == PcmFormat::kInt24 ? 24 : 32;
  const uint16_t tag = format == PcmFormat::kFloat32 ? internal::kWaveFormatFloat
                                                     : internal::kWaveFormatPcm;
  const uint32_t rate = static_cast<uint32_t>(audio.sample_rate);
  const uint32_t block = channels * bits / 8;
  const uint32_t data_size = static_cast<uint32_t>(frames * block);

  std::string s;
  s.reserve(44 + data_size);
  s += "RIFF";
  PutLe32(s, 36 + data_size);
  s += "WAVEfmt ";
  PutLe32(s, 16);
  PutLe16(s, tag);
  PutLe16(s, channels);
  PutLe32(s, rate);
  PutLe32(s, rate * block);
  PutLe16(s, static_cast<uint16_t>(block));
  PutLe16(s, bits);
  s += "data";
  PutLe32(s, data_size);
  for (size_t f = 0; f < frames; ++f) {
    for (const auto& ch : audio.channels) {
      const double v = ch[f];
      if (format == PcmFormat::kFloat32) {
        const float x = static_cast<float>(v);
        uint32_t u;
        std::memcpy(&u, &x, 4);
        PutLe32(s, u);
      } else if (format == PcmFormat::kInt16) {
        const double c = std::clamp(v, -1.0, 32767.0 / 32768.0);
        PutLe16(s, static_cast<uint16_t>(static_cast<int16_t>(std::lround(c * 32768.0))));
      } else {
        const double c = std::clamp(v, -1.0, 8388607.0 / 8388608.0);
        const auto x = static_cast<uint32_t>(static_cast<int32_t>(std::lround(c * 8388608.0)));
        s.push_back(static_cast<char>(x & 0xff));
        s.push_back(static_cast<char>((x >> 8) & 0xff));
        s.push_back(static_cast<char>((x >> 16) & 0xff));
      }
    }
  }
  return s;
}

inline void WriteWav(const std::filesystem::path& path, const AudioFile& audio,
                     PcmFormat format = PcmFormat::kFloat32) {
  WriteFileAtomic(path, EncodeWav(audio, format));
}

}  // namespace amss

#endif  // AMSS_IO_HPP_
