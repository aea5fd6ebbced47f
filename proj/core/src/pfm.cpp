// Copyright 2026 The gcmd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gcmd/pfm.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "gcmd/errors.hpp"

namespace gcmd {

namespace {

// Minimal header tokenizer over ASCII whitespace, with optional '#' comments (PNM).
class HeaderReader {
 public:
  HeaderReader(std::string_view bytes, bool comments) : bytes_(bytes), comments_(comments) {}

  std::size_t offset() const noexcept { return pos_; }

  // Offset of the next token.
  std::size_t next() {
    skip_space();
    return pos_;
  }

  std::string token(const char* what) {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < bytes_.size() && !is_space(bytes_[pos_])) ++pos_;
    if (pos_ == start) throw FormatError(std::string("missing ") + what, start);
    return std::string(bytes_.substr(start, pos_ - start));
  }

  long integer(const char* what) {
    skip_space();
    const std::size_t start = pos_;
    const std::string tok = token(what);
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(tok, &used);
    } catch (const std::exception&) {
      throw FormatError(std::string("malformed ") + what + " '" + tok + "'", start);
    }
    if (used != tok.size()) throw FormatError(std::string("malformed ") + what, start);
    return v;
  }

  double real(const char* what) {
    skip_space();
    const std::size_t start = pos_;
    const std::string tok = token(what);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw FormatError(std::string("malformed ") + what + " '" + tok + "'", start);
    }
    if (used != tok.size()) throw FormatError(std::string("malformed ") + what, start);
    return v;
  }

  // The single whitespace byte separating the header from the payload.
  void end_of_header() {
    if (pos_ >= bytes_.size() || !is_space(bytes_[pos_])) {
      throw FormatError("expected whitespace after header", pos_);
    }
    ++pos_;
  }

 private:
  static bool is_space(char c) noexcept {
    return c == ' ' || c == '\n' || c == '\r' || c == '\t' || c == '\v' || c == '\f';
  }

  void skip_space() {
    while (pos_ < bytes_.size()) {
      if (is_space(bytes_[pos_])) {
        ++pos_;
      } else if (comments_ && bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view bytes_;
  bool comments_;
  std::size_t pos_ = 0;
};

void check_dimensions(long width, long height, std::size_t offset) {
  if (width <= 0 || height <= 0 || width > (1L << 20) || height > (1L << 20)) {
    throw FormatError("invalid dimensions " + std::to_string(width) + "x" +
                          std::to_string(height),
                      offset);
  }
}

float load_float(const char* p, bool little_endian) {
  const auto* u = reinterpret_cast<const unsigned char*>(p);
  std::uint32_t bits = 0;
  if (little_endian) {
    bits = std::uint32_t{u[0]} | std::uint32_t{u[1]} << 8 | std::uint32_t{u[2]} << 16 |
           std::uint32_t{u[3]} << 24;
  } else {
    bits = std::uint32_t{u[3]} | std::uint32_t{u[2]} << 8 | std::uint32_t{u[1]} << 16 |
           std::uint32_t{u[0]} << 24;
  }
  return std::bit_cast<float>(bits);
}

}  // namespace

ImageGrid read_pfm(std::string_view bytes) {
  HeaderReader header(bytes, false);
  const std::string magic = header.token("PFM magic");
  int channels = 0;
  if (magic == "Pf") {
    channels = 1;
  } else if (magic == "PF") {
    channels = 3;
  } else {
    throw FormatError("bad PFM magic '" + magic + "'", 0);
  }
  const std::size_t dim_offset = header.next();
  const long width = header.integer("width");
  const long height = header.integer("height");
  check_dimensions(width, height, dim_offset);
  const std::size_t scale_offset = header.next();
  const double scale = header.real("scale");
  if (scale == 0.0 || !std::isfinite(scale)) throw FormatError("PFM scale must be non-zero", scale_offset);
  header.end_of_header();

  const bool little = scale < 0.0;
  const std::size_t start = header.offset();
  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height) *
                            static_cast<std::size_t>(channels);
  if (bytes.size() - start < count * 4) {
    throw FormatError("truncated PFM payload: need " + std::to_string(count * 4) + " bytes, have " +
                          std::to_string(bytes.size() - start),
                      bytes.size());
  }

  const int w = static_cast<int>(width);
  const int h = static_cast<int>(height);
  std::vector<ImageGrid> planes(static_cast<std::size_t>(channels), ImageGrid(w, h));
  std::size_t offset = start;
  for (int row = 0; row < h; ++row) {
    const int y = h - 1 - row;  // stored bottom-to-top
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < channels; ++c) {
        const float v = load_float(bytes.data() + offset, little);
        if (!std::isfinite(v)) throw FormatError("non-finite PFM sample", offset);
        planes[static_cast<std::size_t>(c)](x, y) = v;
        offset += 4;
      }
    }
  }
  if (channels == 1) return std::move(planes[0]);
  return to_grayscale(planes[0], planes[1], planes[2]);
}

std::string write_pfm(const ImageGrid& grid) {
  std::string out = "Pf\n" + std::to_string(grid.width()) + " " + std::to_string(grid.height()) +
                    "\n-1.0\n";
  const std::size_t header = out.size();
  out.resize(header + grid.size() * 4);
  char* p = out.data() + header;
  for (int row = 0; row < grid.height(); ++row) {
    const int y = grid.height() - 1 - row;
    for (int x = 0; x < grid.width(); ++x) {
      const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(grid(x, y)));
      *p++ = static_cast<char>(bits & 0xFF);
      *p++ = static_cast<char>((bits >> 8) & 0xFF);
      *p++ = static_cast<char>((bits >> 16) & 0xFF);
      *p++ = static_cast<char>((bits >> 24) & 0xFF);
    }
  }
  return out;
}

ImageGrid read_pnm(std::string_view bytes) {
  HeaderReader header(bytes, true);
  const std::string magic = header.token("PNM magic");
  int channels = 0;
  if (magic == "P5") {
    channels = 1;
  } else if (magic == "P6") {
    channels = 3;
  } else {
    throw FormatError("unsupported PNM magic '" + magic + "' (need P5 or P6)", 0);
  }
  const std::size_t dim_offset = header.next();
  const long width = header.integer("width");
  const long height = header.integer("height");
  check_dimensions(width, height, dim_offset);
  const std::size_t max_offset = header.next();
  const long maxval = header.integer("maxval");
  if (maxval < 1 || maxval > 65535) throw FormatError("maxval out of range", max_offset);
  header.end_of_header();

  const std::size_t sample_bytes = maxval > 255 ? 2 : 1;
  const std::size_t start = header.offset();
  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height) *
                            static_cast<std::size_t>(channels);
  if (bytes.size() - start < count * sample_bytes) {
    throw FormatError("truncated PNM payload", bytes.size());
  }
  const int w = static_cast<int>(width);
  const int h = static_cast<int>(height);
  const auto* u = reinterpret_cast<const unsigned char*>(bytes.data() + start);
  std::vector<ImageGrid> planes(static_cast<std::size_t>(channels), ImageGrid(w, h));
  const double inv = 1.0 / static_cast<double>(maxval);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < channels; ++c) {
        unsigned v = *u++;
        if (sample_bytes == 2) v = (v << 8) | *u++;  // big-endian
        planes[static_cast<std::size_t>(c)](x, y) = std::min(1.0, v * inv);
      }
    }
  }
  if (channels == 1) return std::move(planes[0]);
  return to_grayscale(planes[0], planes[1], planes[2]);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("failed reading " + path.string());
  return std::move(ss).str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

ImageGrid read_image(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == 'f' || bytes[1] == 'F')) {
    return read_pfm(bytes);
  }
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '6')) {
    return read_pnm(bytes);
  }
  throw FormatError("unrecognised image format in " + path.string(), 0);
}

void write_pfm_file(const std::filesystem::path& path, const ImageGrid& grid) {
  write_file(path, write_pfm(grid));
}

}  // namespace gcmd
