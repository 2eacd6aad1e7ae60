// File formats: RFC-4180-style CSV with a header row, 16-bit binary PGM for
// images, plain/raw PBM for bitmap objects, and atomic whole-file writes.
#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tlgi/grid.hpp"

namespace tlgi::io {

/// Shortest round-trip decimal form; deterministic across runs.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// Writes the payload through a temp file in the same directory plus rename,
/// so readers never observe a partial file.
inline void atomic_write(const std::filesystem::path& path, std::string_view payload) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

class CsvBuilder {
 public:
  explicit CsvBuilder(std::initializer_list<std::string_view> header) { row(header); }

  void row(std::initializer_list<std::string_view> cells) {
    bool first = true;
    for (const auto& c : cells) {
      if (!first) text_ += ',';
      text_ += c;
      first = false;
    }
    text_ += "\r\n";
  }

  const std::string& str() const { return text_; }

 private:
  std::string text_;
};

/// 16-bit binary PGM (P5, maxval 65535, big-endian samples) from values
/// already normalized to [0, 1].
inline std::string pgm16_bytes(const Grid<double>& values01) {
  std::string out = "P5\n" + std::to_string(values01.width()) + " " +
                    std::to_string(values01.height()) + "\n65535\n";
  out.reserve(out.size() + values01.size() * 2);
  for (int y = 0; y < values01.height(); ++y)
    for (int x = 0; x < values01.width(); ++x) {
      double v = values01(x, y);
      v = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
      const auto q = static_cast<std::uint16_t>(std::lround(v * 65535.0));
      out += static_cast<char>(q >> 8);
      out += static_cast<char>(q & 0xFF);
    }
  return out;
}

namespace detail {

inline void skip_pbm_separators(std::string_view text, std::size_t& pos) {
  while (pos < text.size()) {
    const char c = text[pos];
    if (c == '#') {
      while (pos < text.size() && text[pos] != '\n') ++pos;
    } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      ++pos;
    } else {
      break;
    }
  }
}

inline int read_pbm_int(std::string_view text, std::size_t& pos, const char* what) {
  skip_pbm_separators(text, pos);
  int value = 0;
  bool any = false;
  while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
    value = value * 10 + (text[pos] - '0');
    ++pos;
    any = true;
    if (value > 1 << 20) throw std::runtime_error(std::string("pbm: absurd ") + what);
  }
  if (!any) throw std::runtime_error(std::string("pbm: missing ") + what);
  return value;
}

}  // namespace detail

/// Parses a portable bitmap, plain (P1) or raw (P4); any set bit maps to 1.
inline std::vector<std::vector<std::uint8_t>> parse_pbm(std::string_view text) {
  if (text.size() < 2 || text[0] != 'P' || (text[1] != '1' && text[1] != '4'))
    throw std::runtime_error("pbm: not a P1/P4 portable bitmap");
  const bool raw = text[1] == '4';
  std::size_t pos = 2;
  const int w = detail::read_pbm_int(text, pos, "width");
  const int h = detail::read_pbm_int(text, pos, "height");
  if (w < 1 || h < 1) throw std::runtime_error("pbm: non-positive dimensions");
  std::vector<std::vector<std::uint8_t>> rows(static_cast<std::size_t>(h),
                                              std::vector<std::uint8_t>(static_cast<std::size_t>(w)));
  if (raw) {
    if (pos >= text.size()) throw std::runtime_error("pbm: truncated header");
    ++pos;  // exactly one whitespace byte after the height
    const std::size_t row_bytes = (static_cast<std::size_t>(w) + 7) / 8;
    if (text.size() - pos < row_bytes * h) throw std::runtime_error("pbm: truncated raster");
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const auto byte = static_cast<std::uint8_t>(text[pos + y * row_bytes + x / 8]);
        rows[y][x] = (byte >> (7 - x % 8)) & 1;
      }
  } else {
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        detail::skip_pbm_separators(text, pos);
        if (pos >= text.size()) throw std::runtime_error("pbm: truncated raster");
        const char c = text[pos++];
        if (c != '0' && c != '1') throw std::runtime_error("pbm: invalid raster character");
        rows[y][x] = c == '1' ? 1 : 0;
      }
  }
  return rows;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return text;
}

inline std::vector<std::vector<std::uint8_t>> load_pbm(const std::filesystem::path& path) {
  return parse_pbm(read_file(path));
}

}  // namespace tlgi::io
