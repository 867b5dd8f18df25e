#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <optional>
#include <string>

#include "core.hpp"

namespace fovkit {

// ---------------------------------------------------------------------------
// CFOV1: dense complex rasters.
//   8-byte magic "CFOV\x01\x00\x00\x00",
//   little-endian u32 n_rows, n_cols, n_coils, flags (bit0: is_kspace),
//   then per coil the row-major float64 interleaved re/im payload.
// ---------------------------------------------------------------------------

constexpr std::uint32_t kCfovFlagKSpace = 1u;

struct CfovFile {
  std::uint32_t flags = 0;
  std::vector<ComplexImage> coils;

  GridDims dims() const { return coils.front().dims; }
  bool is_kspace() const { return (flags & kCfovFlagKSpace) != 0; }
};

namespace detail {

inline void put_u32_le(std::ostream& os, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                              static_cast<unsigned char>((v >> 8) & 0xff),
                              static_cast<unsigned char>((v >> 16) & 0xff),
                              static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

inline std::uint32_t get_u32_le(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw FormatError("truncated CFOV header");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

inline void put_f64_le(std::ostream& os, double v) {
  std::uint64_t u;
  std::memcpy(&u, &v, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((u >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 8);
}

inline double get_f64_le(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  if (!is) throw FormatError("truncated CFOV payload");
  std::uint64_t u = 0;
  for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &u, 8);
  return v;
}

}  // namespace detail

inline void write_cfov(const std::string& path, const std::vector<ComplexImage>& coils,
                       std::uint32_t flags = 0) {
  if (coils.empty()) throw EmptyInput("write_cfov: no coil images");
  const GridDims dims = coils.front().dims;
  for (const auto& c : coils)
    if (!(c.dims == dims)) throw DimMismatch("write_cfov: coil grids differ");

  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot open for writing: " + path);
  static const char magic[8] = {'C', 'F', 'O', 'V', 1, 0, 0, 0};
  os.write(magic, 8);
  detail::put_u32_le(os, static_cast<std::uint32_t>(dims.n_rows));
  detail::put_u32_le(os, static_cast<std::uint32_t>(dims.n_cols));
  detail::put_u32_le(os, static_cast<std::uint32_t>(coils.size()));
  detail::put_u32_le(os, flags);
  for (const auto& c : coils)
    for (const auto& z : c.data) {
      detail::put_f64_le(os, z.real());
      detail::put_f64_le(os, z.imag());
    }
  if (!os) throw FormatError("write failed: " + path);
}

inline CfovFile read_cfov(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open: " + path);
  char magic[8];
  is.read(magic, 8);
  static const char want[8] = {'C', 'F', 'O', 'V', 1, 0, 0, 0};
  if (!is || std::memcmp(magic, want, 8) != 0)
    throw FormatError("not a CFOV1 file: " + path);
  const std::uint32_t rows = detail::get_u32_le(is);
  const std::uint32_t cols = detail::get_u32_le(is);
  const std::uint32_t n_coils = detail::get_u32_le(is);
  const std::uint32_t flags = detail::get_u32_le(is);
  if (rows < 1 || cols < 2 || n_coils < 1)
    throw FormatError("bad CFOV dimensions in " + path);

  CfovFile file;
  file.flags = flags;
  GridDims dims;
  try {
    dims = GridDims(static_cast<int>(rows), static_cast<int>(cols));
  } catch (const InvalidGrid& e) {
    throw FormatError(std::string("bad CFOV grid: ") + e.what());
  }
  for (std::uint32_t j = 0; j < n_coils; ++j) {
    ComplexImage img(dims);
    for (auto& z : img.data) {
      const double re = detail::get_f64_le(is);
      const double im = detail::get_f64_le(is);
      z = cplx{re, im};
    }
    file.coils.push_back(std::move(img));
  }
  return file;
}

// ---------------------------------------------------------------------------
// PBM (plain P1): binary masks and sampling patterns; 1 = inside / acquired.
// Patterns carry the decimation factor as a "# m=<n>" header comment.
// ---------------------------------------------------------------------------

namespace detail {

inline void write_pbm_grid(std::ostream& os, GridDims dims,
                           const std::vector<std::uint8_t>& data) {
  os << dims.n_cols << " " << dims.n_rows << "\n";
  for (int r = 0; r < dims.n_rows; ++r) {
    for (int c = 0; c < dims.n_cols; ++c) {
      os << static_cast<int>(data[static_cast<std::size_t>(r) * dims.n_cols + c]);
      if ((c + 1) % 64 == 0 && c + 1 < dims.n_cols) os << "\n";
    }
    os << "\n";
  }
}

struct PbmContent {
  GridDims dims;
  std::vector<std::uint8_t> data;
  std::optional<int> m;
};

inline PbmContent read_pbm_grid(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open: " + path);
  std::string magic;
  is >> magic;
  if (magic != "P1") throw FormatError("not a plain PBM (P1) file: " + path);

  std::optional<int> m;
  auto skip_ws_and_comments = [&] {
    while (true) {
      const int ch = is.peek();
      if (ch == '#') {
        std::string line;
        std::getline(is, line);
        int parsed = 0;
        if (std::sscanf(line.c_str(), "# m=%d", &parsed) == 1 && parsed >= 1) m = parsed;
      } else if (std::isspace(ch)) {
        is.get();
      } else {
        break;
      }
    }
  };

  skip_ws_and_comments();
  int cols = 0, rows = 0;
  is >> cols;
  skip_ws_and_comments();
  is >> rows;
  if (!is || rows < 1 || cols < 1) throw FormatError("bad PBM dimensions in " + path);

  PbmContent out;
  try {
    out.dims = GridDims(rows, cols);
  } catch (const InvalidGrid& e) {
    throw FormatError(std::string("bad PBM grid: ") + e.what());
  }
  out.m = m;
  out.data.reserve(out.dims.count());
  while (out.data.size() < out.dims.count()) {
    const int ch = is.get();
    if (ch == EOF) throw FormatError("truncated PBM payload in " + path);
    if (ch == '0' || ch == '1')
      out.data.push_back(static_cast<std::uint8_t>(ch - '0'));
    else if (ch == '#') {
      std::string line;
      std::getline(is, line);
    } else if (!std::isspace(ch)) {
      throw FormatError("unexpected character in PBM payload of " + path);
    }
  }
  return out;
}

}  // namespace detail

inline void write_pbm(const std::string& path, const SupportMask& mask) {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot open for writing: " + path);
  os << "P1\n";
  detail::write_pbm_grid(os, mask.dims, mask.data);
  if (!os) throw FormatError("write failed: " + path);
}

inline void write_pbm(const std::string& path, const SamplingPattern& pattern) {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot open for writing: " + path);
  os << "P1\n# m=" << pattern.subsample_factor_m << "\n";
  detail::write_pbm_grid(os, pattern.dims, pattern.data);
  if (!os) throw FormatError("write failed: " + path);
}

inline SupportMask read_pbm_mask(const std::string& path) {
  auto content = detail::read_pbm_grid(path);
  return SupportMask(content.dims, std::move(content.data));
}

inline SamplingPattern read_pbm_pattern(const std::string& path) {
  auto content = detail::read_pbm_grid(path);
  return SamplingPattern(content.dims, std::move(content.data), content.m.value_or(1));
}

// ---------------------------------------------------------------------------
// PGM (binary P5, 16-bit big-endian): magnitude exports. Without a scale the
// image is min-max stretched; with one, |x|*scale is clipped to [0,1].
// ---------------------------------------------------------------------------

inline void write_pgm16(const std::string& path, const ComplexImage& img,
                        std::optional<double> scale = std::nullopt) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot open for writing: " + path);
  os << "P5\n" << img.dims.n_cols << " " << img.dims.n_rows << "\n65535\n";

  std::vector<double> mag(img.data.size());
  for (std::size_t i = 0; i < mag.size(); ++i) mag[i] = std::abs(img.data[i]);

  double lo = 0.0, span = 1.0;
  if (!scale) {
    lo = *std::min_element(mag.begin(), mag.end());
    const double hi = *std::max_element(mag.begin(), mag.end());
    span = hi > lo ? hi - lo : 1.0;
  }
  for (double v : mag) {
    const double unit = scale ? std::clamp(v * *scale, 0.0, 1.0) : (v - lo) / span;
    const auto q = static_cast<std::uint16_t>(std::lround(unit * 65535.0));
    const unsigned char b[2] = {static_cast<unsigned char>(q >> 8),
                                static_cast<unsigned char>(q & 0xff)};
    os.write(reinterpret_cast<const char*>(b), 2);
  }
  if (!os) throw FormatError("write failed: " + path);
}

}  // namespace fovkit
