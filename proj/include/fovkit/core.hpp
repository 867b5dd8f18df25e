#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fovkit {

using cplx = std::complex<double>;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvalidGrid : Error {
  explicit InvalidGrid(const std::string& msg) : Error(msg) {}
};
struct DimMismatch : Error {
  explicit DimMismatch(const std::string& msg) : Error(msg) {}
};
struct LengthMismatch : Error {
  explicit LengthMismatch(const std::string& msg) : Error(msg) {}
};
struct OutOfRangeFrequency : Error {
  explicit OutOfRangeFrequency(const std::string& msg) : Error(msg) {}
};
struct NonDivisorFactor : Error {
  explicit NonDivisorFactor(const std::string& msg) : Error(msg) {}
};
struct PatternMismatch : Error {
  explicit PatternMismatch(const std::string& msg) : Error(msg) {}
};
struct MultiCoilNotAllowed : Error {
  explicit MultiCoilNotAllowed(const std::string& msg) : Error(msg) {}
};
struct CoilCountMismatch : Error {
  explicit CoilCountMismatch(const std::string& msg) : Error(msg) {}
};
struct EmptyInput : Error {
  explicit EmptyInput(const std::string& msg) : Error(msg) {}
};
struct AllZeroImage : Error {
  explicit AllZeroImage(const std::string& msg) : Error(msg) {}
};
struct ShapeOutOfBounds : Error {
  explicit ShapeOutOfBounds(const std::string& msg) : Error(msg) {}
};
struct FormatError : Error {
  explicit FormatError(const std::string& msg) : Error(msg) {}
};

// ---------------------------------------------------------------------------
// Grid
// ---------------------------------------------------------------------------

/// Pixel grid extents. The width must be even: the sampling construction
/// aliases the image by exactly half the horizontal extent, which only maps
/// pixels onto pixels when n_cols/2 is an integer. Field-of-view grids have
/// at least 2 rows; single-row grids occur only as folded inner k-space
/// intermediates (decimation factor equal to the row count).
struct GridDims {
  int n_rows = 0;
  int n_cols = 0;

  GridDims() = default;
  GridDims(int rows, int cols) : n_rows(rows), n_cols(cols) {
    if (rows < 1 || cols < 2)
      throw InvalidGrid("grid must be at least 1x2, got " + std::to_string(rows) + "x" +
                        std::to_string(cols));
    if (cols % 2 != 0)
      throw InvalidGrid("grid width must be even, got " + std::to_string(cols));
  }

  std::size_t count() const { return static_cast<std::size_t>(n_rows) * n_cols; }
  bool operator==(const GridDims& o) const = default;
};

inline int positive_mod(int a, int n) {
  int r = a % n;
  return r < 0 ? r + n : r;
}

// ---------------------------------------------------------------------------
// Dense grids
// ---------------------------------------------------------------------------

/// Dense 2-D complex raster, row-major. Used for both image-domain and
/// k-space-domain grids (DFT-natural order, DC at index (0,0)).
struct ComplexImage {
  GridDims dims;
  std::vector<cplx> data;

  ComplexImage() = default;
  explicit ComplexImage(GridDims d) : dims(d), data(d.count(), cplx{0.0, 0.0}) {}
  ComplexImage(GridDims d, std::vector<cplx> values) : dims(d), data(std::move(values)) {
    if (data.size() != dims.count())
      throw LengthMismatch("image data length " + std::to_string(data.size()) +
                           " does not match grid " + std::to_string(dims.n_rows) + "x" +
                           std::to_string(dims.n_cols));
  }

  cplx& at(int r, int c) { return data[static_cast<std::size_t>(r) * dims.n_cols + c]; }
  const cplx& at(int r, int c) const {
    return data[static_cast<std::size_t>(r) * dims.n_cols + c];
  }
};

/// Binary mask over the pixel grid; 1 marks pixels inside the field of view.
struct SupportMask {
  GridDims dims;
  std::vector<std::uint8_t> data;

  SupportMask() = default;
  explicit SupportMask(GridDims d) : dims(d), data(d.count(), 0) {}
  SupportMask(GridDims d, std::vector<std::uint8_t> values) : dims(d), data(std::move(values)) {
    if (data.size() != dims.count())
      throw LengthMismatch("mask data length does not match grid");
    for (auto v : data)
      if (v > 1) throw Error("mask entries must be 0 or 1");
  }

  std::uint8_t& at(int r, int c) {
    return data[static_cast<std::size_t>(r) * dims.n_cols + c];
  }
  std::uint8_t at(int r, int c) const {
    return data[static_cast<std::size_t>(r) * dims.n_cols + c];
  }

  std::size_t popcount() const {
    std::size_t n = 0;
    for (auto v : data) n += v;
    return n;
  }
};

/// Binary mask over the full Cartesian k-space grid; 1 marks acquired
/// frequencies. Frequency indices are DFT-natural (DC at (0,0)).
/// subsample_factor_m records the vertical decimation applied on odd columns.
struct SamplingPattern {
  GridDims dims;
  std::vector<std::uint8_t> data;
  int subsample_factor_m = 1;

  SamplingPattern() = default;
  explicit SamplingPattern(GridDims d, int m = 1)
      : dims(d), data(d.count(), 0), subsample_factor_m(m) {
    if (m < 1) throw Error("subsample factor must be positive");
  }
  SamplingPattern(GridDims d, std::vector<std::uint8_t> values, int m)
      : dims(d), data(std::move(values)), subsample_factor_m(m) {
    if (data.size() != dims.count())
      throw LengthMismatch("pattern data length does not match grid");
    if (m < 1) throw Error("subsample factor must be positive");
    for (auto v : data)
      if (v > 1) throw Error("pattern entries must be 0 or 1");
  }

  std::uint8_t& at(int r, int c) {
    return data[static_cast<std::size_t>(r) * dims.n_cols + c];
  }
  std::uint8_t at(int r, int c) const {
    return data[static_cast<std::size_t>(r) * dims.n_cols + c];
  }

  std::size_t popcount() const {
    std::size_t n = 0;
    for (auto v : data) n += v;
    return n;
  }

  bool same_grid(const SamplingPattern& o) const {
    return dims == o.dims && data == o.data;
  }
};

/// Acquired k-space samples bound to a pattern. samples[j] holds coil j's
/// values at the pattern-marked locations, traversed row-major.
struct KSpaceData {
  SamplingPattern pattern;
  int coils = 1;
  std::vector<std::vector<cplx>> samples;

  KSpaceData() = default;
  KSpaceData(SamplingPattern p, std::vector<std::vector<cplx>> coil_samples)
      : pattern(std::move(p)),
        coils(static_cast<int>(coil_samples.size())),
        samples(std::move(coil_samples)) {
    if (samples.empty()) throw EmptyInput("k-space data needs at least one coil");
    const std::size_t want = pattern.popcount();
    for (const auto& s : samples) {
      if (s.size() != want)
        throw LengthMismatch("per-coil sample count " + std::to_string(s.size()) +
                             " does not match pattern popcount " + std::to_string(want));
      for (const auto& z : s)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
          throw Error("k-space samples must be finite");
    }
  }

  KSpaceData coil(int j) const {
    if (j < 0 || j >= coils) throw CoilCountMismatch("coil index out of range");
    return KSpaceData(pattern, {samples[static_cast<std::size_t>(j)]});
  }
};

/// Per-coil sensitivity maps and per-coil supports on a shared grid.
struct CoilSet {
  GridDims dims;
  std::vector<ComplexImage> sensitivities;
  std::vector<SupportMask> supports;

  CoilSet() = default;
  CoilSet(std::vector<ComplexImage> sens, std::vector<SupportMask> sup)
      : sensitivities(std::move(sens)), supports(std::move(sup)) {
    if (sensitivities.empty()) throw EmptyInput("coil set needs at least one coil");
    if (supports.size() != sensitivities.size())
      throw CoilCountMismatch("sensitivity and support counts differ");
    dims = sensitivities.front().dims;
    for (const auto& s : sensitivities) {
      if (!(s.dims == dims)) throw DimMismatch("coil sensitivities on different grids");
      for (const auto& z : s.data)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
          throw Error("coil sensitivities must be finite");
    }
    for (const auto& s : supports)
      if (!(s.dims == dims)) throw DimMismatch("coil supports on different grids");
    // somewhere inside the union support a coil must actually sense
    bool any = false;
    for (std::size_t p = 0; p < dims.count() && !any; ++p) {
      bool in_union = false;
      for (const auto& s : supports) in_union = in_union || s.data[p];
      if (!in_union) continue;
      for (const auto& s : sensitivities)
        if (std::abs(s.data[p]) > 0.0) { any = true; break; }
    }
    if (!any) throw Error("all coil sensitivities vanish on the union support");
  }

  int count() const { return static_cast<int>(sensitivities.size()); }
};

// ---------------------------------------------------------------------------
// Mask algebra
// ---------------------------------------------------------------------------

namespace detail {
template <typename Grid>
Grid shifted_u(const Grid& g, int shift) {
  Grid out = g;
  const int W = g.dims.n_cols;
  const int s = positive_mod(shift, W);
  if (s == 0) return out;
  for (int r = 0; r < g.dims.n_rows; ++r)
    for (int c = 0; c < W; ++c)
      out.data[static_cast<std::size_t>(r) * W + c] =
          g.data[static_cast<std::size_t>(r) * W + positive_mod(c - s, W)];
  return out;
}
}  // namespace detail

/// Circular shift along the horizontal axis: out(r,c) = in(r, (c-shift) mod W).
inline ComplexImage circular_shift_u(const ComplexImage& img, int shift) {
  return detail::shifted_u(img, shift);
}
inline SupportMask circular_shift_u(const SupportMask& mask, int shift) {
  return detail::shifted_u(mask, shift);
}

inline SupportMask mask_complement(const SupportMask& s) {
  SupportMask out = s;
  for (auto& v : out.data) v = static_cast<std::uint8_t>(1 - v);
  return out;
}

inline ComplexImage hadamard(const ComplexImage& a, const ComplexImage& b) {
  if (!(a.dims == b.dims)) throw DimMismatch("hadamard: grids differ");
  ComplexImage out = a;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] *= b.data[i];
  return out;
}

inline ComplexImage hadamard(const ComplexImage& a, const SupportMask& b) {
  if (!(a.dims == b.dims)) throw DimMismatch("hadamard: grids differ");
  ComplexImage out = a;
  for (std::size_t i = 0; i < out.data.size(); ++i)
    if (!b.data[i]) out.data[i] = cplx{0.0, 0.0};
  return out;
}

/// Row-major extraction of the pixels marked by S.
inline std::vector<cplx> gather(const SupportMask& s, const ComplexImage& img) {
  if (!(s.dims == img.dims)) throw DimMismatch("gather: grids differ");
  std::vector<cplx> out;
  out.reserve(s.popcount());
  for (std::size_t i = 0; i < s.data.size(); ++i)
    if (s.data[i]) out.push_back(img.data[i]);
  return out;
}

/// Adjoint of gather: place vec back at the marked pixels, zero elsewhere.
inline ComplexImage scatter(const SupportMask& s, const std::vector<cplx>& vec) {
  if (vec.size() != s.popcount())
    throw LengthMismatch("scatter: vector length " + std::to_string(vec.size()) +
                         " does not match mask popcount " + std::to_string(s.popcount()));
  ComplexImage out(s.dims);
  std::size_t t = 0;
  for (std::size_t i = 0; i < s.data.size(); ++i)
    if (s.data[i]) out.data[i] = vec[t++];
  return out;
}

// Same traversal contract for sampling patterns (k-space side).
inline std::vector<cplx> gather(const SamplingPattern& p, const ComplexImage& grid) {
  if (!(p.dims == grid.dims)) throw DimMismatch("gather: grids differ");
  std::vector<cplx> out;
  out.reserve(p.popcount());
  for (std::size_t i = 0; i < p.data.size(); ++i)
    if (p.data[i]) out.push_back(grid.data[i]);
  return out;
}

inline ComplexImage scatter(const SamplingPattern& p, const std::vector<cplx>& vec) {
  if (vec.size() != p.popcount())
    throw LengthMismatch("scatter: vector length does not match pattern popcount");
  ComplexImage out(p.dims);
  std::size_t t = 0;
  for (std::size_t i = 0; i < p.data.size(); ++i)
    if (p.data[i]) out.data[i] = vec[t++];
  return out;
}

// ---------------------------------------------------------------------------
// Small shared numerics
// ---------------------------------------------------------------------------

inline double norm2(const std::vector<cplx>& v) {
  double acc = 0.0;
  for (const auto& z : v) acc += std::norm(z);
  return std::sqrt(acc);
}

inline cplx dot(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  if (a.size() != b.size()) throw LengthMismatch("dot: lengths differ");
  cplx acc{0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

inline bool all_finite(const ComplexImage& img) {
  for (const auto& z : img.data)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

}  // namespace fovkit
