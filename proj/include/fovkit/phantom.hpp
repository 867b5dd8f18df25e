#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>

#include "core.hpp"
#include "fourier.hpp"

namespace fovkit {

// ---------------------------------------------------------------------------
// Seeded noise. xoshiro256++ with splitmix64 seeding; Gaussian deviates via
// Box-Muller. Both algorithms are fully pinned down, so a seed reproduces the
// same stream on every platform (std::normal_distribution does not).
// ---------------------------------------------------------------------------

class NoiseStream {
 public:
  explicit NoiseStream(std::uint64_t seed) {
    std::uint64_t z = seed;
    for (auto& s : state_) {
      z += 0x9e3779b97f4a7c15ULL;
      std::uint64_t x = z;
      x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
      x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
      s = x ^ (x >> 31);
    }
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // uniform in (0, 1]; never 0 so the Box-Muller log is safe
  double next_unit() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  // standard normal pair -> one complex deviate scaled by sigma
  cplx next_gaussian(double sigma) {
    const double u1 = next_unit();
    const double u2 = next_unit();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * std::numbers::pi * u2;
    return {sigma * mag * std::cos(ang), sigma * mag * std::sin(ang)};
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t state_[4] = {};
};

// ---------------------------------------------------------------------------
// Synthetic phantoms
// ---------------------------------------------------------------------------

struct Shape {
  enum class Kind { ellipse, rectangle };
  Kind kind = Kind::ellipse;
  double center_row = 0.0;
  double center_col = 0.0;
  double half_rows = 0.0;  // vertical half-axis / half-extent, px
  double half_cols = 0.0;  // horizontal half-axis / half-extent, px
  cplx amplitude{1.0, 0.0};
};

struct PhantomSpec {
  GridDims dims;
  std::vector<Shape> shapes;
  int support_margin = 0;  // px of 3x3 dilation applied to the union raster
};

namespace detail {

inline bool pixel_inside(const Shape& s, int r, int c) {
  const double dr = r - s.center_row;
  const double dc = c - s.center_col;
  if (s.kind == Shape::Kind::rectangle)
    return std::abs(dr) <= s.half_rows && std::abs(dc) <= s.half_cols;
  if (s.half_rows == 0.0 || s.half_cols == 0.0) return false;
  const double a = dr / s.half_rows;
  const double b = dc / s.half_cols;
  return a * a + b * b <= 1.0;
}

inline SupportMask dilate_box(const SupportMask& mask, int times) {
  SupportMask cur = mask;
  const int R = mask.dims.n_rows, C = mask.dims.n_cols;
  for (int k = 0; k < times; ++k) {
    SupportMask next = cur;
    for (int r = 0; r < R; ++r)
      for (int c = 0; c < C; ++c) {
        if (next.at(r, c)) continue;
        for (int dr = -1; dr <= 1 && !next.at(r, c); ++dr)
          for (int dc = -1; dc <= 1; ++dc) {
            const int rr = r + dr, cc = c + dc;
            if (rr >= 0 && rr < R && cc >= 0 && cc < C && cur.at(rr, cc)) {
              next.at(r, c) = 1;
              break;
            }
          }
      }
    cur = std::move(next);
  }
  return cur;
}

}  // namespace detail

/// Rasterize a phantom: amplitudes of overlapping shapes add, pixels are
/// included by their integer-center coordinates, and the support mask is the
/// union raster dilated by support_margin. The image is zero off the mask.
inline std::pair<ComplexImage, SupportMask> render_phantom(const PhantomSpec& spec) {
  if (spec.dims.n_rows < 2) throw InvalidGrid("phantom grid needs at least 2 rows");
  if (spec.support_margin < 0) throw Error("support margin must be non-negative");
  const int R = spec.dims.n_rows, C = spec.dims.n_cols;
  for (const auto& s : spec.shapes) {
    if (s.half_rows < 0.0 || s.half_cols < 0.0) throw ShapeOutOfBounds("negative shape extent");
    if (s.center_row - s.half_rows < 0.0 || s.center_row + s.half_rows > R - 1 ||
        s.center_col - s.half_cols < 0.0 || s.center_col + s.half_cols > C - 1)
      throw ShapeOutOfBounds("shape extends beyond the grid");
  }

  ComplexImage img(spec.dims);
  SupportMask raster(spec.dims);
  for (int r = 0; r < R; ++r)
    for (int c = 0; c < C; ++c)
      for (const auto& s : spec.shapes)
        if (detail::pixel_inside(s, r, c)) {
          img.at(r, c) += s.amplitude;
          raster.at(r, c) = 1;
        }

  return {std::move(img), detail::dilate_box(raster, spec.support_margin)};
}

// ---------------------------------------------------------------------------
// Retrospective acquisition
// ---------------------------------------------------------------------------

/// Exact simulated acquisition: per coil, the pattern-marked entries of
/// fft2(sigma_j . img), scaled so the maximum spectral magnitude across the
/// full grid of every coil is 1, then i.i.d. complex Gaussian noise with the
/// given per-component sigma. The normalization uses the full spectrum, so
/// simulations of the same image on different patterns share one scale.
inline KSpaceData simulate_kspace(const ComplexImage& img, const SamplingPattern& pattern,
                                  const std::optional<CoilSet>& coils = std::nullopt,
                                  double noise_sigma = 0.0, std::uint64_t seed = 0) {
  if (!(img.dims == pattern.dims)) throw DimMismatch("image and pattern grids differ");
  if (noise_sigma < 0.0) throw Error("noise sigma must be non-negative");
  if (coils && !(coils->dims == img.dims)) throw DimMismatch("coil grids differ from image");
  if (!all_finite(img)) throw Error("image contains non-finite values");

  const int C = coils ? coils->count() : 1;
  std::vector<ComplexImage> spectra;
  spectra.reserve(static_cast<std::size_t>(C));
  double peak = 0.0;
  for (int j = 0; j < C; ++j) {
    const ComplexImage sensed =
        coils ? hadamard(img, coils->sensitivities[static_cast<std::size_t>(j)]) : img;
    ComplexImage spec = fft2(sensed);
    for (const auto& z : spec.data) peak = std::max(peak, std::abs(z));
    spectra.push_back(std::move(spec));
  }
  const double scale = peak > 0.0 ? 1.0 / peak : 1.0;

  NoiseStream rng(seed);
  std::vector<std::vector<cplx>> samples;
  samples.reserve(spectra.size());
  for (auto& spec : spectra) {
    std::vector<cplx> s = gather(pattern, spec);
    for (auto& z : s) {
      z *= scale;
      if (noise_sigma > 0.0) z += rng.next_gaussian(noise_sigma);
    }
    samples.push_back(std::move(s));
  }
  return KSpaceData(pattern, std::move(samples));
}

// ---------------------------------------------------------------------------
// Error metrics
// ---------------------------------------------------------------------------

struct Metrics {
  double mse = 0.0;
  double max_abs_diff = 0.0;
  double rel_l2 = 0.0;
};

/// Pixelwise comparison over the mask (or the whole grid): mean |a-b|^2,
/// max |a-b|, and ||a-b|| / ||b||.
inline Metrics metrics(const ComplexImage& a, const ComplexImage& b,
                       const std::optional<SupportMask>& mask = std::nullopt) {
  if (!(a.dims == b.dims)) throw DimMismatch("metrics: grids differ");
  if (mask && !(mask->dims == a.dims)) throw DimMismatch("metrics: mask grid differs");
  Metrics m;
  double sum_sq = 0.0, ref_sq = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    if (mask && !mask->data[i]) continue;
    const double d = std::abs(a.data[i] - b.data[i]);
    sum_sq += d * d;
    ref_sq += std::norm(b.data[i]);
    m.max_abs_diff = std::max(m.max_abs_diff, d);
    ++n;
  }
  if (n == 0) return m;
  m.mse = sum_sq / static_cast<double>(n);
  m.rel_l2 = ref_sq > 0.0 ? std::sqrt(sum_sq / ref_sq) : (sum_sq > 0.0 ? HUGE_VAL : 0.0);
  return m;
}

}  // namespace fovkit
