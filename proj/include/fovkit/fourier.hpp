#pragma once

#include <cmath>
#include <numbers>
#include <set>
#include <utility>

#include "core.hpp"
#include "threading.hpp"

namespace fovkit {

// ---------------------------------------------------------------------------
// 1-D FFT engine: iterative radix-2 for power-of-two lengths, Bluestein's
// chirp-z rewrite for everything else. Both are exact to rounding, which is
// all the reconstruction algebra requires. sign = -1 is the forward kernel,
// +1 the (unnormalized) inverse.
// ---------------------------------------------------------------------------

namespace detail {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline void fft_pow2(std::vector<cplx>& a, int sign) {
  const std::size_t n = a.size();
  if (n <= 1) return;
  // bit-reversal permutation
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
    const cplx wlen{std::cos(ang), std::sin(ang)};
    for (std::size_t i = 0; i < n; i += len) {
      cplx w{1.0, 0.0};
      for (std::size_t k = 0; k < len / 2; ++k) {
        const cplx u = a[i + k];
        const cplx v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

// chirp e^{sign * i pi k^2 / n}; k^2 taken mod 2n keeps the phase argument small
inline cplx chirp(std::size_t k, std::size_t n, int sign) {
  const std::size_t k2 = (k * k) % (2 * n);
  const double ang = sign * std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n);
  return {std::cos(ang), std::sin(ang)};
}

inline void fft_bluestein(std::vector<cplx>& a, int sign) {
  const std::size_t n = a.size();
  std::size_t m = 1;
  while (m < 2 * n - 1) m <<= 1;
  std::vector<cplx> x(m, cplx{0.0, 0.0});
  std::vector<cplx> y(m, cplx{0.0, 0.0});
  for (std::size_t k = 0; k < n; ++k) {
    const cplx c = chirp(k, n, sign);
    x[k] = a[k] * c;
    y[k] = std::conj(c);
    if (k != 0) y[m - k] = std::conj(c);
  }
  fft_pow2(x, -1);
  fft_pow2(y, -1);
  for (std::size_t i = 0; i < m; ++i) x[i] *= y[i];
  fft_pow2(x, +1);
  const double inv_m = 1.0 / static_cast<double>(m);
  for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * inv_m * chirp(k, n, sign);
}

inline void fft_1d(std::vector<cplx>& a, int sign) {
  if (is_pow2(a.size()))
    fft_pow2(a, sign);
  else
    fft_bluestein(a, sign);
}

// rows pass then columns pass; each line is transformed independently
inline ComplexImage fft2_kernel(const ComplexImage& img, int sign) {
  const int R = img.dims.n_rows, C = img.dims.n_cols;
  ComplexImage out = img;
  parallel_for(R, [&](int r) {
    std::vector<cplx> row(out.data.begin() + static_cast<std::size_t>(r) * C,
                          out.data.begin() + static_cast<std::size_t>(r + 1) * C);
    fft_1d(row, sign);
    std::copy(row.begin(), row.end(), out.data.begin() + static_cast<std::size_t>(r) * C);
  });
  parallel_for(C, [&](int c) {
    std::vector<cplx> col(static_cast<std::size_t>(R));
    for (int r = 0; r < R; ++r) col[static_cast<std::size_t>(r)] = out.at(r, c);
    fft_1d(col, sign);
    for (int r = 0; r < R; ++r) out.at(r, c) = col[static_cast<std::size_t>(r)];
  });
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Uniform transforms. fft2 applies the unnormalized forward kernel
// e^{-i2pi(k_r r / R + k_c c / C)}; ifft2 carries the 1/(R C) factor.
// ---------------------------------------------------------------------------

inline ComplexImage fft2(const ComplexImage& img) { return detail::fft2_kernel(img, -1); }

inline ComplexImage ifft2(const ComplexImage& spec) {
  ComplexImage out = detail::fft2_kernel(spec, +1);
  const double scale = 1.0 / static_cast<double>(spec.dims.count());
  for (auto& z : out.data) z *= scale;
  return out;
}

// ---------------------------------------------------------------------------
// On-grid frequency lists and the brute-force non-uniform DFT pair
// ---------------------------------------------------------------------------

/// Ordered list of grid frequency indices (DFT-natural, duplicates forbidden).
struct FreqList {
  struct Freq {
    int k_row = 0;
    int k_col = 0;
    bool operator==(const Freq&) const = default;
  };
  std::vector<Freq> entries;

  FreqList() = default;
  FreqList(std::vector<Freq> freqs, GridDims dims) : entries(std::move(freqs)) {
    std::set<std::pair<int, int>> seen;
    for (const auto& f : entries) {
      if (f.k_row < 0 || f.k_row >= dims.n_rows || f.k_col < 0 || f.k_col >= dims.n_cols)
        throw OutOfRangeFrequency("frequency (" + std::to_string(f.k_row) + "," +
                                  std::to_string(f.k_col) + ") outside grid");
      if (!seen.insert({f.k_row, f.k_col}).second)
        throw OutOfRangeFrequency("duplicate frequency in list");
    }
  }

  std::size_t size() const { return entries.size(); }
};

/// Full grid in row-major frequency order.
inline FreqList full_grid_freqs(GridDims dims) {
  std::vector<FreqList::Freq> fs;
  fs.reserve(dims.count());
  for (int kr = 0; kr < dims.n_rows; ++kr)
    for (int kc = 0; kc < dims.n_cols; ++kc) fs.push_back({kr, kc});
  return FreqList(std::move(fs), dims);
}

/// Marked entries of a sampling pattern, row-major.
inline FreqList pattern_freqs(const SamplingPattern& p) {
  std::vector<FreqList::Freq> fs;
  fs.reserve(p.popcount());
  for (int kr = 0; kr < p.dims.n_rows; ++kr)
    for (int kc = 0; kc < p.dims.n_cols; ++kc)
      if (p.at(kr, kc)) fs.push_back({kr, kc});
  return FreqList(std::move(fs), p.dims);
}

/// Direct O(pixels * freqs) summation. Desk-scale reference path; the fast
/// route for pattern-marked frequencies is fft2 followed by gather.
inline std::vector<cplx> nudft_forward(const ComplexImage& img, const FreqList& freqs) {
  const int R = img.dims.n_rows, C = img.dims.n_cols;
  for (const auto& f : freqs.entries)
    if (f.k_row < 0 || f.k_row >= R || f.k_col < 0 || f.k_col >= C)
      throw OutOfRangeFrequency("frequency outside image grid");
  std::vector<cplx> out(freqs.size());
  parallel_for(static_cast<int>(freqs.size()), [&](int t) {
    const auto& f = freqs.entries[static_cast<std::size_t>(t)];
    cplx acc{0.0, 0.0};
    for (int r = 0; r < R; ++r)
      for (int c = 0; c < C; ++c) {
        const double ang =
            -2.0 * std::numbers::pi *
            (static_cast<double>(f.k_row) * r / R + static_cast<double>(f.k_col) * c / C);
        acc += img.at(r, c) * cplx{std::cos(ang), std::sin(ang)};
      }
    out[static_cast<std::size_t>(t)] = acc;
  });
  return out;
}

/// Conjugate transpose of nudft_forward.
inline ComplexImage nudft_adjoint(const std::vector<cplx>& samples, const FreqList& freqs,
                                  GridDims dims) {
  if (samples.size() != freqs.size())
    throw LengthMismatch("nudft_adjoint: sample and frequency counts differ");
  for (const auto& f : freqs.entries)
    if (f.k_row < 0 || f.k_row >= dims.n_rows || f.k_col < 0 || f.k_col >= dims.n_cols)
      throw OutOfRangeFrequency("frequency outside target grid");
  const int R = dims.n_rows, C = dims.n_cols;
  ComplexImage out(dims);
  parallel_for(R, [&](int r) {
    for (int c = 0; c < C; ++c) {
      cplx acc{0.0, 0.0};
      for (std::size_t t = 0; t < freqs.size(); ++t) {
        const auto& f = freqs.entries[t];
        const double ang =
            2.0 * std::numbers::pi *
            (static_cast<double>(f.k_row) * r / R + static_cast<double>(f.k_col) * c / C);
        acc += samples[t] * cplx{std::cos(ang), std::sin(ang)};
      }
      out.at(r, c) = acc;
    }
  });
  return out;
}

// ---------------------------------------------------------------------------
// Exact spectrum on the vertically decimated grid
// ---------------------------------------------------------------------------

/// Evaluate F{img}(m*t, k_c) for t in [0, n_rows/m) exactly: summing rows with
/// period n_rows/m leaves the decimated spectral rows untouched, so the result
/// is the 2-D FFT of the folded (n_rows/m) x n_cols image.
inline ComplexImage spectrum_on_inner_grid(const ComplexImage& img, int m) {
  const int R = img.dims.n_rows, C = img.dims.n_cols;
  if (m < 1 || R % m != 0)
    throw NonDivisorFactor("decimation factor " + std::to_string(m) +
                           " does not divide row count " + std::to_string(R));
  if (m == 1) return fft2(img);
  const int P = R / m;
  ComplexImage folded(GridDims(P, C));
  for (int r = 0; r < R; ++r)
    for (int c = 0; c < C; ++c) folded.at(r % P, c) += img.at(r, c);
  return fft2(folded);
}

}  // namespace fovkit
