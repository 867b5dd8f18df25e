#pragma once

#include "coils.hpp"
#include "core.hpp"
#include "decomposition.hpp"
#include "fourier.hpp"
#include "pattern.hpp"

namespace fovkit {

namespace detail {

// zero-filled full-grid spectrum with the acquired samples in place
inline ComplexImage place_samples(const SamplingPattern& pattern,
                                  const std::vector<cplx>& samples) {
  return scatter(pattern, samples);
}

inline void require_even_columns(const SamplingPattern& pattern) {
  for (int r = 0; r < pattern.dims.n_rows; ++r)
    for (int c = 0; c < pattern.dims.n_cols; c += 2)
      if (!pattern.at(r, c))
        throw PatternMismatch("pattern is missing even-column samples");
}

// Outer image from the even columns alone. Zeroing the odd spectral columns
// halves the amplitude of (image + half-width alias); on alias-free rows the
// factor 2 restores the image exactly.
inline ComplexImage outer_from_spectrum(const ComplexImage& spec_full,
                                        const Decomposition& dec) {
  ComplexImage even_spec = spec_full;
  for (int r = 0; r < even_spec.dims.n_rows; ++r)
    for (int c = 1; c < even_spec.dims.n_cols; c += 2) even_spec.at(r, c) = cplx{0.0, 0.0};
  ComplexImage out = ifft2(even_spec);
  for (auto& z : out.data) z *= 2.0;
  return hadamard(out, dec.S_outer);
}

// Shared single-coil reconstruction core. m_used may be smaller than dec.m
// (multi-coil acquisitions share the densest pattern); exactness only needs
// n_rows/m_used >= H_inner, which the caller guarantees.
inline ComplexImage direct_core(const ComplexImage& spec_full, const Decomposition& dec,
                                int m_used) {
  const int R = dec.S.dims.n_rows, C = dec.S.dims.n_cols;
  ComplexImage outer = outer_from_spectrum(spec_full, dec);
  if (dec.inner_interval.height == 0) return hadamard(outer, dec.S);

  const int P = R / m_used;
  // acquired spectrum restricted to the inner grid rows (every m_used-th row)
  ComplexImage inner_spec(GridDims(P, C));
  for (int t = 0; t < P; ++t)
    for (int c = 0; c < C; ++c) inner_spec.at(t, c) = spec_full.at(t * m_used, c);

  const ComplexImage outer_spec = spectrum_on_inner_grid(outer, m_used);
  for (std::size_t i = 0; i < inner_spec.data.size(); ++i)
    inner_spec.data[i] -= outer_spec.data[i];

  // the inner image arrives folded with vertical period P; the band height is
  // at most P, so each band row owns a distinct folded row
  const ComplexImage folded = ifft2(inner_spec);
  ComplexImage total = outer;
  for (int i = 0; i < dec.inner_interval.height; ++i) {
    const int r = positive_mod(dec.inner_interval.start_row + i, R);
    for (int c = 0; c < C; ++c) total.at(r, c) += folded.at(r % P, c);
  }
  return hadamard(total, dec.S);
}

}  // namespace detail

/// Reconstruct the outer region from the even-column samples.
inline ComplexImage recon_outer(const KSpaceData& data, const Decomposition& dec) {
  if (data.coils != 1)
    throw MultiCoilNotAllowed("recon_outer is single-coil; use recon_direct_parallel");
  if (!(data.pattern.dims == dec.S.dims)) throw DimMismatch("data grid differs from FOV grid");
  detail::require_even_columns(data.pattern);
  const ComplexImage spec = detail::place_samples(data.pattern, data.samples.front());
  return detail::outer_from_spectrum(spec, dec);
}

/// Direct (non-iterative) reconstruction from the reduced pattern:
///   1. outer image from the even columns,
///   2. acquired samples assembled on the decimated inner grid,
///   3. the outer image's inner-grid spectrum subtracted,
///   4. inverse FFT of the remainder, unfolded into the inner row band,
///   5. outer + inner, masked to the FOV.
inline ComplexImage recon_direct(const KSpaceData& data, const Decomposition& dec) {
  if (data.coils != 1)
    throw MultiCoilNotAllowed("recon_direct is single-coil; use recon_direct_parallel");
  const SamplingPattern expected = reduced_pattern(dec);
  if (!data.pattern.same_grid(expected) ||
      data.pattern.subsample_factor_m != expected.subsample_factor_m)
    throw PatternMismatch("data pattern is not the reduced pattern of this decomposition");
  const ComplexImage spec = detail::place_samples(data.pattern, data.samples.front());
  return detail::direct_core(spec, dec, dec.m);
}

/// Multi-coil direct workflow: every coil is acquired on the shared densest
/// pattern, reconstructed with its own FOV decomposition at the shared
/// decimation factor, masked to its own support, and Roemer-combined.
inline ComplexImage recon_direct_parallel(const KSpaceData& data,
                                          const std::vector<Decomposition>& decs,
                                          const CoilSet& coils) {
  if (static_cast<int>(decs.size()) != data.coils || coils.count() != data.coils)
    throw CoilCountMismatch("coil counts of data, decompositions, and coil set differ");
  const SamplingPattern shared = pattern_for_coils(decs);
  if (!data.pattern.same_grid(shared) ||
      data.pattern.subsample_factor_m != shared.subsample_factor_m)
    throw PatternMismatch("data pattern is not the shared pattern of these FOVs");

  const int m_shared = shared.subsample_factor_m;
  std::vector<ComplexImage> images;
  images.reserve(decs.size());
  for (int j = 0; j < data.coils; ++j) {
    const ComplexImage spec =
        detail::place_samples(data.pattern, data.samples[static_cast<std::size_t>(j)]);
    images.push_back(detail::direct_core(spec, decs[static_cast<std::size_t>(j)], m_shared));
  }
  return roemer_combine(images, coils);
}

}  // namespace fovkit
