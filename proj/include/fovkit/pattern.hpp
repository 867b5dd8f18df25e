#pragma once

#include "core.hpp"
#include "decomposition.hpp"

namespace fovkit {

/// All-ones Cartesian pattern (Nyquist for the rectangular FOV).
inline SamplingPattern full_pattern(GridDims dims) {
  SamplingPattern p(dims, 1);
  std::fill(p.data.begin(), p.data.end(), std::uint8_t{1});
  return p;
}

/// Reduced pattern for a decomposed FOV: even columns keep every row, odd
/// columns keep only rows on the lattice r = 0 (mod m). Column and row
/// indexing is DFT-natural, so the DC row and column are always retained.
/// An empty inner band needs no odd-column samples at all.
inline SamplingPattern reduced_pattern(const Decomposition& dec) {
  const GridDims dims = dec.S.dims;
  SamplingPattern p(dims, dec.m);
  for (int r = 0; r < dims.n_rows; ++r) {
    for (int c = 0; c < dims.n_cols; ++c) {
      if (c % 2 == 0)
        p.at(r, c) = 1;
      else if (dec.inner_interval.height > 0 && r % dec.m == 0)
        p.at(r, c) = 1;
    }
  }
  return p;
}

/// Acquired fraction of the full Cartesian grid, in (0, 1].
inline double burden(const SamplingPattern& p) {
  return static_cast<double>(p.popcount()) / static_cast<double>(p.dims.count());
}

/// Shared pattern for a multi-coil acquisition: each coil's FOV implies its
/// own reduced pattern; the densest one satisfies every coil's Nyquist need.
/// Ties go to the smallest coil index.
inline SamplingPattern pattern_for_coils(const std::vector<Decomposition>& decs) {
  if (decs.empty()) throw EmptyInput("pattern_for_coils: no decompositions");
  const GridDims dims = decs.front().S.dims;
  for (const auto& d : decs)
    if (!(d.S.dims == dims)) throw DimMismatch("pattern_for_coils: grids differ");

  SamplingPattern best = reduced_pattern(decs.front());
  std::size_t best_count = best.popcount();
  for (std::size_t j = 1; j < decs.size(); ++j) {
    SamplingPattern cand = reduced_pattern(decs[j]);
    const std::size_t n = cand.popcount();
    if (n > best_count) {
      best = std::move(cand);
      best_count = n;
    }
  }
  return best;
}

}  // namespace fovkit
