#pragma once

#include <algorithm>
#include <set>

#include "core.hpp"

namespace fovkit {

/// A circular band of rows: start_row, start_row+1, ... (mod n_rows),
/// height rows in total. height == 0 denotes the empty band.
struct RowInterval {
  int start_row = 0;
  int height = 0;

  bool contains(int r, int n_rows) const {
    if (height == 0) return false;
    const int off = positive_mod(r - start_row, n_rows);
    return off < height;
  }
};

/// Split of a field of view into the row band that collides with its
/// half-width horizontal alias (inner) and the alias-free remainder (outer),
/// plus the vertical decimation factor m the inner band admits.
struct Decomposition {
  SupportMask S;
  SupportMask S_inner;
  SupportMask S_outer;
  RowInterval inner_interval;
  int m = 1;
};

/// Rows where the support collides with itself under a half-width circular
/// shift. Row r is listed iff some pixel and its half-width alias partner are
/// both inside the FOV on that row.
inline std::set<int> overlap_rows(const SupportMask& s) {
  const int R = s.dims.n_rows, W = s.dims.n_cols;
  const int half = W / 2;
  std::set<int> rows;
  for (int r = 0; r < R; ++r) {
    for (int c = 0; c < W; ++c) {
      if (s.at(r, c) && s.at(r, positive_mod(c - half, W))) {
        rows.insert(r);
        break;
      }
    }
  }
  return rows;
}

namespace detail {

// Minimal-height circular interval covering the given row set; among equal
// heights the smallest start row wins. Found as the complement of the widest
// circular gap between consecutive covered rows.
inline RowInterval minimal_covering_interval(const std::set<int>& rows, int n_rows) {
  if (rows.empty()) return {0, 0};
  std::vector<int> sorted(rows.begin(), rows.end());
  const int K = static_cast<int>(sorted.size());
  if (K == n_rows) return {0, n_rows};
  int best_gap = -1;
  int best_start = 0;
  for (int i = 0; i < K; ++i) {
    const int cur = sorted[static_cast<std::size_t>(i)];
    const int next = sorted[static_cast<std::size_t>((i + 1) % K)];
    const int gap = positive_mod(next - cur, n_rows) - 1 + (K == 1 ? n_rows : 0);
    const int start = next;  // interval begins just after the gap
    if (gap > best_gap || (gap == best_gap && start < best_start)) {
      best_gap = gap;
      best_start = start;
    }
  }
  return {best_start, n_rows - best_gap};
}

inline int largest_admissible_factor(int n_rows, int inner_height) {
  const int need = std::max(inner_height, 1);
  // largest divisor m of n_rows with n_rows/m >= need
  for (int p = need; p <= n_rows; ++p)
    if (n_rows % p == 0) return n_rows / p;
  return 1;
}

}  // namespace detail

/// Decompose a FOV: the inner band is the minimal circular row interval
/// covering every self-overlap row, the outer region is everything else,
/// and m is the largest divisor of n_rows whose decimated grid still has at
/// least max(H_inner, 1) rows.
inline Decomposition decompose(const SupportMask& s) {
  if (s.dims.n_cols % 2 != 0) throw InvalidGrid("decompose needs an even grid width");
  const int R = s.dims.n_rows;

  const std::set<int> rows = overlap_rows(s);
  const RowInterval interval = detail::minimal_covering_interval(rows, R);

  Decomposition dec;
  dec.S = s;
  dec.S_inner = SupportMask(s.dims);
  dec.S_outer = SupportMask(s.dims);
  for (int r = 0; r < R; ++r) {
    const bool inner = interval.contains(r, R);
    for (int c = 0; c < s.dims.n_cols; ++c) {
      if (s.at(r, c)) (inner ? dec.S_inner : dec.S_outer).at(r, c) = 1;
    }
  }
  dec.inner_interval = interval;
  dec.m = detail::largest_admissible_factor(R, interval.height);
  return dec;
}

}  // namespace fovkit
