#pragma once

#include <algorithm>
#include <cmath>

#include "core.hpp"

namespace fovkit {

namespace detail {

// separable box mean of odd width, borders clamped (constants pass through)
inline ComplexImage box_smooth(const ComplexImage& img, int width) {
  const int R = img.dims.n_rows, C = img.dims.n_cols;
  const int half = width / 2;
  ComplexImage tmp(img.dims), out(img.dims);
  for (int r = 0; r < R; ++r)
    for (int c = 0; c < C; ++c) {
      cplx acc{0.0, 0.0};
      for (int k = -half; k <= half; ++k)
        acc += img.at(r, std::clamp(c + k, 0, C - 1));
      tmp.at(r, c) = acc / static_cast<double>(width);
    }
  for (int r = 0; r < R; ++r)
    for (int c = 0; c < C; ++c) {
      cplx acc{0.0, 0.0};
      for (int k = -half; k <= half; ++k)
        acc += tmp.at(std::clamp(r + k, 0, R - 1), c);
      out.at(r, c) = acc / static_cast<double>(width);
    }
  return out;
}

}  // namespace detail

/// Per-coil support from signal intensity: pixels at or above the given
/// fraction of the image's peak magnitude.
inline SupportMask coil_support(const ComplexImage& coil_image, double theta = 0.05) {
  if (theta <= 0.0 || theta >= 1.0) throw Error("support threshold must lie in (0,1)");
  double peak = 0.0;
  for (const auto& z : coil_image.data) peak = std::max(peak, std::abs(z));
  if (peak == 0.0) throw AllZeroImage("coil_support: image is identically zero");
  SupportMask mask(coil_image.dims);
  for (std::size_t i = 0; i < mask.data.size(); ++i)
    mask.data[i] = std::abs(coil_image.data[i]) >= theta * peak ? 1 : 0;
  return mask;
}

/// Smoothed self-normalized sensitivity estimate: each coil image is box
/// filtered, then divided by the root-sum-of-squares over coils. The RSS is
/// floored at 1e-12 of its peak so empty pixels divide cleanly to zero.
/// Per-coil supports come from intensity thresholding of the raw images.
inline CoilSet estimate_sensitivities(const std::vector<ComplexImage>& coil_images,
                                      int smooth_width = 5, double support_theta = 0.05) {
  if (coil_images.empty()) throw EmptyInput("estimate_sensitivities: no coil images");
  const GridDims dims = coil_images.front().dims;
  for (const auto& img : coil_images)
    if (!(img.dims == dims)) throw DimMismatch("coil images on different grids");

  std::vector<ComplexImage> smoothed;
  smoothed.reserve(coil_images.size());
  for (const auto& img : coil_images) smoothed.push_back(detail::box_smooth(img, smooth_width));

  std::vector<double> rss(dims.count(), 0.0);
  double rss_peak = 0.0;
  for (std::size_t p = 0; p < rss.size(); ++p) {
    double acc = 0.0;
    for (const auto& img : smoothed) acc += std::norm(img.data[p]);
    rss[p] = std::sqrt(acc);
    rss_peak = std::max(rss_peak, rss[p]);
  }
  const double floor = 1e-12 * rss_peak;

  std::vector<ComplexImage> sens;
  sens.reserve(smoothed.size());
  for (const auto& img : smoothed) {
    ComplexImage s(dims);
    for (std::size_t p = 0; p < rss.size(); ++p) {
      const double den = std::max(rss[p], floor);
      s.data[p] = den > 0.0 ? img.data[p] / den : cplx{0.0, 0.0};
    }
    sens.push_back(std::move(s));
  }

  std::vector<SupportMask> supports;
  supports.reserve(coil_images.size());
  for (const auto& img : coil_images) supports.push_back(coil_support(img, support_theta));

  return CoilSet(std::move(sens), std::move(supports));
}

/// Sensitivity-weighted combination (identity noise covariance):
/// I(p) = sum_j conj(sigma_j) I_j / max(sum_j |sigma_j|^2, 1e-12).
inline ComplexImage roemer_combine(const std::vector<ComplexImage>& coil_images,
                                   const CoilSet& coils) {
  if (static_cast<int>(coil_images.size()) != coils.count())
    throw CoilCountMismatch("roemer_combine: image and sensitivity counts differ");
  for (const auto& img : coil_images)
    if (!(img.dims == coils.dims)) throw DimMismatch("roemer_combine: grids differ");

  constexpr double kFloor = 1e-12;
  ComplexImage out(coils.dims);
  for (std::size_t p = 0; p < out.data.size(); ++p) {
    cplx num{0.0, 0.0};
    double den = 0.0;
    for (int j = 0; j < coils.count(); ++j) {
      const cplx s = coils.sensitivities[static_cast<std::size_t>(j)].data[p];
      num += std::conj(s) * coil_images[static_cast<std::size_t>(j)].data[p];
      den += std::norm(s);
    }
    out.data[p] = num / std::max(den, kFloor);
  }
  return out;
}

}  // namespace fovkit
