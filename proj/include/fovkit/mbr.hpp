#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "core.hpp"
#include "fourier.hpp"

namespace fovkit {

/// Why a solver stopped.
enum class StopReason { tolerance, max_iters };

inline std::string to_string(StopReason r) {
  return r == StopReason::tolerance ? "tolerance" : "max_iters";
}

struct SolveReport {
  int iterations = 0;
  std::vector<double> residual_history;  // ||A x_k - b|| after each iteration
  StopReason stop_reason = StopReason::tolerance;
  std::vector<double> change_history;  // POCS only: ||x_k - x_{k-1}|| per iteration
};

/// Masked Fourier sampling operator. Maps the vector of in-FOV pixels to the
/// pattern-marked spectral samples, per coil when sensitivities are present:
///   forward: x -> stack_j gather(pattern, fft2(sigma_j . scatter(S, x)))
/// The adjoint is the conjugate-transpose chain; fft2's adjoint is
/// n_rows*n_cols times ifft2 under this library's DFT scaling.
class ForwardModel {
 public:
  ForwardModel(SupportMask S, SamplingPattern pattern)
      : S_(std::move(S)), pattern_(std::move(pattern)) {
    if (!(S_.dims == pattern_.dims)) throw DimMismatch("support and pattern grids differ");
    if (S_.popcount() == 0) throw EmptyInput("support mask is empty");
  }

  ForwardModel(SupportMask S, SamplingPattern pattern, CoilSet coils)
      : S_(std::move(S)), pattern_(std::move(pattern)), sens_(std::move(coils.sensitivities)) {
    if (!(S_.dims == pattern_.dims)) throw DimMismatch("support and pattern grids differ");
    if (S_.popcount() == 0) throw EmptyInput("support mask is empty");
    for (const auto& s : sens_)
      if (!(s.dims == S_.dims)) throw DimMismatch("sensitivity grids differ from support");
  }

  int coil_count() const { return sens_.empty() ? 1 : static_cast<int>(sens_.size()); }
  std::size_t domain_size() const { return S_.popcount(); }
  std::size_t range_size() const {
    return pattern_.popcount() * static_cast<std::size_t>(coil_count());
  }
  const SupportMask& support() const { return S_; }
  const SamplingPattern& pattern() const { return pattern_; }

  std::vector<cplx> forward(const std::vector<cplx>& x) const {
    if (x.size() != domain_size()) throw LengthMismatch("forward: bad domain vector length");
    const ComplexImage img = scatter(S_, x);
    std::vector<cplx> out;
    out.reserve(range_size());
    for (int j = 0; j < coil_count(); ++j) {
      const ComplexImage sensed =
          sens_.empty() ? img : hadamard(img, sens_[static_cast<std::size_t>(j)]);
      const std::vector<cplx> samples = gather(pattern_, fft2(sensed));
      out.insert(out.end(), samples.begin(), samples.end());
    }
    return out;
  }

  std::vector<cplx> adjoint(const std::vector<cplx>& y) const {
    if (y.size() != range_size()) throw LengthMismatch("adjoint: bad range vector length");
    const std::size_t per_coil = pattern_.popcount();
    const double n = static_cast<double>(S_.dims.count());
    ComplexImage acc(S_.dims);
    for (int j = 0; j < coil_count(); ++j) {
      const std::vector<cplx> block(y.begin() + static_cast<std::ptrdiff_t>(j * per_coil),
                                    y.begin() + static_cast<std::ptrdiff_t>((j + 1) * per_coil));
      ComplexImage img = ifft2(scatter(pattern_, block));
      for (auto& z : img.data) z *= n;
      if (!sens_.empty()) {
        const ComplexImage& s = sens_[static_cast<std::size_t>(j)];
        for (std::size_t i = 0; i < img.data.size(); ++i)
          img.data[i] *= std::conj(s.data[i]);
      }
      for (std::size_t i = 0; i < acc.data.size(); ++i) acc.data[i] += img.data[i];
    }
    return gather(S_, acc);
  }

 private:
  SupportMask S_;
  SamplingPattern pattern_;
  std::vector<ComplexImage> sens_;
};

namespace detail {

inline void axpy(std::vector<cplx>& y, double a, const std::vector<cplx>& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

}  // namespace detail

/// LSQR (Golub-Kahan bidiagonalization) for min ||A x - b||_2, using only
/// forward/adjoint applications. Stops at relative residual <= tol or after
/// max_iters. A zero right-hand side returns immediately with the zero
/// solution. The recorded residuals are the true ||A x_k - b||, recomputed
/// each iteration.
inline std::pair<std::vector<cplx>, SolveReport> solve_lsqr(const ForwardModel& model,
                                                            const std::vector<cplx>& b,
                                                            double tol = 1e-8,
                                                            int max_iters = 500) {
  if (tol <= 0.0) throw Error("tol must be positive");
  if (max_iters < 1) throw Error("max_iters must be at least 1");
  if (b.size() != model.range_size()) throw LengthMismatch("solve_lsqr: bad rhs length");

  std::vector<cplx> x(model.domain_size(), cplx{0.0, 0.0});
  SolveReport report;

  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    report.residual_history.push_back(0.0);
    return {x, report};
  }

  std::vector<cplx> u = b;
  double beta = bnorm;
  for (auto& z : u) z /= beta;

  std::vector<cplx> v = model.adjoint(u);
  double alpha = norm2(v);
  if (alpha == 0.0) {  // b is orthogonal to the range; x = 0 is optimal
    report.residual_history.push_back(bnorm);
    return {x, report};
  }
  for (auto& z : v) z /= alpha;

  std::vector<cplx> w = v;
  double phibar = beta;
  double rhobar = alpha;

  for (int k = 1; k <= max_iters; ++k) {
    // next bidiagonalization step
    std::vector<cplx> u_next = model.forward(v);
    for (std::size_t i = 0; i < u_next.size(); ++i) u_next[i] -= alpha * u[i];
    beta = norm2(u_next);
    if (beta > 0.0)
      for (auto& z : u_next) z /= beta;
    u = std::move(u_next);

    std::vector<cplx> v_next = model.adjoint(u);
    for (std::size_t i = 0; i < v_next.size(); ++i) v_next[i] -= beta * v[i];
    alpha = norm2(v_next);
    if (alpha > 0.0)
      for (auto& z : v_next) z /= alpha;
    v = std::move(v_next);

    // Givens rotation eliminating beta from the bidiagonal system
    const double rho = std::hypot(rhobar, beta);
    const double c = rhobar / rho;
    const double s = beta / rho;
    const double theta = s * alpha;
    rhobar = -c * alpha;
    const double phi = c * phibar;
    phibar = s * phibar;

    detail::axpy(x, phi / rho, w);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = v[i] - (theta / rho) * w[i];

    std::vector<cplx> r = model.forward(x);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
    const double rnorm = norm2(r);

    report.iterations = k;
    report.residual_history.push_back(rnorm);
    if (rnorm <= tol * bnorm) {
      report.stop_reason = StopReason::tolerance;
      return {x, report};
    }
    if (alpha == 0.0 || beta == 0.0) {  // exact breakdown: the Krylov space is exhausted
      report.stop_reason = StopReason::tolerance;
      return {x, report};
    }
  }
  report.stop_reason = StopReason::max_iters;
  return {x, report};
}

/// Alternating-projection baseline: enforce the acquired samples in k-space,
/// then zero everything outside the FOV. Stops when the relative iterate
/// change drops to tol. The history records the data-consistency residual
/// ||gather(pattern, fft2(x_k)) - b||.
inline std::pair<ComplexImage, SolveReport> solve_pocs(const SupportMask& S,
                                                       const SamplingPattern& pattern,
                                                       const std::vector<cplx>& b,
                                                       double tol = 1e-8, int max_iters = 500) {
  if (tol <= 0.0) throw Error("tol must be positive");
  if (max_iters < 1) throw Error("max_iters must be at least 1");
  if (!(S.dims == pattern.dims)) throw DimMismatch("support and pattern grids differ");
  if (b.size() != pattern.popcount()) throw LengthMismatch("solve_pocs: bad rhs length");

  ComplexImage x(S.dims);
  SolveReport report;
  report.stop_reason = StopReason::max_iters;

  for (int k = 1; k <= max_iters; ++k) {
    ComplexImage spec = fft2(x);
    std::size_t t = 0;
    for (std::size_t i = 0; i < pattern.data.size(); ++i)
      if (pattern.data[i]) spec.data[i] = b[t++];
    ComplexImage x_next = hadamard(ifft2(spec), S);

    double change = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < x.data.size(); ++i) {
      change += std::norm(x_next.data[i] - x.data[i]);
      scale += std::norm(x_next.data[i]);
    }
    change = std::sqrt(change);
    scale = std::sqrt(scale);
    x = std::move(x_next);

    std::vector<cplx> r = gather(pattern, fft2(x));
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
    report.iterations = k;
    report.residual_history.push_back(norm2(r));
    report.change_history.push_back(change);

    if (change <= tol * (scale > 0.0 ? scale : 1.0)) {
      report.stop_reason = StopReason::tolerance;
      break;
    }
  }
  return {x, report};
}

/// Stacked multi-coil least squares; identical to solve_lsqr on the block
/// operator with b = [b_1; ...; b_C].
inline std::pair<std::vector<cplx>, SolveReport> solve_parallel(const ForwardModel& model,
                                                                const std::vector<cplx>& b,
                                                                double tol = 1e-8,
                                                                int max_iters = 500) {
  return solve_lsqr(model, b, tol, max_iters);
}

}  // namespace fovkit
