#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "fovkit/fourier.hpp"
#include "fovkit/pattern.hpp"
#include "fovkit/threading.hpp"
#include "oracles.hpp"

using namespace fovkit;

namespace {
double rel_max_diff(const ComplexImage& a, const ComplexImage& b) {
  double scale = 0.0;
  for (const auto& z : b.data) scale = std::max(scale, std::abs(z));
  return oracle::max_abs_diff(a, b) / (scale > 0.0 ? scale : 1.0);
}
}  // namespace

TEST_CASE("fft2 of a delta is all ones") {
  ComplexImage img(GridDims(4, 6));
  img.at(0, 0) = cplx{1.0, 0.0};
  const ComplexImage spec = fft2(img);
  for (const auto& z : spec.data) CHECK(std::abs(z - cplx{1.0, 0.0}) <= 1e-13);
}

TEST_CASE("fft2 of a constant concentrates at DC") {
  const GridDims dims(6, 4);
  ComplexImage img(dims);
  std::fill(img.data.begin(), img.data.end(), cplx{1.0, 0.0});
  const ComplexImage spec = fft2(img);
  CHECK(std::abs(spec.at(0, 0) - cplx{24.0, 0.0}) <= 1e-12);
  for (int r = 0; r < dims.n_rows; ++r)
    for (int c = 0; c < dims.n_cols; ++c)
      if (r != 0 || c != 0) CHECK(std::abs(spec.at(r, c)) <= 1e-12);
}

TEST_CASE("fft2 matches the quadruple-loop DFT oracle") {
  std::mt19937 rng(21);
  // cover the radix-2 path, the Bluestein path, and mixed sizes
  for (GridDims dims : {GridDims(4, 4), GridDims(6, 4), GridDims(5, 6), GridDims(8, 6)}) {
    const ComplexImage img = oracle::random_image(dims, rng);
    CHECK(rel_max_diff(fft2(img), oracle::dft2_loop(img)) <= 1e-12);
    CHECK(rel_max_diff(ifft2(img), oracle::idft2_loop(img)) <= 1e-12);
  }
}

TEST_CASE("ifft2 inverts fft2") {
  std::mt19937 rng(22);
  for (GridDims dims : {GridDims(8, 8), GridDims(6, 10), GridDims(64, 64)}) {
    const ComplexImage img = oracle::random_image(dims, rng);
    CHECK(rel_max_diff(ifft2(fft2(img)), img) <= 1e-12);
  }
}

TEST_CASE("Parseval identity") {
  std::mt19937 rng(23);
  const ComplexImage img = oracle::random_image(GridDims(12, 8), rng);
  const ComplexImage spec = fft2(img);
  double img_energy = 0.0, spec_energy = 0.0;
  for (const auto& z : img.data) img_energy += std::norm(z);
  for (const auto& z : spec.data) spec_energy += std::norm(z);
  spec_energy /= static_cast<double>(img.dims.count());
  CHECK(std::abs(img_energy - spec_energy) <= 1e-12 * img_energy);
}

TEST_CASE("transforms are linear") {
  std::mt19937 rng(24);
  const GridDims dims(6, 6);
  const ComplexImage x = oracle::random_image(dims, rng);
  const ComplexImage y = oracle::random_image(dims, rng);
  const cplx a{0.7, -1.3}, b{-0.2, 0.5};
  ComplexImage combo(dims);
  for (std::size_t i = 0; i < combo.data.size(); ++i)
    combo.data[i] = a * x.data[i] + b * y.data[i];
  const ComplexImage lhs = fft2(combo);
  const ComplexImage fx = fft2(x), fy = fft2(y);
  ComplexImage rhs(dims);
  for (std::size_t i = 0; i < rhs.data.size(); ++i)
    rhs.data[i] = a * fx.data[i] + b * fy.data[i];
  CHECK(rel_max_diff(lhs, rhs) <= 1e-12);
}

TEST_CASE("freq lists validate bounds and duplicates") {
  const GridDims dims(4, 4);
  CHECK_THROWS_AS(FreqList({{4, 0}}, dims), OutOfRangeFrequency);
  CHECK_THROWS_AS(FreqList({{0, -1}}, dims), OutOfRangeFrequency);
  CHECK_THROWS_AS(FreqList({{1, 1}, {1, 1}}, dims), OutOfRangeFrequency);
  CHECK_NOTHROW(FreqList({{1, 1}, {1, 2}}, dims));
}

TEST_CASE("nudft_forward consistency with fft2 on the full grid") {
  std::mt19937 rng(25);
  const GridDims dims(4, 6);
  const ComplexImage img = oracle::random_image(dims, rng);
  const std::vector<cplx> samples = nudft_forward(img, full_grid_freqs(dims));
  const ComplexImage spec = fft2(img);
  REQUIRE(samples.size() == spec.data.size());
  for (std::size_t i = 0; i < samples.size(); ++i)
    CHECK(std::abs(samples[i] - spec.data[i]) <= 1e-12 * (1.0 + std::abs(spec.data[i])));
}

TEST_CASE("nudft_forward of a delta is all ones") {
  ComplexImage img(GridDims(6, 4));
  img.at(0, 0) = cplx{1.0, 0.0};
  const FreqList freqs({{0, 0}, {3, 2}, {5, 3}, {1, 0}}, img.dims);
  for (const auto& s : nudft_forward(img, freqs))
    CHECK(std::abs(s - cplx{1.0, 0.0}) <= 1e-13);
}

TEST_CASE("nudft_forward matches the direct-summation oracle") {
  std::mt19937 rng(26);
  const GridDims dims(6, 4);
  const ComplexImage img = oracle::random_image(dims, rng);
  const FreqList freqs({{0, 0}, {2, 1}, {5, 3}, {4, 0}, {1, 2}}, dims);
  const auto got = nudft_forward(img, freqs);
  const auto want = oracle::nudft_loop(img, freqs);
  for (std::size_t i = 0; i < got.size(); ++i)
    CHECK(std::abs(got[i] - want[i]) <= 1e-12 * (1.0 + std::abs(want[i])));
}

TEST_CASE("nudft_adjoint basics") {
  const GridDims dims(4, 4);
  SECTION("a unit DC sample spreads to an all-ones image") {
    const FreqList freqs({{0, 0}}, dims);
    const ComplexImage img = nudft_adjoint({cplx{1.0, 0.0}}, freqs, dims);
    for (const auto& z : img.data) CHECK(std::abs(z - cplx{1.0, 0.0}) <= 1e-13);
  }
  SECTION("length mismatch is rejected") {
    const FreqList freqs({{0, 0}, {1, 1}}, dims);
    CHECK_THROWS_AS(nudft_adjoint({cplx{1.0, 0.0}}, freqs, dims), LengthMismatch);
  }
}

TEST_CASE("nudft pair passes the dot-product adjoint test") {
  std::mt19937 rng(27);
  const GridDims dims(6, 4);
  const FreqList freqs({{0, 0}, {1, 1}, {2, 3}, {3, 0}, {4, 2}, {5, 1}, {0, 3}, {2, 0}, {1, 2}},
                       dims);
  REQUIRE(freqs.size() == 9);
  for (int trial = 0; trial < 5; ++trial) {
    const ComplexImage x = oracle::random_image(dims, rng);
    const std::vector<cplx> y = oracle::random_vector(freqs.size(), rng);
    const cplx lhs = dot(nudft_forward(x, freqs), y);
    const ComplexImage ay = nudft_adjoint(y, freqs, dims);
    const cplx rhs = dot(x.data, ay.data);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("nudft_adjoint on the full grid equals scaled ifft2") {
  std::mt19937 rng(28);
  const GridDims dims(4, 6);
  const std::vector<cplx> samples = oracle::random_vector(dims.count(), rng);
  const ComplexImage adj = nudft_adjoint(samples, full_grid_freqs(dims), dims);
  ComplexImage as_grid(dims, samples);
  ComplexImage scaled = ifft2(as_grid);
  for (auto& z : scaled.data) z *= static_cast<double>(dims.count());
  CHECK(rel_max_diff(adj, scaled) <= 1e-12);
}

TEST_CASE("spectrum_on_inner_grid") {
  std::mt19937 rng(29);

  SECTION("factor 1 is fft2") {
    const ComplexImage img = oracle::random_image(GridDims(6, 4), rng);
    CHECK(rel_max_diff(spectrum_on_inner_grid(img, 1), fft2(img)) == 0.0);
  }

  SECTION("factor 2 equals the even spectral rows") {
    const ComplexImage img = oracle::random_image(GridDims(8, 4), rng);
    const ComplexImage inner = spectrum_on_inner_grid(img, 2);
    const ComplexImage full = fft2(img);
    REQUIRE(inner.dims.n_rows == 4);
    for (int t = 0; t < 4; ++t)
      for (int c = 0; c < 4; ++c)
        CHECK(std::abs(inner.at(t, c) - full.at(2 * t, c)) <=
              1e-12 * (1.0 + std::abs(full.at(2 * t, c))));
  }

  SECTION("every divisor matches the row-subsampled spectrum") {
    const GridDims dims(12, 4);
    const ComplexImage img = oracle::random_image(dims, rng);
    const ComplexImage full = fft2(img);
    for (int m : {1, 2, 3, 4, 6, 12}) {
      const ComplexImage inner = spectrum_on_inner_grid(img, m);
      REQUIRE(inner.dims.n_rows == dims.n_rows / m);
      for (int t = 0; t < inner.dims.n_rows; ++t)
        for (int c = 0; c < dims.n_cols; ++c)
          CHECK(std::abs(inner.at(t, c) - full.at(m * t, c)) <=
                1e-12 * (1.0 + std::abs(full.at(m * t, c))));
    }
  }

  SECTION("a constant image folds to a DC-only spectrum") {
    ComplexImage img(GridDims(8, 4));
    std::fill(img.data.begin(), img.data.end(), cplx{2.0, 0.0});
    const ComplexImage inner = spectrum_on_inner_grid(img, 4);
    CHECK(std::abs(inner.at(0, 0) - cplx{64.0, 0.0}) <= 1e-12);
    for (std::size_t i = 1; i < inner.data.size(); ++i) CHECK(std::abs(inner.data[i]) <= 1e-12);
  }

  SECTION("non-divisor factors are rejected") {
    const ComplexImage img = oracle::random_image(GridDims(6, 4), rng);
    CHECK_THROWS_AS(spectrum_on_inner_grid(img, 4), NonDivisorFactor);
  }
}

TEST_CASE("nudft on pattern-marked frequencies equals masked fft2") {
  std::mt19937 rng(30);
  const GridDims dims(6, 4);
  const ComplexImage img = oracle::random_image(dims, rng);
  SamplingPattern p(dims, 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (auto& v : p.data) v = unit(rng) < 0.4 ? 1 : 0;
  p.at(0, 0) = 1;
  const auto via_nudft = nudft_forward(img, pattern_freqs(p));
  const auto via_fft = gather(p, fft2(img));
  REQUIRE(via_nudft.size() == via_fft.size());
  for (std::size_t i = 0; i < via_fft.size(); ++i)
    CHECK(std::abs(via_nudft[i] - via_fft[i]) <= 1e-12 * (1.0 + std::abs(via_fft[i])));
}

TEST_CASE("transforms are reproducible across thread counts") {
  std::mt19937 rng(31);
  const ComplexImage img = oracle::random_image(GridDims(16, 12), rng);
  set_threads(1);
  const ComplexImage serial = fft2(img);
  set_threads(4);
  const ComplexImage threaded = fft2(img);
  set_threads(1);
  CHECK(rel_max_diff(threaded, serial) <= 1e-12);
}

TEST_CASE("the brute-force nudft path is bit-identical across thread counts") {
  std::mt19937 rng(32);
  const GridDims dims(10, 8);
  const ComplexImage img = oracle::random_image(dims, rng);
  const FreqList freqs = full_grid_freqs(dims);
  set_threads(1);
  const auto serial = nudft_forward(img, freqs);
  const auto serial_adj = nudft_adjoint(serial, freqs, dims);
  set_threads(3);
  const auto threaded = nudft_forward(img, freqs);
  const auto threaded_adj = nudft_adjoint(serial, freqs, dims);
  set_threads(1);
  CHECK(threaded == serial);
  CHECK(threaded_adj.data == serial_adj.data);
}
