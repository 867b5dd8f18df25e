#include <catch2/catch_amalgamated.hpp>
#include <limits>
#include <random>

#include "fovkit/core.hpp"
#include "oracles.hpp"

using namespace fovkit;

TEST_CASE("grid dims validate extents and parity") {
  CHECK_NOTHROW(GridDims(2, 2));
  CHECK_NOTHROW(GridDims(5, 6));
  CHECK_THROWS_AS(GridDims(2, 5), InvalidGrid);   // odd width
  CHECK_THROWS_AS(GridDims(0, 4), InvalidGrid);
  CHECK_THROWS_AS(GridDims(4, 0), InvalidGrid);
}

TEST_CASE("circular_shift_u basics") {
  std::mt19937 rng(11);
  const GridDims dims(4, 4);
  const ComplexImage img = oracle::random_image(dims, rng);

  SECTION("zero shift is the identity") {
    CHECK(oracle::max_abs_diff(circular_shift_u(img, 0), img) == 0.0);
  }
  SECTION("full-period shift is the identity") {
    CHECK(oracle::max_abs_diff(circular_shift_u(img, dims.n_cols), img) == 0.0);
  }
  SECTION("single marked pixel moves as expected") {
    SupportMask m(dims);
    m.at(1, 1) = 1;
    const SupportMask shifted = circular_shift_u(m, 2);
    CHECK(shifted.popcount() == 1);
    CHECK(shifted.at(1, 3) == 1);
  }
  SECTION("matches the brute-force reindexing oracle") {
    for (int shift : {-5, -1, 1, 2, 3, 7}) {
      CHECK(oracle::max_abs_diff(circular_shift_u(img, shift),
                                 oracle::reindex_shift_loop(img, shift)) == 0.0);
    }
  }
}

TEST_CASE("circular_shift_u is a group action") {
  std::mt19937 rng(12);
  const GridDims dims(6, 8);
  const ComplexImage img = oracle::random_image(dims, rng);
  std::uniform_int_distribution<int> shifts(-20, 20);
  for (int trial = 0; trial < 20; ++trial) {
    const int a = shifts(rng), b = shifts(rng);
    const ComplexImage two_step = circular_shift_u(circular_shift_u(img, a), b);
    const ComplexImage one_step = circular_shift_u(img, a + b);
    CHECK(oracle::max_abs_diff(two_step, one_step) == 0.0);
  }
}

TEST_CASE("mask_complement") {
  const GridDims dims(4, 4);
  SupportMask ones(dims);
  std::fill(ones.data.begin(), ones.data.end(), std::uint8_t{1});
  const SupportMask zeros = mask_complement(ones);
  CHECK(zeros.popcount() == 0);
  CHECK(mask_complement(zeros).popcount() == dims.count());

  std::mt19937 rng(13);
  const SupportMask m = oracle::random_mask(GridDims(8, 8), rng);
  const SupportMask twice = mask_complement(mask_complement(m));
  CHECK(twice.data == m.data);
  CHECK(m.popcount() + mask_complement(m).popcount() == m.dims.count());
}

TEST_CASE("hadamard products") {
  std::mt19937 rng(14);
  const GridDims dims(4, 4);
  const ComplexImage a = oracle::random_image(dims, rng);
  const ComplexImage b = oracle::random_image(dims, rng);

  ComplexImage ones(dims);
  std::fill(ones.data.begin(), ones.data.end(), cplx{1.0, 0.0});
  CHECK(oracle::max_abs_diff(hadamard(a, ones), a) == 0.0);

  ComplexImage zeros(dims);
  double peak = 0.0;
  for (const auto& z : hadamard(a, zeros).data) peak = std::max(peak, std::abs(z));
  CHECK(peak == 0.0);

  ComplexImage expected(dims);
  for (std::size_t i = 0; i < expected.data.size(); ++i)
    expected.data[i] = a.data[i] * b.data[i];
  CHECK(oracle::max_abs_diff(hadamard(a, b), expected) == 0.0);

  CHECK_THROWS_AS(hadamard(a, ComplexImage(GridDims(4, 6))), DimMismatch);
}

TEST_CASE("gather and scatter") {
  std::mt19937 rng(15);
  const GridDims dims(4, 4);

  SECTION("all-ones mask flattens row-major") {
    SupportMask all(dims);
    std::fill(all.data.begin(), all.data.end(), std::uint8_t{1});
    const ComplexImage img = oracle::random_image(dims, rng);
    CHECK(gather(all, img) == img.data);
  }

  SECTION("gather after scatter is the identity on vectors") {
    SupportMask s(dims);
    // exactly 7 marked pixels
    for (int i : {0, 3, 5, 6, 9, 12, 15}) s.data[static_cast<std::size_t>(i)] = 1;
    REQUIRE(s.popcount() == 7);
    const std::vector<cplx> v = oracle::random_vector(7, rng);
    CHECK(gather(s, scatter(s, v)) == v);
  }

  SECTION("scatter after gather masks the image") {
    const SupportMask s = oracle::random_mask(dims, rng);
    const ComplexImage img = oracle::random_image(dims, rng);
    const ComplexImage round = scatter(s, gather(s, img));
    CHECK(oracle::max_abs_diff(round, hadamard(img, s)) == 0.0);
  }

  SECTION("wrong vector length is rejected") {
    const SupportMask s = oracle::random_mask(dims, rng);
    std::vector<cplx> v(s.popcount() + 1, cplx{1.0, 0.0});
    CHECK_THROWS_AS(scatter(s, v), LengthMismatch);
  }
}

TEST_CASE("gather/scatter adjointness") {
  std::mt19937 rng(16);
  const GridDims dims(6, 8);
  for (int trial = 0; trial < 10; ++trial) {
    const SupportMask s = oracle::random_mask(dims, rng);
    const ComplexImage x = oracle::random_image(dims, rng);
    const std::vector<cplx> v = oracle::random_vector(s.popcount(), rng);
    const cplx lhs = dot(gather(s, x), v);
    ComplexImage xs = scatter(s, v);
    const cplx rhs = dot(x.data, xs.data);
    CHECK(std::abs(lhs - rhs) <= 1e-13 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("mask construction rejects values outside {0,1}") {
  std::vector<std::uint8_t> bad(16, 0);
  bad[3] = 2;
  CHECK_THROWS_AS(SupportMask(GridDims(4, 4), std::move(bad)), Error);
}

TEST_CASE("k-space data validates per-coil sample counts") {
  SamplingPattern p(GridDims(4, 4), 1);
  p.at(0, 0) = 1;
  p.at(2, 3) = 1;
  CHECK_NOTHROW(KSpaceData(p, {{cplx{1, 0}, cplx{2, 0}}}));
  CHECK_THROWS_AS(KSpaceData(p, {{cplx{1, 0}}}), LengthMismatch);
  CHECK_THROWS_AS(KSpaceData(p, {}), EmptyInput);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(KSpaceData(p, {{cplx{1, 0}, cplx{nan, 0}}}), Error);
}

TEST_CASE("coil sets validate grids and sensing") {
  const GridDims dims(4, 4);
  ComplexImage unit(dims);
  std::fill(unit.data.begin(), unit.data.end(), cplx{1.0, 0.0});
  SupportMask all(dims);
  std::fill(all.data.begin(), all.data.end(), std::uint8_t{1});

  CHECK_NOTHROW(CoilSet({unit}, {all}));
  CHECK_THROWS_AS(CoilSet({unit}, {all, all}), CoilCountMismatch);
  CHECK_THROWS_AS(CoilSet({unit, ComplexImage(GridDims(4, 6))}, {all, all}), DimMismatch);
  // a coil set whose sensitivities all vanish on the union support is useless
  CHECK_THROWS_AS(CoilSet({ComplexImage(dims)}, {all}), Error);
  ComplexImage bad(dims);
  bad.at(0, 0) = cplx{std::numeric_limits<double>::infinity(), 0.0};
  CHECK_THROWS_AS(CoilSet({bad}, {all}), Error);
}
