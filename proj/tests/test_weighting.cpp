#include <doctest.h>

#include <cfloat>
#include <cmath>
#include <random>
#include <vector>

#include "robustreg/errors.hpp"
#include "robustreg/weighting.hpp"

using namespace robustreg;
using V = std::vector<double>;

TEST_SUITE("weighting") {
  TEST_CASE("kernel values") {
    const WeightKernel w;
    CHECK(w(0.0) == 1.0);
    CHECK(w(1.0) == doctest::Approx(std::exp(-7.0)).epsilon(1e-12));
    CHECK(w(0.5) == doctest::Approx(0.97302).epsilon(1e-5));
    CHECK(w(0.7) > 0.66);
    CHECK(w(1.3) == doctest::Approx(1.5895911659746e-25).epsilon(1e-12));
    CHECK(w(0.749) == doctest::Approx(0.5).epsilon(2e-3));
  }

  TEST_CASE("kernel is symmetric, non-increasing in |v| and strictly positive") {
    const WeightKernel w;
    double prev = 1.0;
    for (double v = 0.0; v <= 5.0; v += 0.01) {
      CHECK(w(v) == w(-v));
      CHECK(w(v) <= prev);
      CHECK(w(v) > 0.0);
      CHECK(w(v) <= 1.0);
      prev = w(v);
    }
    CHECK(w(1e6) == DBL_MIN);
  }

  TEST_CASE("row stats use raw MAD times gamma") {
    const RowStats s = row_stats(V{1, 2, 3, 4, 5}, 2.0);
    CHECK(s.median == 3.0);
    CHECK(s.mad == 1.0);
    CHECK(s.threshold == 2.0);
    CHECK_FALSE(s.floored);
  }

  TEST_CASE("degenerate MAD falls back to the floor threshold") {
    const V row{0.0, 0.0, 0.0, 0.0, 3.0};
    const RowStats s = row_stats(row, 2.0);
    CHECK(s.floored);
    CHECK(s.threshold == doctest::Approx(1e-9 * 4.0));
    const V w = weight_row(row, s);
    CHECK(w[0] == 1.0);
    CHECK(w[4] == DBL_MIN);
  }

  TEST_CASE("extreme residual gets a negligible weight and leaves the scale alone") {
    const V row{-0.1, 0.1, 0.05, -0.05, 0.0, 0.02, 1e12};
    const RowStats s = row_stats(row, 2.0);
    CHECK(s.median == 0.02);
    CHECK(s.mad == doctest::Approx(0.07).epsilon(1e-12));
    const V w = weight_row(row, s);
    CHECK(w.back() == DBL_MIN);
    CHECK(w[5] == 1.0);
    for (double x : w) CHECK(std::isfinite(x));
  }

  TEST_CASE("weights are translation and scale invariant") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n(0.0, 1.0);
    V row(101);
    for (auto& r : row) r = n(rng);
    const V base = weight_row(row, row_stats(row, 2.0));
    V moved = row;
    for (auto& r : moved) r = 3.0 * r - 7.0;
    const V other = weight_row(moved, row_stats(moved, 2.0));
    for (std::size_t j = 0; j < row.size(); ++j) CHECK(other[j] == doctest::Approx(base[j]).epsilon(1e-9));
  }

  TEST_CASE("the median residual gets weight exactly one") {
    const V row{0.4, -2.0, 1.5, 0.9, 7.0};
    const V w = weight_row(row, row_stats(row, 2.0));
    CHECK(w[3] == 1.0);
  }

  TEST_CASE("weight_matrix works row by row") {
    ResidualMatrix r(2, 5);
    r << 1, 2, 3, 4, 5,
         10, 20, 30, 40, 50;
    const WeightResult w = weight_matrix(r, 2.0);
    REQUIRE(w.stats.size() == 2);
    CHECK(w.stats[1].mad == 10.0);
    for (int j = 0; j < 5; ++j) CHECK(w.weights(0, j) == doctest::Approx(w.weights(1, j)).epsilon(1e-12));
    CHECK(w.weights(0, 0) == doctest::Approx(std::exp(-7.0)).epsilon(1e-12));
  }

  TEST_CASE("weights_from_stats reproduces weight_matrix on the same residuals") {
    ResidualMatrix r(1, 6);
    r << 0.1, -0.2, 0.05, 0.3, -0.15, 4.0;
    const WeightResult w = weight_matrix(r, 2.0);
    CHECK(weights_from_stats(r, w.stats) == w.weights);
  }

  TEST_CASE("inlier mask boundary and invalid cutoffs") {
    WeightMatrix w(1, 3);
    w << 0.5, 0.4999, 1.0;
    const InlierMask m = inlier_mask(w);
    CHECK(m(0, 0));
    CHECK_FALSE(m(0, 1));
    CHECK(m(0, 2));
    CHECK_THROWS_AS(inlier_mask(w, 0.0), InvalidArgument);
    CHECK_THROWS_AS(inlier_mask(w, 1.0), InvalidArgument);
  }

  TEST_CASE("invalid gamma and empty rows are rejected") {
    CHECK_THROWS_AS(row_stats(V{1, 2, 3}, 0.0), InvalidArgument);
    CHECK_THROWS_AS(row_stats(V{1, 2, 3}, -1.0), InvalidArgument);
    CHECK_THROWS_AS(row_stats(V{}, 2.0), InvalidArgument);
  }
}
