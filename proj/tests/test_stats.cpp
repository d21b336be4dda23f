#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "robustreg/errors.hpp"
#include "robustreg/stats.hpp"

using namespace robustreg;
using V = std::vector<double>;

namespace {

double sorted_median(V v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TEST_SUITE("stats") {
  TEST_CASE("median of odd, even and singleton inputs") {
    CHECK(stats::median(V{1, 3, 2}) == 2.0);
    CHECK(stats::median(V{1, 2, 3, 4}) == 2.5);
    CHECK(stats::median(V{5}) == 5.0);
  }

  TEST_CASE("mad examples") {
    CHECK(stats::mad(V{1, 2, 3, 4, 5}) == 1.0);
    CHECK(stats::mad(V{4.2, 4.2, 4.2}) == 0.0);
    CHECK(stats::mad(V{1, 1, 1, 100}) == 0.0);
  }

  TEST_CASE("empty or non-finite input is rejected") {
    CHECK_THROWS_AS(stats::median(V{}), InvalidArgument);
    CHECK_THROWS_AS(stats::mad(V{}), InvalidArgument);
    CHECK_THROWS_AS(stats::median(V{1.0, std::nan("")}), InvalidArgument);
  }

  TEST_CASE("r_squared examples") {
    const V ref{1, 2, 4, 7};
    CHECK(stats::r_squared(ref, ref) == 1.0);
    CHECK(stats::r_squared(V(4, 3.5), ref) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(stats::r_squared(V{0, 0}, V{-1, 1}) == 0.0);
    CHECK(stats::r_squared(V{1, -1}, V{-1, 1}) == -3.0);
  }

  TEST_CASE("r_squared preconditions") {
    CHECK_THROWS_AS(stats::r_squared(V{1, 2}, V{3, 3}), DegenerateReference);
    CHECK_THROWS_AS(stats::r_squared(V{1}, V{1}), InvalidArgument);
    CHECK_THROWS_AS(stats::r_squared(V{1, 2}, V{1, 2, 3}), InvalidArgument);
  }

  TEST_CASE("rmse examples") {
    CHECK(stats::rmse(V{1, 2}, V{1, 2}) == 0.0);
    CHECK(stats::rmse(V{2, 2}, V{0, 0}) == 2.0);
    CHECK(stats::rmse(V{1, 2, 3}, V{1, 2, 5}) == doctest::Approx(std::sqrt(4.0 / 3.0)).epsilon(1e-15));
    CHECK_THROWS_AS(stats::rmse(V{1, 2}, V{1}), InvalidArgument);
  }

  TEST_CASE("zero rmse implies unit r_squared") {
    const V ref{0.5, -1.0, 3.0};
    const auto m = stats::metrics(ref, ref);
    CHECK(m.rmse == 0.0);
    CHECK(m.r_squared == 1.0);
  }

  TEST_CASE("median and mad agree with a sort-based oracle") {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> len(1, 50);
    std::normal_distribution<double> value(0.0, 3.0);
    std::bernoulli_distribution ties(0.3);
    for (int trial = 0; trial < 1000; ++trial) {
      V v(static_cast<std::size_t>(len(rng)));
      for (auto& x : v) x = ties(rng) ? std::round(value(rng)) : value(rng);
      const double m = sorted_median(v);
      V dev(v.size());
      std::transform(v.begin(), v.end(), dev.begin(), [m](double x) { return std::abs(x - m); });
      REQUIRE(stats::median(v) == m);
      REQUIRE(stats::mad(v) == sorted_median(dev));
    }
  }

  TEST_CASE("median is equivariant, mad translation-invariant and scale-equivariant") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> value(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
      V v(17);
      for (auto& x : v) x = value(rng);
      V shifted = v, scaled = v, permuted = v;
      for (auto& x : shifted) x += 2.5;
      for (auto& x : scaled) x *= -4.0;
      std::shuffle(permuted.begin(), permuted.end(), rng);
      CHECK(stats::median(permuted) == stats::median(v));
      CHECK(stats::median(shifted) == doctest::Approx(stats::median(v) + 2.5).epsilon(1e-12));
      CHECK(stats::mad(shifted) == doctest::Approx(stats::mad(v)).epsilon(1e-12));
      CHECK(stats::mad(scaled) == doctest::Approx(4.0 * stats::mad(v)).epsilon(1e-12));
    }
  }

  TEST_CASE("mad is zero iff a majority sits on the median") {
    CHECK(stats::mad(V{2, 2, 2, 5, 9}) == 0.0);
    CHECK(stats::mad(V{2, 2, 5, 9}) > 0.0);
  }
}
