#include <doctest.h>

#include <cmath>

#include "robustreg/errors.hpp"
#include "robustreg/gpr.hpp"
#include "support.hpp"

using namespace robustreg;
using robustreg::testing::make_xy;

TEST_SUITE("gpr") {
  TEST_CASE("single noise-free point is interpolated") {
    const GprModel m = gpr_fit(make_xy({0.0}, {1.0}), GprHyper{1.0, 1.0, 0.0});
    Eigen::MatrixXd x(2, 1);
    x << 0.0, 1.0;
    const Eigen::MatrixXd y = m.predict(x);
    CHECK(y(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(y(1, 0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
  }

  TEST_CASE("far from the data the prior mean zero is returned") {
    const GprModel m = gpr_fit(make_xy({0, 1, 2}, {5, 6, 7}), GprHyper{1.0, 0.5, 1e-4});
    CHECK(std::abs(m.predict(Eigen::MatrixXd::Constant(1, 1, 100.0))(0, 0)) < 1e-12);
  }

  TEST_CASE("noise-free sinc-mix with fixed hyperparameters") {
    const Interval d = target_domain(TargetId::kSincMix);
    const Eigen::MatrixXd x = robustreg::testing::grid(d.lo, d.hi, 200);
    Dataset ds;
    ds.inputs = x;
    ds.outputs = true_function(TargetId::kSincMix, x);
    const GprModel m = gpr_fit(ds, GprHyper{1.0, 1.0, 1e-6});
    const Eigen::MatrixXd test = robustreg::testing::grid(d.lo, d.hi, 1001);
    const double rmse =
        std::sqrt((m.predict(test) - true_function(TargetId::kSincMix, test)).squaredNorm() / 1001);
    CHECK(rmse < 0.01);
  }

  TEST_CASE("kernel is symmetric with signal variance on the diagonal") {
    Eigen::MatrixXd x(4, 2);
    x << 0, 0, 1, 0, 0, 2, 3, 1;
    const GprHyper h{2.5, 0.7, 0.0};
    const Eigen::MatrixXd k = se_kernel(x, x, h);
    CHECK((k - k.transpose()).cwiseAbs().maxCoeff() == 0.0);
    for (int j = 0; j < 4; ++j) CHECK(k(j, j) == 2.5);
    CHECK(k(0, 1) == doctest::Approx(2.5 * std::exp(-1.0 / (2 * 0.49))).epsilon(1e-12));
  }

  TEST_CASE("grid search picks the most likely hyperparameters") {
    const Interval d = target_domain(TargetId::kSincMix);
    Dataset ds;
    ds.inputs = robustreg::testing::grid(d.lo, d.hi, 60);
    ds.outputs = true_function(TargetId::kSincMix, ds.inputs);
    const GprGrid grid;
    const GprModel best = gpr_fit(ds, grid);
    for (double l : grid.length_scales) {
      for (double s : grid.signal_variances) {
        for (double n : grid.noise_variances) {
          CHECK(gpr_fit(ds, GprHyper{s, l, n}).log_marginal_likelihood() <=
                best.log_marginal_likelihood() + 1e-9);
        }
      }
    }
  }

  TEST_CASE("duplicate inputs with zero noise trigger jitter escalation") {
    const GprModel m = gpr_fit(make_xy({1, 1, 2}, {0, 0.1, 1}), GprHyper{1.0, 1.0, 0.0});
    CHECK(m.noise_used() > 0.0);
  }

  TEST_CASE("weights enter as per-sample noise") {
    const Dataset ds = make_xy({0, 1, 2}, {0, 5, 0});
    WeightMatrix w = WeightMatrix::Ones(1, 3);
    w(0, 1) = 1e-12;
    const GprModel m = gpr_fit(ds, GprHyper{1.0, 1.0, 1e-2}, &w);
    CHECK(std::abs(m.predict(Eigen::MatrixXd::Constant(1, 1, 1.0))(0, 0)) < 1e-3);
  }

  TEST_CASE("invalid inputs") {
    CHECK_THROWS_AS(gpr_fit(Dataset{}, GprHyper{}), InvalidArgument);
    CHECK_THROWS_AS(gpr_fit(make_xy({0, 1}, {0, 1}), GprHyper{0.0, 1.0, 0.0}), InvalidArgument);
    CHECK_THROWS_AS(gpr_fit(make_xy({0, 1}, {0, 1}), GprGrid{{}, {1.0}, {1.0}}), InvalidArgument);
    const GprModel empty(Eigen::MatrixXd(0, 1), Eigen::VectorXd(0), GprHyper{}, 0.0, 0.0);
    CHECK_THROWS_AS(empty.predict(Eigen::MatrixXd::Zero(1, 1)), InvalidArgument);
  }
}
