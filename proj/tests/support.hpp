#pragma once

#include <Eigen/Core>

#include <cmath>
#include <vector>

#include "robustreg/dataset.hpp"
#include "robustreg/regressor.hpp"

namespace robustreg::testing {

inline Dataset make_xy(const std::vector<double>& x, const std::vector<double>& y) {
  Dataset ds;
  ds.inputs = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  ds.outputs = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
  return ds;
}

inline Eigen::MatrixXd grid(double lo, double hi, int points) {
  Eigen::MatrixXd x(points, 1);
  for (int k = 0; k < points; ++k) x(k, 0) = lo + (hi - lo) * k / (points - 1);
  return x;
}

inline double grid_rmse(const Model& model, TargetId target, int points = 1001) {
  const Interval d = target_domain(target);
  const Eigen::MatrixXd x = grid(d.lo, d.hi, points);
  return std::sqrt((model.predict(x) - true_function(target, x)).squaredNorm() / points);
}

}  // namespace robustreg::testing
