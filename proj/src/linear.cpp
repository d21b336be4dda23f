#include "robustreg/linear.hpp"

#include <Eigen/Dense>

#include "robustreg/errors.hpp"

namespace robustreg {

LinearModel::LinearModel(Eigen::MatrixXd coefficients, Eigen::VectorXd intercept)
    : coefficients_(std::move(coefficients)), intercept_(std::move(intercept)) {
  if (intercept_.size() != coefficients_.cols()) {
    throw InvalidArgument("LinearModel: intercept length must equal output count");
  }
}

Eigen::MatrixXd LinearModel::predict(const Eigen::MatrixXd& inputs) const {
  if (inputs.cols() != n_inputs()) {
    throw InvalidArgument("LinearModel::predict: expected " + std::to_string(n_inputs()) +
                          " input columns, got " + std::to_string(inputs.cols()));
  }
  Eigen::MatrixXd out = inputs * coefficients_;
  out.rowwise() += intercept_.transpose();
  return out;
}

LinearModel linear_fit(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& outputs,
                       const WeightMatrix& weights) {
  const Eigen::Index n = inputs.rows();
  const Eigen::Index n_in = inputs.cols();
  const Eigen::Index n_out = outputs.cols();
  if (outputs.rows() != n) throw InvalidArgument("linear_fit: row count mismatch");
  if (weights.rows() != n_out || weights.cols() != n) {
    throw InvalidArgument("linear_fit: weights must be n_out x n");
  }
  if (n <= n_in) {
    throw InvalidArgument("linear_fit: need more samples than inputs");
  }

  const Eigen::Index p = n_in + 1;
  Eigen::MatrixXd design(n, p);
  design.leftCols(n_in) = inputs;
  design.col(n_in).setOnes();

  Eigen::MatrixXd coefficients(n_in, n_out);
  Eigen::VectorXd intercept(n_out);
  for (Eigen::Index i = 0; i < n_out; ++i) {
    const Eigen::VectorXd w = weights.row(i).transpose();
    const Eigen::MatrixXd weighted = design.transpose() * w.asDiagonal();
    const Eigen::MatrixXd normal = weighted * design;
    const Eigen::VectorXd rhs = weighted * outputs.col(i);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(normal);
    qr.setThreshold(1e-12);
    if (qr.rank() < p) {
      throw SingularSystem("linear_fit: weighted design is rank deficient for output " +
                           std::to_string(i + 1));
    }
    const Eigen::VectorXd beta = qr.solve(rhs);
    coefficients.col(i) = beta.head(n_in);
    intercept(i) = beta(n_in);
  }
  return LinearModel(std::move(coefficients), std::move(intercept));
}

LinearModel linear_fit(const Dataset& dataset, const WeightMatrix& weights) {
  check_weights(dataset, weights);
  return linear_fit(dataset.inputs, dataset.outputs, weights);
}

LinearModel linear_fit(const Dataset& dataset) { return linear_fit(dataset, unit_weights(dataset)); }

ModelPtr LinearRegressor::fit(const Dataset& train, const WeightMatrix& weights,
                              const FitContext& /*context*/) const {
  return std::make_shared<LinearModel>(linear_fit(train, weights));
}

}  // namespace robustreg
