#pragma once

#include <Eigen/Core>

#include "robustreg/regressor.hpp"

namespace robustreg {

/// Affine map y = x^T A + b.
class LinearModel final : public Model {
 public:
  LinearModel(Eigen::MatrixXd coefficients, Eigen::VectorXd intercept);

  Eigen::MatrixXd predict(const Eigen::MatrixXd& inputs) const override;
  Eigen::Index n_inputs() const override { return coefficients_.rows(); }
  Eigen::Index n_outputs() const override { return coefficients_.cols(); }
  std::string kind() const override { return "linear"; }

  const Eigen::MatrixXd& coefficients() const { return coefficients_; }  // n_in x n_out
  const Eigen::VectorXd& intercept() const { return intercept_; }

 private:
  Eigen::MatrixXd coefficients_;
  Eigen::VectorXd intercept_;
};

/// Per output component i, minimizes sum_j W(i,j) (y(j,i) - yhat(j,i))^2 through
/// the weighted normal equations of the intercept-augmented design.
/// Throws SingularSystem when the weighted design is rank deficient.
LinearModel linear_fit(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& outputs,
                       const WeightMatrix& weights);
LinearModel linear_fit(const Dataset& dataset, const WeightMatrix& weights);
LinearModel linear_fit(const Dataset& dataset);

class LinearRegressor final : public Regressor {
 public:
  ModelPtr fit(const Dataset& train, const WeightMatrix& weights,
               const FitContext& context) const override;
  std::string name() const override { return "linear"; }
};

}  // namespace robustreg
