#pragma once

#include <Eigen/Core>

#include <vector>

#include "robustreg/regressor.hpp"

namespace robustreg {

/// Squared-exponential kernel k(x, x') = signal_variance * exp(-|x - x'|^2 / (2 length_scale^2)).
struct GprHyper {
  double signal_variance = 1.0;
  double length_scale = 1.0;
  double noise_variance = 1e-2;
};

struct GprGrid {
  std::vector<double> length_scales{0.1, 0.3, 1.0, 3.0};
  std::vector<double> signal_variances{0.25, 1.0, 4.0};
  std::vector<double> noise_variances{1e-4, 1e-2, 1e-1};
};

/// Zero prior mean; predictive mean only.
class GprModel final : public Model {
 public:
  GprModel(Eigen::MatrixXd train_inputs, Eigen::VectorXd alpha, GprHyper hyper,
           double log_marginal_likelihood, double noise_used);

  Eigen::MatrixXd predict(const Eigen::MatrixXd& inputs) const override;
  Eigen::Index n_inputs() const override { return train_inputs_.cols(); }
  Eigen::Index n_outputs() const override { return 1; }
  std::string kind() const override { return "gpr"; }

  const GprHyper& hyper() const { return hyper_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }
  double log_marginal_likelihood() const { return log_marginal_likelihood_; }
  // Noise variance after jitter escalation.
  double noise_used() const { return noise_used_; }

 private:
  Eigen::MatrixXd train_inputs_;
  Eigen::VectorXd alpha_;
  GprHyper hyper_;
  double log_marginal_likelihood_;
  double noise_used_;
};

Eigen::MatrixXd se_kernel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const GprHyper& hyper);

/// Fixed hyperparameters. Per-sample weights enter as heteroscedastic noise
/// noise_variance / w_j. If the Cholesky factorization fails the noise term
/// is multiplied by 10, up to 3 times, before ConditioningError is thrown.
GprModel gpr_fit(const Dataset& dataset, const GprHyper& hyper, const WeightMatrix* weights = nullptr);

/// Grid search: keeps the hyperparameters with the highest log marginal likelihood.
GprModel gpr_fit(const Dataset& dataset, const GprGrid& grid, const WeightMatrix* weights = nullptr);

Eigen::MatrixXd gpr_predict(const GprModel& model, const Eigen::MatrixXd& inputs);

class GprRegressor final : public Regressor {
 public:
  explicit GprRegressor(GprGrid grid = {}) : grid_(std::move(grid)) {}

  ModelPtr fit(const Dataset& train, const WeightMatrix& weights,
               const FitContext& context) const override;
  std::string name() const override { return "gpr"; }

 private:
  GprGrid grid_;
};

}  // namespace robustreg
