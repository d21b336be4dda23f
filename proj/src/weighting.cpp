#include "robustreg/weighting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "robustreg/errors.hpp"
#include "robustreg/stats.hpp"

namespace robustreg {

double WeightKernel::operator()(double v) const {
  const double w = std::exp(-scale * std::pow(std::abs(v), exponent));
  return std::max(w, std::numeric_limits<double>::min());
}

ResidualMatrix residual_matrix(const Dataset& dataset, const Model& model) {
  if (model.n_inputs() != dataset.n_inputs() || model.n_outputs() != dataset.n_outputs()) {
    throw InvalidArgument("residual_matrix: model arity " + std::to_string(model.n_inputs()) + "->" +
                          std::to_string(model.n_outputs()) + " does not match dataset " +
                          std::to_string(dataset.n_inputs()) + "->" +
                          std::to_string(dataset.n_outputs()));
  }
  const Eigen::MatrixXd predicted = model.predict(dataset.inputs);
  return (dataset.outputs - predicted).transpose();
}

RowStats row_stats(std::span<const double> row, double gamma) {
  if (row.empty()) throw InvalidArgument("row_stats: empty row");
  if (!(gamma > 0.0)) throw InvalidArgument("row_stats: gamma must be positive");

  RowStats s;
  s.gamma = gamma;
  s.median = stats::median(row);
  s.mad = stats::mad(row);

  double max_dev = 0.0;
  double max_abs = 0.0;
  for (double r : row) {
    max_dev = std::max(max_dev, std::abs(r - s.median));
    max_abs = std::max(max_abs, std::abs(r));
  }
  if (s.mad <= 1e-12 * std::max(1.0, max_dev)) {
    s.threshold = 1e-9 * (1.0 + max_abs);
    s.floored = true;
  } else {
    s.threshold = gamma * s.mad;
  }
  return s;
}

std::vector<double> weight_row(std::span<const double> row, const RowStats& stats,
                               const WeightKernel& kernel) {
  if (!(stats.threshold > 0.0)) throw InvalidArgument("weight_row: threshold must be positive");
  std::vector<double> w(row.size());
  for (std::size_t j = 0; j < row.size(); ++j) {
    w[j] = kernel((row[j] - stats.median) / stats.threshold);
  }
  return w;
}

WeightResult weight_matrix(const ResidualMatrix& residuals, double gamma, const WeightKernel& kernel) {
  if (residuals.size() == 0) throw InvalidArgument("weight_matrix: empty residual matrix");
  WeightResult out;
  out.weights.resize(residuals.rows(), residuals.cols());
  out.stats.reserve(static_cast<std::size_t>(residuals.rows()));
  Eigen::VectorXd row(residuals.cols());
  for (Eigen::Index i = 0; i < residuals.rows(); ++i) {
    row = residuals.row(i).transpose();
    const std::span<const double> view(row.data(), static_cast<std::size_t>(row.size()));
    const RowStats s = row_stats(view, gamma);
    const std::vector<double> w = weight_row(view, s, kernel);
    out.weights.row(i) = Eigen::Map<const Eigen::RowVectorXd>(w.data(), row.size());
    out.stats.push_back(s);
  }
  return out;
}

WeightMatrix weights_from_stats(const ResidualMatrix& residuals, std::span<const RowStats> stats,
                                const WeightKernel& kernel) {
  if (static_cast<Eigen::Index>(stats.size()) != residuals.rows()) {
    throw InvalidArgument("weights_from_stats: one RowStats per output row required");
  }
  WeightMatrix w(residuals.rows(), residuals.cols());
  for (Eigen::Index i = 0; i < residuals.rows(); ++i) {
    const RowStats& s = stats[static_cast<std::size_t>(i)];
    if (!(s.threshold > 0.0)) throw InvalidArgument("weights_from_stats: threshold must be positive");
    for (Eigen::Index j = 0; j < residuals.cols(); ++j) {
      w(i, j) = kernel((residuals(i, j) - s.median) / s.threshold);
    }
  }
  return w;
}

InlierMask inlier_mask(const WeightMatrix& weights, double cutoff) {
  if (!(cutoff > 0.0 && cutoff < 1.0)) {
    throw InvalidArgument("inlier_mask: cutoff must lie in (0, 1)");
  }
  return (weights.array() >= cutoff).matrix();
}

}  // namespace robustreg
