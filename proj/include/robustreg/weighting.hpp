#pragma once

#include <Eigen/Core>

#include <span>
#include <vector>

#include "robustreg/dataset.hpp"
#include "robustreg/regressor.hpp"

namespace robustreg {

/// r(i, j) = observed - predicted for output component i, sample j. Shape n_out x n.
using ResidualMatrix = Eigen::MatrixXd;
using InlierMask = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Location and scale of one residual row.
struct RowStats {
  double median = 0.0;
  double mad = 0.0;
  double threshold = 0.0;  // gamma * mad, or the floor value when mad is degenerate
  double gamma = 0.0;
  bool floored = false;
};

/// W(v) = exp(-scale * |v|^exponent), clamped below at the smallest normal
/// double so weights stay strictly positive.
struct WeightKernel {
  double scale = 7.0;
  double exponent = 8.0;

  double operator()(double v) const;
};

inline constexpr double kDefaultInlierCutoff = 0.5;

ResidualMatrix residual_matrix(const Dataset& dataset, const Model& model);

/// mad <= 1e-12 * max(1, max|r - m|) is treated as degenerate, in which case
/// the threshold falls back to 1e-9 * (1 + max|r|).
RowStats row_stats(std::span<const double> row, double gamma);

std::vector<double> weight_row(std::span<const double> row, const RowStats& stats,
                               const WeightKernel& kernel = {});

struct WeightResult {
  WeightMatrix weights;
  std::vector<RowStats> stats;  // one per output component
};

WeightResult weight_matrix(const ResidualMatrix& residuals, double gamma,
                           const WeightKernel& kernel = {});

/// Weights of `residuals` using previously computed per-row statistics, e.g.
/// to classify held-out samples against the training residual scale.
WeightMatrix weights_from_stats(const ResidualMatrix& residuals, std::span<const RowStats> stats,
                                const WeightKernel& kernel = {});

/// flag = weight >= cutoff, cutoff in (0, 1).
InlierMask inlier_mask(const WeightMatrix& weights, double cutoff = kDefaultInlierCutoff);

}  // namespace robustreg
