#pragma once

#include <cstdint>
#include <vector>

#include "robustreg/linear.hpp"

namespace robustreg {

struct RansacOptions {
  double max_distance = 0.5;
  int iterations = 1000;
};

struct RansacResult {
  LinearModel model;
  Eigen::Index consensus = 0;             // size of the best hypothesis' consensus set
  std::vector<Eigen::Index> inliers;      // that consensus set, ascending
};

/// Line fitting by random sample consensus on a 1-input, 1-output dataset.
/// Hypotheses are exact lines through 2 samples; the winner (largest consensus,
/// ties broken by smaller summed distance) is refit by least squares on its
/// consensus set. When every pair fits in the iteration budget the pairs are
/// enumerated exhaustively instead of sampled.
RansacResult ransac_fit(const Dataset& dataset, double max_distance, int iterations,
                        std::uint64_t seed);

/// Weights are ignored: RANSAC is an unweighted baseline.
class RansacRegressor final : public Regressor {
 public:
  explicit RansacRegressor(RansacOptions options = {}) : options_(options) {}

  ModelPtr fit(const Dataset& train, const WeightMatrix& weights,
               const FitContext& context) const override;
  std::string name() const override { return "ransac"; }

 private:
  RansacOptions options_;
};

}  // namespace robustreg
