#include "robustreg/ransac.hpp"

#include <cmath>
#include <random>

#include "robustreg/errors.hpp"

namespace robustreg {
namespace {

struct Hypothesis {
  Eigen::Index consensus = 0;
  double spread = 0.0;
  std::vector<Eigen::Index> inliers;
};

}  // namespace

RansacResult ransac_fit(const Dataset& dataset, double max_distance, int iterations,
                        std::uint64_t seed) {
  if (dataset.n_inputs() != 1 || dataset.n_outputs() != 1) {
    throw InvalidArgument("ransac_fit: requires a 1-input, 1-output dataset");
  }
  const Eigen::Index n = dataset.size();
  if (n < 2) throw InvalidArgument("ransac_fit: need at least 2 samples");
  if (!(max_distance > 0.0)) throw InvalidArgument("ransac_fit: max_distance must be positive");
  if (iterations <= 0) throw InvalidArgument("ransac_fit: iterations must be positive");

  const auto x = dataset.inputs.col(0);
  const auto y = dataset.outputs.col(0);

  Hypothesis best;
  bool any_valid = false;
  auto evaluate = [&](Eigen::Index a, Eigen::Index b) {
    const double dx = x(b) - x(a);
    if (dx == 0.0) return;
    any_valid = true;
    const double slope = (y(b) - y(a)) / dx;
    const double intercept = y(a) - slope * x(a);
    Hypothesis h;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double d = std::abs(y(j) - (slope * x(j) + intercept));
      if (d <= max_distance) {
        ++h.consensus;
        h.spread += d;
        h.inliers.push_back(j);
      }
    }
    if (h.consensus > best.consensus || (h.consensus == best.consensus && h.spread < best.spread)) {
      best = std::move(h);
    }
  };

  const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  if (pairs <= static_cast<double>(iterations)) {
    for (Eigen::Index a = 0; a < n; ++a) {
      for (Eigen::Index b = a + 1; b < n; ++b) evaluate(a, b);
    }
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
    std::uniform_int_distribution<Eigen::Index> second(0, n - 2);
    for (int it = 0; it < iterations; ++it) {
      const Eigen::Index a = first(rng);
      Eigen::Index b = second(rng);
      if (b >= a) ++b;
      evaluate(a, b);
    }
  }

  if (!any_valid) throw DegenerateSampling("ransac_fit: every minimal sample had duplicate x");
  if (best.consensus < 2) throw NoConsensus("ransac_fit: best consensus set has fewer than 2 samples");

  const Dataset consensus_set = dataset.subset(best.inliers);
  LinearModel refit = linear_fit(consensus_set);
  return RansacResult{std::move(refit), best.consensus, std::move(best.inliers)};
}

ModelPtr RansacRegressor::fit(const Dataset& train, const WeightMatrix& weights,
                              const FitContext& context) const {
  check_weights(train, weights);
  return std::make_shared<LinearModel>(
      ransac_fit(train, options_.max_distance, options_.iterations, context.seed).model);
}

}  // namespace robustreg
