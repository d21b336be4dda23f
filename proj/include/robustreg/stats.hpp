#pragma once

#include <span>

namespace robustreg::stats {

/// Goodness of fit of one output component against a reference signal.
struct MetricPair {
  double r_squared = 0.0;
  double rmse = 0.0;
};

// Odd length: middle order statistic. Even length: mean of the two middle ones.
double median(std::span<const double> values);

// Raw median absolute deviation about the median (no consistency factor).
double mad(std::span<const double> values);

/// 1 - SS_res / SS_tot, with SS_tot taken about the mean of `reference`.
/// Negative for predictors worse than the reference mean.
double r_squared(std::span<const double> predicted, std::span<const double> reference);

double rmse(std::span<const double> predicted, std::span<const double> reference);

MetricPair metrics(std::span<const double> predicted, std::span<const double> reference);

}  // namespace robustreg::stats
