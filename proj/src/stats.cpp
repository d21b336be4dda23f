#include "robustreg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "robustreg/errors.hpp"

namespace robustreg::stats {
namespace {

void require_finite_nonempty(std::span<const double> values, const char* what) {
  if (values.empty()) {
    throw InvalidArgument(std::string(what) + ": empty input");
  }
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw InvalidArgument(std::string(what) + ": non-finite entry");
    }
  }
}

// Selects in place; `scratch` is reordered.
double median_of(std::vector<double>& scratch) {
  const std::size_t n = scratch.size();
  const std::size_t mid = n / 2;
  std::nth_element(scratch.begin(), scratch.begin() + mid, scratch.end());
  const double upper = scratch[mid];
  if (n % 2 == 1) {
    return upper;
  }
  const double lower = *std::max_element(scratch.begin(), scratch.begin() + mid);
  // Halving each term first cannot overflow and rounds like (lower + upper) / 2.
  return 0.5 * lower + 0.5 * upper;
}

void require_same_length(std::span<const double> a, std::span<const double> b, const char* what) {
  if (a.size() != b.size()) {
    throw InvalidArgument(std::string(what) + ": length mismatch (" + std::to_string(a.size()) +
                          " vs " + std::to_string(b.size()) + ")");
  }
}

}  // namespace

double median(std::span<const double> values) {
  require_finite_nonempty(values, "median");
  std::vector<double> scratch(values.begin(), values.end());
  return median_of(scratch);
}

double mad(std::span<const double> values) {
  require_finite_nonempty(values, "mad");
  std::vector<double> scratch(values.begin(), values.end());
  const double center = median_of(scratch);
  for (std::size_t i = 0; i < values.size(); ++i) {
    scratch[i] = std::abs(values[i] - center);
  }
  return median_of(scratch);
}

double r_squared(std::span<const double> predicted, std::span<const double> reference) {
  require_same_length(predicted, reference, "r_squared");
  if (reference.size() < 2) {
    throw InvalidArgument("r_squared: need at least 2 samples");
  }
  double mean = 0.0;
  for (double r : reference) mean += r;
  mean /= static_cast<double>(reference.size());

  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double e = reference[i] - predicted[i];
    const double d = reference[i] - mean;
    ss_res += e * e;
    ss_tot += d * d;
  }
  if (!(ss_tot > 0.0)) {
    throw DegenerateReference("r_squared: reference has zero variance");
  }
  return 1.0 - ss_res / ss_tot;
}

double rmse(std::span<const double> predicted, std::span<const double> reference) {
  require_same_length(predicted, reference, "rmse");
  if (reference.empty()) {
    throw InvalidArgument("rmse: empty input");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double e = predicted[i] - reference[i];
    acc += e * e;
  }
  return std::sqrt(acc / static_cast<double>(reference.size()));
}

MetricPair metrics(std::span<const double> predicted, std::span<const double> reference) {
  return MetricPair{r_squared(predicted, reference), rmse(predicted, reference)};
}

}  // namespace robustreg::stats
