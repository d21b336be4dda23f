#include "robustreg/regressor.hpp"

#include "robustreg/errors.hpp"

namespace robustreg {

WeightMatrix unit_weights(const Dataset& dataset) {
  return WeightMatrix::Ones(dataset.n_outputs(), dataset.size());
}

void check_weights(const Dataset& dataset, const WeightMatrix& weights) {
  if (weights.rows() != dataset.n_outputs() || weights.cols() != dataset.size()) {
    throw InvalidArgument("weights must be " + std::to_string(dataset.n_outputs()) + " x " +
                          std::to_string(dataset.size()) + ", got " + std::to_string(weights.rows()) +
                          " x " + std::to_string(weights.cols()));
  }
  if (!weights.allFinite() || (weights.array() < 0.0).any()) {
    throw InvalidArgument("weights must be finite and non-negative");
  }
}

}  // namespace robustreg
