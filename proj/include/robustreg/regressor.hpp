#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>
#include <memory>
#include <string>

#include "robustreg/dataset.hpp"

namespace robustreg {

/// Per-(output, sample) weights, shape n_out x n.
using WeightMatrix = Eigen::MatrixXd;

/// A fitted regressor. Immutable after construction; predict is pure.
class Model {
 public:
  virtual ~Model() = default;

  /// inputs: n x n_in. Returns n x n_out.
  virtual Eigen::MatrixXd predict(const Eigen::MatrixXd& inputs) const = 0;
  virtual Eigen::Index n_inputs() const = 0;
  virtual Eigen::Index n_outputs() const = 0;
  virtual std::string kind() const = 0;
};

using ModelPtr = std::shared_ptr<const Model>;

struct FitContext {
  // Held-out data for early stopping; never enters the parameter updates.
  const Dataset* validation = nullptr;
  // Per-output Huber knees, in output units, for the monitored validation
  // loss. Empty means plain squared error.
  std::vector<double> validation_knees;
  std::uint64_t seed = 0;
};

/// Uniform fit contract consumed by the reweighting loop.
class Regressor {
 public:
  virtual ~Regressor() = default;

  virtual ModelPtr fit(const Dataset& train, const WeightMatrix& weights,
                       const FitContext& context) const = 0;
  virtual std::string name() const = 0;
};

WeightMatrix unit_weights(const Dataset& dataset);

// Throws InvalidArgument unless weights is n_out x n with finite entries >= 0.
void check_weights(const Dataset& dataset, const WeightMatrix& weights);

}  // namespace robustreg
