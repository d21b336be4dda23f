#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "robustreg/regressor.hpp"

namespace robustreg {

enum class Activation { kIdentity, kTanh };

std::string_view to_string(Activation a);
Activation parse_activation(std::string_view text);

struct DenseLayer {
  Eigen::MatrixXd weights;  // fan_in x fan_out
  Eigen::VectorXd bias;     // fan_out
  Activation activation = Activation::kIdentity;
};

/// Per-column affine normalization z = (v - mean) / scale.
struct Standardizer {
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd scale;

  static Standardizer identity(Eigen::Index width);
  Eigen::MatrixXd apply(const Eigen::MatrixXd& values) const;
  Eigen::MatrixXd invert(const Eigen::MatrixXd& values) const;
};

/// Feedforward network; the last layer is always affine.
class MlpModel final : public Model {
 public:
  explicit MlpModel(std::vector<DenseLayer> layers);

  Eigen::MatrixXd predict(const Eigen::MatrixXd& inputs) const override;
  Eigen::Index n_inputs() const override { return layers_.front().weights.rows(); }
  Eigen::Index n_outputs() const override { return layers_.back().weights.cols(); }
  std::string kind() const override { return "mlp"; }

  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<int> sizes() const;
  Eigen::Index parameter_count() const;

  // Parameters in layer order, weights (column-major) then bias.
  Eigen::VectorXd parameters() const;
  void set_parameters(const Eigen::VectorXd& flat);

  const Standardizer& input_scaling() const { return input_scaling_; }
  const Standardizer& output_scaling() const { return output_scaling_; }
  void set_scaling(Standardizer input, Standardizer output);

 private:
  std::vector<DenseLayer> layers_;
  Standardizer input_scaling_;
  Standardizer output_scaling_;
};

/// Weights ~ N(0, 1/fan_in), biases zero. Hidden layers use `hidden`, the
/// output layer is identity. Deterministic in `seed`.
MlpModel mlp_init(std::span<const int> sizes, Activation hidden, std::uint64_t seed);

struct LossAndGradient {
  double loss = 0.0;
  Eigen::VectorXd gradient;  // same layout as MlpModel::parameters()
};

/// loss = sum_ij W(i,j) (y(j,i) - yhat(j,i))^2 / sum_ij W(i,j), evaluated on
/// model.predict (scaling included). Gradient by reverse-mode accumulation.
LossAndGradient mlp_loss_and_gradient(const MlpModel& model, const Dataset& dataset,
                                      const WeightMatrix& weights);
double mlp_loss(const MlpModel& model, const Dataset& dataset, const WeightMatrix& weights);

struct TrainingHyper {
  int max_epochs = 5000;
  double learning_rate = 1e-2;        // first epoch
  double final_learning_rate = 1e-3;  // geometric decay reaches this at max_epochs
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int patience = 50;
  std::uint64_t seed = 0;
};

struct MlpArchitecture {
  std::vector<int> hidden;  // may be empty: a single affine layer
  Activation activation = Activation::kTanh;
};

struct TrainingTrace {
  std::vector<double> train_loss;
  std::vector<double> validation_loss;
  std::vector<double> best_validation_loss;  // running minimum
  int best_epoch = 0;
};

struct MlpFitResult {
  MlpModel model;
  TrainingTrace trace;
};

/// Full-batch Adam on standardized data with early stopping on the
/// validation loss. Returns the parameters with the best validation loss.
/// The monitored loss is the mean over validation entries of rho(z), z the
/// standardized residual: z^2 for |z| <= k, 2k|z| - k^2 beyond, with
/// k = knee / output scale (k = inf when `validation_knees` is empty). Without
/// a validation set the weighted training loss is monitored.
/// Throws DivergenceError on a non-finite loss.
MlpFitResult mlp_fit(const Dataset& train, const WeightMatrix& weights, const MlpArchitecture& arch,
                     const TrainingHyper& hyper, const Dataset* validation = nullptr,
                     std::span<const double> validation_knees = {});

class MlpRegressor final : public Regressor {
 public:
  MlpRegressor(MlpArchitecture arch, TrainingHyper hyper);

  ModelPtr fit(const Dataset& train, const WeightMatrix& weights,
               const FitContext& context) const override;
  std::string name() const override { return "mlp"; }

  const MlpArchitecture& architecture() const { return arch_; }
  const TrainingHyper& hyper() const { return hyper_; }

 private:
  MlpArchitecture arch_;
  TrainingHyper hyper_;
};

}  // namespace robustreg
