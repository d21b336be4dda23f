#include "robustreg/mlp.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "robustreg/errors.hpp"

namespace robustreg {

std::string_view to_string(Activation a) {
  return a == Activation::kIdentity ? "identity" : "tanh";
}

Activation parse_activation(std::string_view text) {
  if (text == "identity" || text == "linear") return Activation::kIdentity;
  if (text == "tanh") return Activation::kTanh;
  throw InvalidArgument("unknown activation '" + std::string(text) + "'");
}

// --- Standardizer -----------------------------------------------------------

Standardizer Standardizer::identity(Eigen::Index width) {
  return Standardizer{Eigen::RowVectorXd::Zero(width), Eigen::RowVectorXd::Ones(width)};
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& values) const {
  return (values.rowwise() - mean).array().rowwise() / scale.array();
}

Eigen::MatrixXd Standardizer::invert(const Eigen::MatrixXd& values) const {
  Eigen::MatrixXd out = values.array().rowwise() * scale.array();
  out.rowwise() += mean;
  return out;
}

// --- MlpModel ---------------------------------------------------------------

MlpModel::MlpModel(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw InvalidArgument("MlpModel: no layers");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    if (layer.bias.size() != layer.weights.cols()) {
      throw InvalidArgument("MlpModel: bias size mismatch in layer " + std::to_string(l));
    }
    if (l > 0 && layers_[l - 1].weights.cols() != layer.weights.rows()) {
      throw InvalidArgument("MlpModel: layer " + std::to_string(l) + " is not conformable");
    }
  }
  if (layers_.back().activation != Activation::kIdentity) {
    throw InvalidArgument("MlpModel: output layer must be affine");
  }
  input_scaling_ = Standardizer::identity(n_inputs());
  output_scaling_ = Standardizer::identity(n_outputs());
}

std::vector<int> MlpModel::sizes() const {
  std::vector<int> s{static_cast<int>(n_inputs())};
  for (const auto& layer : layers_) s.push_back(static_cast<int>(layer.weights.cols()));
  return s;
}

Eigen::Index MlpModel::parameter_count() const {
  Eigen::Index count = 0;
  for (const auto& layer : layers_) count += layer.weights.size() + layer.bias.size();
  return count;
}

Eigen::VectorXd MlpModel::parameters() const {
  Eigen::VectorXd flat(parameter_count());
  Eigen::Index k = 0;
  for (const auto& layer : layers_) {
    flat.segment(k, layer.weights.size()) = layer.weights.reshaped();
    k += layer.weights.size();
    flat.segment(k, layer.bias.size()) = layer.bias;
    k += layer.bias.size();
  }
  return flat;
}

void MlpModel::set_parameters(const Eigen::VectorXd& flat) {
  if (flat.size() != parameter_count()) throw InvalidArgument("set_parameters: size mismatch");
  Eigen::Index k = 0;
  for (auto& layer : layers_) {
    layer.weights.reshaped() = flat.segment(k, layer.weights.size());
    k += layer.weights.size();
    layer.bias = flat.segment(k, layer.bias.size());
    k += layer.bias.size();
  }
}

void MlpModel::set_scaling(Standardizer input, Standardizer output) {
  if (input.mean.size() != n_inputs() || input.scale.size() != n_inputs() ||
      output.mean.size() != n_outputs() || output.scale.size() != n_outputs()) {
    throw InvalidArgument("set_scaling: width mismatch");
  }
  input_scaling_ = std::move(input);
  output_scaling_ = std::move(output);
}

namespace {

// tanh through the vectorized exp: 1 - 2 / (e^{2z} + 1). Saturates cleanly
// at +-1 when e^{2z} under- or overflows.
void activate(Eigen::MatrixXd& z, Activation a) {
  if (a == Activation::kTanh) z = 1.0 - 2.0 / ((2.0 * z.array()).exp() + 1.0);
}

// Activations of every layer for network-space inputs; acts[0] is the input.
std::vector<Eigen::MatrixXd> forward(const std::vector<DenseLayer>& layers, const Eigen::MatrixXd& x) {
  std::vector<Eigen::MatrixXd> acts;
  acts.reserve(layers.size() + 1);
  acts.push_back(x);
  for (const auto& layer : layers) {
    Eigen::MatrixXd z = acts.back() * layer.weights;
    z.rowwise() += layer.bias.transpose();
    activate(z, layer.activation);
    acts.push_back(std::move(z));
  }
  return acts;
}

void check_conformable(const MlpModel& model, const Dataset& dataset, const WeightMatrix& weights) {
  if (dataset.n_inputs() != model.n_inputs() || dataset.n_outputs() != model.n_outputs()) {
    throw InvalidArgument("mlp: dataset arity does not match model");
  }
  check_weights(dataset, weights);
}

}  // namespace

Eigen::MatrixXd MlpModel::predict(const Eigen::MatrixXd& inputs) const {
  if (inputs.cols() != n_inputs()) {
    throw InvalidArgument("MlpModel::predict: expected " + std::to_string(n_inputs()) +
                          " input columns, got " + std::to_string(inputs.cols()));
  }
  Eigen::MatrixXd h = input_scaling_.apply(inputs);
  for (const auto& layer : layers_) {
    Eigen::MatrixXd z = h * layer.weights;
    z.rowwise() += layer.bias.transpose();
    activate(z, layer.activation);
    h = std::move(z);
  }
  return output_scaling_.invert(h);
}

MlpModel mlp_init(std::span<const int> sizes, Activation hidden, std::uint64_t seed) {
  if (sizes.size() < 2) throw InvalidArgument("mlp_init: need input and output sizes");
  for (int s : sizes) {
    if (s <= 0) throw InvalidArgument("mlp_init: layer sizes must be positive");
  }
  std::mt19937_64 rng(seed);
  std::vector<DenseLayer> layers;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const int fan_in = sizes[l];
    const int fan_out = sizes[l + 1];
    std::normal_distribution<double> dist(0.0, 1.0 / std::sqrt(static_cast<double>(fan_in)));
    DenseLayer layer;
    layer.weights.resize(fan_in, fan_out);
    for (Eigen::Index c = 0; c < fan_out; ++c) {
      for (Eigen::Index r = 0; r < fan_in; ++r) layer.weights(r, c) = dist(rng);
    }
    layer.bias = Eigen::VectorXd::Zero(fan_out);
    layer.activation = l + 2 == sizes.size() ? Activation::kIdentity : hidden;
    layers.push_back(std::move(layer));
  }
  return MlpModel(std::move(layers));
}

LossAndGradient mlp_loss_and_gradient(const MlpModel& model, const Dataset& dataset,
                                      const WeightMatrix& weights) {
  check_conformable(model, dataset, weights);
  const double total = weights.sum();
  if (!(total > 0.0)) throw InvalidArgument("mlp loss: weights sum to zero");

  const auto& layers = model.layers();
  const auto acts = forward(layers, model.input_scaling().apply(dataset.inputs));
  const Eigen::MatrixXd predicted = model.output_scaling().invert(acts.back());
  const Eigen::MatrixXd diff = predicted - dataset.outputs;
  const Eigen::ArrayXXd w = weights.transpose().array();

  LossAndGradient out;
  out.loss = (w * diff.array().square()).sum() / total;

  // d loss / d network output, then back through the layers.
  Eigen::MatrixXd grad = ((2.0 / total) * w * diff.array()).rowwise() *
                         model.output_scaling().scale.array();
  out.gradient.resize(model.parameter_count());
  std::vector<Eigen::Index> offsets(layers.size());
  Eigen::Index k = 0;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    offsets[l] = k;
    k += layers[l].weights.size() + layers[l].bias.size();
  }
  for (std::size_t l = layers.size(); l-- > 0;) {
    const auto& layer = layers[l];
    if (layer.activation == Activation::kTanh) {
      grad.array() *= 1.0 - acts[l + 1].array().square();
    }
    const Eigen::MatrixXd dw = acts[l].transpose() * grad;
    out.gradient.segment(offsets[l], dw.size()) = dw.reshaped();
    out.gradient.segment(offsets[l] + dw.size(), layer.bias.size()) = grad.colwise().sum().transpose();
    if (l > 0) grad = grad * layer.weights.transpose();
  }
  return out;
}

double mlp_loss(const MlpModel& model, const Dataset& dataset, const WeightMatrix& weights) {
  check_conformable(model, dataset, weights);
  const double total = weights.sum();
  if (!(total > 0.0)) throw InvalidArgument("mlp loss: weights sum to zero");
  const Eigen::MatrixXd diff = model.predict(dataset.inputs) - dataset.outputs;
  return (weights.transpose().array() * diff.array().square()).sum() / total;
}

namespace {

// Weighted column statistics; columns with (near) zero spread keep unit scale.
Standardizer weighted_standardizer(const Eigen::MatrixXd& values, const Eigen::MatrixXd& col_weights) {
  const Eigen::Index width = values.cols();
  Standardizer s{Eigen::RowVectorXd(width), Eigen::RowVectorXd(width)};
  for (Eigen::Index c = 0; c < width; ++c) {
    const Eigen::VectorXd w = col_weights.col(col_weights.cols() == 1 ? 0 : c);
    const double total = w.sum();
    const double mean = w.dot(values.col(c)) / total;
    const double var = w.dot((values.col(c).array() - mean).square().matrix()) / total;
    const double sd = std::sqrt(var);
    s.mean(c) = mean;
    s.scale(c) = sd > 1e-12 * std::max(1.0, std::abs(mean)) ? sd : 1.0;
  }
  return s;
}

Dataset standardized(const Dataset& ds, const Standardizer& in, const Standardizer& out) {
  Dataset z;
  z.inputs = in.apply(ds.inputs);
  z.outputs = out.apply(ds.outputs);
  return z;
}

}  // namespace

MlpFitResult mlp_fit(const Dataset& train, const WeightMatrix& weights, const MlpArchitecture& arch,
                     const TrainingHyper& hyper, const Dataset* validation,
                     std::span<const double> validation_knees) {
  check_weights(train, weights);
  if (hyper.max_epochs <= 0 || hyper.patience <= 0 || !(hyper.learning_rate > 0.0) ||
      !(hyper.final_learning_rate > 0.0)) {
    throw InvalidArgument("mlp_fit: epochs, patience and learning rates must be positive");
  }
  if (!(weights.sum() > 0.0)) throw InvalidArgument("mlp_fit: weights sum to zero");
  if (validation && (validation->n_inputs() != train.n_inputs() ||
                     validation->n_outputs() != train.n_outputs() || validation->size() == 0)) {
    throw InvalidArgument("mlp_fit: validation set does not match training arity");
  }

  std::vector<int> sizes{static_cast<int>(train.n_inputs())};
  sizes.insert(sizes.end(), arch.hidden.begin(), arch.hidden.end());
  sizes.push_back(static_cast<int>(train.n_outputs()));
  MlpModel model = mlp_init(sizes, arch.activation, hyper.seed);

  const Eigen::MatrixXd sample_weights = weights.colwise().mean().transpose();
  const Standardizer in_scale = weighted_standardizer(train.inputs, sample_weights);
  const Standardizer out_scale = weighted_standardizer(train.outputs, weights.transpose());
  const Dataset z_train = standardized(train, in_scale, out_scale);
  const Dataset z_val = validation ? standardized(*validation, in_scale, out_scale) : Dataset{};
  if (!validation_knees.empty() &&
      static_cast<Eigen::Index>(validation_knees.size()) != train.n_outputs()) {
    throw InvalidArgument("mlp_fit: one validation knee per output required");
  }
  // Standardized units, so every output counts alike.
  std::vector<double> knees(static_cast<std::size_t>(train.n_outputs()),
                            std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < validation_knees.size(); ++i) {
    if (!(validation_knees[i] > 0.0)) throw InvalidArgument("mlp_fit: validation knees must be positive");
    knees[i] = validation_knees[i] / out_scale.scale(static_cast<Eigen::Index>(i));
  }
  const auto validation_loss = [&](const MlpModel& m) {
    const Eigen::MatrixXd z_res = z_val.outputs - forward(m.layers(), z_val.inputs).back();
    double total = 0.0;
    for (Eigen::Index i = 0; i < z_res.cols(); ++i) {
      const double k = knees[static_cast<std::size_t>(i)];
      for (Eigen::Index j = 0; j < z_res.rows(); ++j) {
        const double z = z_res(j, i);
        const double a = std::abs(z);
        total += a <= k ? z * z : 2.0 * k * a - k * k;
      }
    }
    return total / static_cast<double>(z_res.size());
  };

  Eigen::VectorXd params = model.parameters();
  Eigen::VectorXd m = Eigen::VectorXd::Zero(params.size());
  Eigen::VectorXd v = Eigen::VectorXd::Zero(params.size());
  Eigen::VectorXd best = params;
  double best_loss = std::numeric_limits<double>::infinity();

  MlpFitResult result{model, {}};
  TrainingTrace& trace = result.trace;
  const double decay = hyper.max_epochs > 1
                           ? std::log(hyper.final_learning_rate / hyper.learning_rate) / (hyper.max_epochs - 1)
                           : 0.0;
  double beta1_t = 1.0;
  double beta2_t = 1.0;
  for (int epoch = 0; epoch < hyper.max_epochs; ++epoch) {
    model.set_parameters(params);
    const LossAndGradient lg = mlp_loss_and_gradient(model, z_train, weights);
    const double monitored = validation ? validation_loss(model) : lg.loss;
    if (!std::isfinite(lg.loss) || !std::isfinite(monitored) || !lg.gradient.allFinite()) {
      throw DivergenceError(epoch, "mlp_fit: non-finite loss");
    }
    trace.train_loss.push_back(lg.loss);
    trace.validation_loss.push_back(monitored);
    if (monitored < best_loss) {
      best_loss = monitored;
      best = params;
      trace.best_epoch = epoch;
    }
    trace.best_validation_loss.push_back(best_loss);
    if (epoch - trace.best_epoch >= hyper.patience) break;

    const double lr = hyper.learning_rate * std::exp(decay * epoch);
    beta1_t *= hyper.beta1;
    beta2_t *= hyper.beta2;
    m = hyper.beta1 * m + (1.0 - hyper.beta1) * lg.gradient;
    v = hyper.beta2 * v + (1.0 - hyper.beta2) * lg.gradient.cwiseAbs2();
    const Eigen::ArrayXd m_hat = m.array() / (1.0 - beta1_t);
    const Eigen::ArrayXd v_hat = v.array() / (1.0 - beta2_t);
    params.array() -= lr * m_hat / (v_hat.sqrt() + hyper.epsilon);
  }

  model.set_parameters(best);
  model.set_scaling(in_scale, out_scale);
  result.model = std::move(model);
  return result;
}

MlpRegressor::MlpRegressor(MlpArchitecture arch, TrainingHyper hyper)
    : arch_(std::move(arch)), hyper_(hyper) {}

ModelPtr MlpRegressor::fit(const Dataset& train, const WeightMatrix& weights,
                           const FitContext& context) const {
  TrainingHyper hyper = hyper_;
  hyper.seed = context.seed;
  return std::make_shared<MlpModel>(
      mlp_fit(train, weights, arch_, hyper, context.validation, context.validation_knees).model);
}

}  // namespace robustreg
