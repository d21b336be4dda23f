#include "robustreg/gpr.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "robustreg/errors.hpp"

namespace robustreg {

GprModel::GprModel(Eigen::MatrixXd train_inputs, Eigen::VectorXd alpha, GprHyper hyper,
                   double log_marginal_likelihood, double noise_used)
    : train_inputs_(std::move(train_inputs)),
      alpha_(std::move(alpha)),
      hyper_(hyper),
      log_marginal_likelihood_(log_marginal_likelihood),
      noise_used_(noise_used) {
  if (alpha_.size() != train_inputs_.rows()) throw InvalidArgument("GprModel: alpha size mismatch");
}

namespace {

Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd d(a.rows(), b.rows());
  for (Eigen::Index j = 0; j < b.rows(); ++j) {
    d.col(j) = (a.rowwise() - b.row(j)).rowwise().squaredNorm();
  }
  return d;
}

Eigen::MatrixXd kernel_from_distances(const Eigen::MatrixXd& sq, const GprHyper& hyper) {
  const double inv = -0.5 / (hyper.length_scale * hyper.length_scale);
  return hyper.signal_variance * (sq.array() * inv).exp();
}

void check_hyper(const GprHyper& h) {
  if (!(h.signal_variance > 0.0 && h.length_scale > 0.0 && h.noise_variance >= 0.0)) {
    throw InvalidArgument("gpr: signal variance and length scale must be positive, noise non-negative");
  }
}

Eigen::VectorXd noise_scales(const Dataset& ds, const WeightMatrix* weights) {
  if (!weights) return Eigen::VectorXd::Ones(ds.size());
  check_weights(ds, *weights);
  return weights->row(0).transpose().cwiseMax(std::numeric_limits<double>::min()).cwiseInverse();
}

void check_dataset(const Dataset& ds) {
  if (ds.size() == 0) throw InvalidArgument("gpr_fit: no training data");
  if (ds.n_outputs() != 1) throw InvalidArgument("gpr_fit: only single-output datasets");
}

struct Solved {
  Eigen::VectorXd alpha;
  double lml = 0.0;
  double noise = 0.0;
};

constexpr int kJitterEscalations = 3;

std::optional<Solved> solve(const Eigen::MatrixXd& kernel, const Eigen::VectorXd& y,
                            const Eigen::VectorXd& noise_scale, double noise_variance) {
  // A zero noise term still needs a positive base for escalation.
  double noise = noise_variance;
  for (int attempt = 0; attempt <= kJitterEscalations; ++attempt) {
    Eigen::MatrixXd system = kernel;
    system.diagonal() += noise * noise_scale;
    Eigen::LLT<Eigen::MatrixXd> llt(system);
    if (llt.info() == Eigen::Success) {
      Solved s;
      s.alpha = llt.solve(y);
      const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
      s.lml = -0.5 * y.dot(s.alpha) - 0.5 * log_det -
              0.5 * static_cast<double>(y.size()) * std::log(2.0 * std::numbers::pi);
      s.noise = noise;
      if (s.alpha.allFinite() && std::isfinite(s.lml)) return s;
    }
    noise = noise > 0.0 ? noise * 10.0 : 1e-12;
  }
  return std::nullopt;
}

}  // namespace

Eigen::MatrixXd se_kernel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const GprHyper& hyper) {
  check_hyper(hyper);
  if (a.cols() != b.cols()) throw InvalidArgument("se_kernel: arity mismatch");
  return kernel_from_distances(squared_distances(a, b), hyper);
}

GprModel gpr_fit(const Dataset& dataset, const GprHyper& hyper, const WeightMatrix* weights) {
  check_dataset(dataset);
  check_hyper(hyper);
  const Eigen::MatrixXd kernel = se_kernel(dataset.inputs, dataset.inputs, hyper);
  const auto solved = solve(kernel, dataset.outputs.col(0), noise_scales(dataset, weights),
                            hyper.noise_variance);
  if (!solved) throw ConditioningError("gpr_fit: kernel system not positive definite after jitter");
  return GprModel(dataset.inputs, solved->alpha, hyper, solved->lml, solved->noise);
}

GprModel gpr_fit(const Dataset& dataset, const GprGrid& grid, const WeightMatrix* weights) {
  check_dataset(dataset);
  if (grid.length_scales.empty() || grid.signal_variances.empty() || grid.noise_variances.empty()) {
    throw InvalidArgument("gpr_fit: empty hyperparameter grid");
  }
  const Eigen::MatrixXd sq = squared_distances(dataset.inputs, dataset.inputs);
  const Eigen::VectorXd scales = noise_scales(dataset, weights);
  const Eigen::VectorXd y = dataset.outputs.col(0);

  std::optional<Solved> best;
  GprHyper best_hyper;
  for (double ell : grid.length_scales) {
    for (double sf2 : grid.signal_variances) {
      GprHyper h{sf2, ell, 0.0};
      check_hyper(h);
      const Eigen::MatrixXd kernel = kernel_from_distances(sq, h);
      for (double sn2 : grid.noise_variances) {
        h.noise_variance = sn2;
        check_hyper(h);
        auto s = solve(kernel, y, scales, sn2);
        if (s && (!best || s->lml > best->lml)) {
          best = std::move(s);
          best_hyper = h;
        }
      }
    }
  }
  if (!best) throw ConditioningError("gpr_fit: no grid point gave a positive-definite system");
  return GprModel(dataset.inputs, best->alpha, best_hyper, best->lml, best->noise);
}

Eigen::MatrixXd GprModel::predict(const Eigen::MatrixXd& inputs) const {
  if (train_inputs_.rows() == 0) throw InvalidArgument("GprModel::predict: model has no training data");
  if (inputs.cols() != n_inputs()) {
    throw InvalidArgument("GprModel::predict: expected " + std::to_string(n_inputs()) +
                          " input columns, got " + std::to_string(inputs.cols()));
  }
  // Chunked to bound the cross-kernel size.
  constexpr Eigen::Index kChunk = 2048;
  Eigen::MatrixXd out(inputs.rows(), 1);
  for (Eigen::Index start = 0; start < inputs.rows(); start += kChunk) {
    const Eigen::Index len = std::min(kChunk, inputs.rows() - start);
    out.middleRows(start, len) = se_kernel(inputs.middleRows(start, len), train_inputs_, hyper_) * alpha_;
  }
  return out;
}

Eigen::MatrixXd gpr_predict(const GprModel& model, const Eigen::MatrixXd& inputs) {
  return model.predict(inputs);
}

ModelPtr GprRegressor::fit(const Dataset& train, const WeightMatrix& weights,
                           const FitContext& /*context*/) const {
  return std::make_shared<GprModel>(gpr_fit(train, grid_, &weights));
}

}  // namespace robustreg
