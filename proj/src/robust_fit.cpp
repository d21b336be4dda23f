#include "robustreg/robust_fit.hpp"

#include "robustreg/errors.hpp"

namespace robustreg {

void RobustConfig::validate() const {
  if (!(gamma > 0.0)) throw InvalidArgument("robust config: gamma must be positive");
  if (refinements < 1) throw InvalidArgument("robust config: refinements must be >= 1");
  if (!(inlier_cutoff > 0.0 && inlier_cutoff < 1.0)) {
    throw InvalidArgument("robust config: inlier cutoff must lie in (0, 1)");
  }
  if (!(kernel.scale > 0.0 && kernel.exponent > 0.0)) {
    throw InvalidArgument("robust config: weight kernel constants must be positive");
  }
}

std::vector<ScheduleStep> refit_schedule(const RobustConfig& cfg) {
  cfg.validate();
  std::vector<ScheduleStep> steps;
  steps.reserve(static_cast<std::size_t>(cfg.refinements));
  for (int k = 0; k < cfg.refinements; ++k) {
    steps.push_back(ScheduleStep{k, cfg.seed + static_cast<std::uint64_t>(k) * kSeedStride, k > 0});
  }
  return steps;
}

WeightSummary summarize_weights(const WeightMatrix& weights, double cutoff) {
  if (weights.size() == 0) return {};
  return WeightSummary{weights.minCoeff(), weights.mean(), weights.maxCoeff(),
                       (weights.array() >= cutoff).cast<double>().mean()};
}

namespace {

double weighted_mse(const ResidualMatrix& residuals, const WeightMatrix& weights) {
  const double total = weights.sum();
  if (!(total > 0.0)) return 0.0;
  return (weights.array() * residuals.array().square()).sum() / total;
}

}  // namespace

RobustFitResult robust_fit(const Regressor& regressor, const Dataset& train, const RobustConfig& cfg,
                           const Dataset* validation) {
  train.validate();
  const std::vector<ScheduleStep> schedule = refit_schedule(cfg);

  RobustFitResult result;
  WeightMatrix weights = unit_weights(train);
  std::vector<RowStats> stats;
  for (const ScheduleStep& step : schedule) {
    RefinementRecord record;
    record.step = step;
    if (step.reweighted) {
      const ResidualMatrix residuals = residual_matrix(train, *result.history.back().model);
      WeightResult w = weight_matrix(residuals, cfg.gamma, cfg.kernel);
      record.weight_change = (w.weights - weights).norm();
      weights = std::move(w.weights);
      stats = std::move(w.stats);
    }
    record.stats = stats;
    record.weights = weights;
    record.summary = summarize_weights(weights, cfg.inlier_cutoff);
    try {
      FitContext ctx{validation, {}, step.seed};
      if (step.reweighted) {
        // Held-out samples are scored, not reweighted: a Huber loss with the
        // training threshold as knee keeps outliers from steering early stopping.
        for (const RowStats& s : stats) ctx.validation_knees.push_back(s.threshold);
      }
      record.model = regressor.fit(train, weights, ctx);
    } catch (const RefinementError&) {
      throw;
    } catch (const NumericalError& e) {
      throw RefinementError(step.index, e.what());
    }
    record.train_loss = weighted_mse(residual_matrix(train, *record.model), weights);
    result.history.push_back(std::move(record));
  }

  result.model = result.history.back().model;
  WeightResult final_weights = weight_matrix(residual_matrix(train, *result.model), cfg.gamma, cfg.kernel);
  result.weights = std::move(final_weights.weights);
  result.stats = std::move(final_weights.stats);
  result.mask = inlier_mask(result.weights, cfg.inlier_cutoff);
  return result;
}

}  // namespace robustreg
