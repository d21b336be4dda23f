#pragma once

#include <cstdint>
#include <vector>

#include "robustreg/regressor.hpp"
#include "robustreg/weighting.hpp"

namespace robustreg {

struct RobustConfig {
  double gamma = 2.0;
  // Total number of fits; the first one uses unit weights.
  int refinements = 5;
  double inlier_cutoff = kDefaultInlierCutoff;
  WeightKernel kernel{};
  std::uint64_t seed = 0;

  void validate() const;
};

inline constexpr std::uint64_t kSeedStride = 1'000'003;

struct ScheduleStep {
  int index = 0;            // 0 is the unweighted fit
  std::uint64_t seed = 0;   // cfg.seed + index * kSeedStride
  bool reweighted = false;
};

std::vector<ScheduleStep> refit_schedule(const RobustConfig& cfg);

struct WeightSummary {
  double min = 0.0;
  double mean = 0.0;
  double max = 0.0;
  double inlier_fraction = 0.0;  // at cfg.inlier_cutoff
};

WeightSummary summarize_weights(const WeightMatrix& weights, double cutoff);

struct RefinementRecord {
  ScheduleStep step;
  std::vector<RowStats> stats;  // stats that produced `weights`; empty for step 0
  WeightMatrix weights;         // weights this fit was trained with
  WeightSummary summary;
  double train_loss = 0.0;      // weighted mean squared residual of `model` under `weights`
  double weight_change = 0.0;   // Frobenius norm vs previous step's weights
  ModelPtr model;
};

struct RobustFitResult {
  ModelPtr model;
  WeightMatrix weights;             // from the final model's training residuals
  std::vector<RowStats> stats;      // row statistics behind `weights`
  InlierMask mask;
  std::vector<RefinementRecord> history;  // one record per fit
};

/// Iterative reweighting: fit with unit weights, then repeatedly weight the
/// training residuals of the previous model and refit from scratch.
/// Numerical failures are rethrown as RefinementError carrying the step index.
RobustFitResult robust_fit(const Regressor& regressor, const Dataset& train, const RobustConfig& cfg,
                           const Dataset* validation = nullptr);

}  // namespace robustreg
