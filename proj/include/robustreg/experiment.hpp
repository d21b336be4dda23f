#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "robustreg/dataset.hpp"
#include "robustreg/gpr.hpp"
#include "robustreg/mlp.hpp"
#include "robustreg/ransac.hpp"
#include "robustreg/robust_fit.hpp"
#include "robustreg/stats.hpp"

namespace robustreg {

inline constexpr int kReportSchemaVersion = 1;

enum class Method { kRobustNN, kTraditionalNN, kRobustLinear, kRansac, kGpr };

std::string_view to_string(Method m);
Method parse_method(std::string_view text);

/// Generator ids accepted by make_named_dataset.
const std::vector<std::string>& dataset_ids();
Dataset make_named_dataset(std::string_view id, std::uint64_t seed);

struct DatasetSpec {
  std::string id;                        // generator id, or empty when `path` is set
  std::optional<std::filesystem::path> path;
  std::optional<std::uint64_t> seed;     // defaults to the experiment seed
};

struct MethodSpec {
  Method method = Method::kRobustNN;
  std::optional<std::vector<int>> hidden;    // default depends on the dataset
  std::optional<Activation> activation;      // default depends on the dataset
  TrainingHyper training{};
  RansacOptions ransac{};
  GprGrid gpr{};
};

struct GridSpec {
  std::optional<double> lo;  // default: target domain, else the data range
  std::optional<double> hi;
  int points = 1001;
};

struct ExperimentConfig {
  std::string name;
  DatasetSpec dataset;
  MethodSpec method;
  RobustConfig robust{};
  GridSpec grid{};
  std::uint64_t seed = 0;
  std::filesystem::path output_dir;
};

/// Parses the JSON experiment schema documented in the README. Throws
/// ConfigError naming the offending field.
ExperimentConfig parse_experiment(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& cfg);

struct BatchConfig {
  std::vector<ExperimentConfig> experiments;
  std::filesystem::path output_dir;
};

BatchConfig parse_batch(const nlohmann::json& j);

nlohmann::json load_json(const std::filesystem::path& path);

struct ConfusionCounts {
  // Positive = flagged outlier.
  std::int64_t true_positive = 0;
  std::int64_t false_positive = 0;
  std::int64_t true_negative = 0;
  std::int64_t false_negative = 0;

  double precision() const;
  double recall() const;
};

/// Mask entries are "inlier" flags; a sample counts as predicted outlier when
/// any output component is not an inlier.
ConfusionCounts confusion(const InlierMask& mask, const std::vector<bool>& flags);

struct FitReport {
  int schema_version = kReportSchemaVersion;
  std::string experiment;
  std::string dataset_id;
  std::string method_id;
  std::string architecture;  // e.g. "20,10"; empty for non-network methods
  Eigen::Index rows = 0;
  Eigen::Index flagged = 0;
  std::vector<stats::MetricPair> train;
  std::vector<stats::MetricPair> validation;
  std::vector<stats::MetricPair> test;
  // Against the noise-free mapping: a dense grid for 1-input targets,
  // otherwise the clean outputs of the test split.
  std::optional<std::string> truth_basis;
  std::vector<stats::MetricPair> truth;
  std::optional<ConfusionCounts> outliers;
  std::optional<nlohmann::json> robust;  // per-refinement summary
  nlohmann::json config;
  std::uint64_t seed = 0;
  std::uint64_t dataset_seed = 0;
  std::uint64_t split_seed = 0;
  double wall_seconds = 0.0;  // not serialized into report.json
};

nlohmann::json to_json(const FitReport& report);
FitReport report_from_json(const nlohmann::json& j);

struct ExperimentRun {
  FitReport report;
  ModelPtr model;
  Dataset dataset;
  SplitIndices split;
  std::optional<RobustFitResult> robust;
};

/// Generates or loads the data, splits 80/10/10, fits, evaluates. No files.
ExperimentRun execute_experiment(const ExperimentConfig& cfg);

/// execute_experiment plus report.json, summary.txt, predictions.csv and
/// timing.json in cfg.output_dir.
FitReport run_experiment(const ExperimentConfig& cfg);

/// 1-input models: rows (x, yhat[, f(x)]) over the grid. The truth column is
/// written iff `target` is set.
void emit_predictions(const Model& model, const GridSpec& grid, Interval domain,
                      const std::optional<TargetId>& target, const std::filesystem::path& path);

/// Any model: one row per dataset sample, x1 = sample index, then predictions
/// and, when present, the clean outputs.
void emit_sample_predictions(const Model& model, const Dataset& dataset,
                             const std::filesystem::path& path);

struct ComparisonRow {
  std::string dataset;
  std::string method;
  std::string architecture;
  int output = 0;  // 1-based component
  std::string basis;
  std::string source;  // FitReport field the numbers come from
  stats::MetricPair metrics;
};

struct ComparisonTable {
  std::vector<std::string> datasets;  // first-appearance order
  std::vector<ComparisonRow> rows;    // grouped by dataset
};

ComparisonTable summarize(const std::vector<FitReport>& reports);
std::string render_text(const ComparisonTable& table);
std::string render_csv(const ComparisonTable& table);

std::string render_summary(const FitReport& report);

}  // namespace robustreg
