#include "robustreg/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "robustreg/errors.hpp"
#include "robustreg/linear.hpp"
#include "robustreg/weighting.hpp"

namespace robustreg {

using nlohmann::json;

namespace {

constexpr std::array kMethodIds{
    std::pair{Method::kRobustNN, std::string_view{"robust-nn"}},
    std::pair{Method::kTraditionalNN, std::string_view{"traditional-nn"}},
    std::pair{Method::kRobustLinear, std::string_view{"robust-linear"}},
    std::pair{Method::kRansac, std::string_view{"ransac"}},
    std::pair{Method::kGpr, std::string_view{"gpr"}},
};

// Seed streams derived from the experiment seed.
constexpr std::uint64_t kSplitStream = 2;
constexpr std::uint64_t kFitStream = 3;

bool is_network(Method m) { return m == Method::kRobustNN || m == Method::kTraditionalNN; }

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string join_sizes(const std::vector<int>& sizes) {
  std::string out;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    if (k) out += ',';
    out += std::to_string(sizes[k]);
  }
  return out;
}

// --- strict JSON reading -----------------------------------------------------

void check_keys(const json& obj, const std::string& where, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw ConfigError(where, "expected an object");
  for (const auto& item : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      throw ConfigError(where.empty() ? item.key() : where + "." + item.key(), "unknown key");
    }
  }
}

std::string field(const std::string& where, std::string_view key) {
  return where.empty() ? std::string(key) : where + "." + std::string(key);
}

template <class T>
std::optional<T> get(const json& obj, const std::string& where, std::string_view key) {
  const auto it = obj.find(key);
  if (it == obj.end()) return std::nullopt;
  try {
    if constexpr (std::is_same_v<T, std::uint64_t>) {
      if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<std::int64_t>() >= 0)) throw ConfigError(field(where, key), "expected a non-negative integer");
    } else if constexpr (std::is_integral_v<T>) {
      if (!it->is_number_integer()) throw ConfigError(field(where, key), "expected an integer");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!it->is_number()) throw ConfigError(field(where, key), "expected a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!it->is_string()) throw ConfigError(field(where, key), "expected a string");
    }
    return it->get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(field(where, key), e.what());
  }
}

std::vector<double> get_positive_list(const json& obj, const std::string& where, std::string_view key,
                                      std::vector<double> fallback) {
  const auto v = get<std::vector<double>>(obj, where, key);
  if (!v) return fallback;
  if (v->empty()) throw ConfigError(field(where, key), "must not be empty");
  for (double x : *v) {
    if (!(x > 0.0)) throw ConfigError(field(where, key), "entries must be positive");
  }
  return *v;
}

std::vector<int> parse_hidden(const json& value, const std::string& where) {
  if (!value.is_array()) throw ConfigError(where, "expected an array of layer sizes");
  std::vector<int> sizes;
  for (const auto& v : value) {
    if (!v.is_number_integer() || v.get<long long>() <= 0) {
      throw ConfigError(where, "layer sizes must be positive integers");
    }
    sizes.push_back(v.get<int>());
  }
  return sizes;
}

DatasetSpec parse_dataset(const json& j) {
  DatasetSpec spec;
  if (j.is_string()) {
    spec.id = j.get<std::string>();
  } else {
    check_keys(j, "dataset", {"id", "path", "seed"});
    spec.id = get<std::string>(j, "dataset", "id").value_or("");
    if (auto p = get<std::string>(j, "dataset", "path")) spec.path = *p;
    spec.seed = get<std::uint64_t>(j, "dataset", "seed");
  }
  if (spec.id.empty() == !spec.path.has_value()) {
    throw ConfigError("dataset", "exactly one of 'id' or 'path' is required");
  }
  if (!spec.id.empty()) {
    const auto& ids = dataset_ids();
    if (std::find(ids.begin(), ids.end(), spec.id) == ids.end()) {
      throw ConfigError("dataset.id", "unknown dataset '" + spec.id + "'");
    }
  }
  return spec;
}

MethodSpec parse_method_spec(const json& j) {
  MethodSpec spec;
  const auto method_id = [](const std::string& id) {
    try {
      return parse_method(id);
    } catch (const InvalidArgument& e) {
      throw ConfigError("method.id", e.what());
    }
  };
  if (j.is_string()) {
    spec.method = method_id(j.get<std::string>());
    return spec;
  }
  check_keys(j, "method", {"id", "hidden", "activation", "training", "ransac", "gpr"});
  const auto id = get<std::string>(j, "method", "id");
  if (!id) throw ConfigError("method.id", "required");
  spec.method = method_id(*id);
  if (j.contains("hidden")) spec.hidden = parse_hidden(j["hidden"], "method.hidden");
  if (auto a = get<std::string>(j, "method", "activation")) {
    try {
      spec.activation = parse_activation(*a);
    } catch (const InvalidArgument& e) {
      throw ConfigError("method.activation", e.what());
    }
  }
  if (j.contains("training")) {
    const json& t = j["training"];
    const std::string w = "method.training";
    check_keys(t, w, {"max_epochs", "learning_rate", "final_learning_rate", "patience"});
    TrainingHyper& h = spec.training;
    h.max_epochs = get<int>(t, w, "max_epochs").value_or(h.max_epochs);
    h.learning_rate = get<double>(t, w, "learning_rate").value_or(h.learning_rate);
    h.final_learning_rate = get<double>(t, w, "final_learning_rate").value_or(h.final_learning_rate);
    h.patience = get<int>(t, w, "patience").value_or(h.patience);
    if (h.max_epochs <= 0) throw ConfigError(w + ".max_epochs", "must be positive");
    if (h.patience <= 0) throw ConfigError(w + ".patience", "must be positive");
    if (!(h.learning_rate > 0.0)) throw ConfigError(w + ".learning_rate", "must be positive");
    if (!(h.final_learning_rate > 0.0)) throw ConfigError(w + ".final_learning_rate", "must be positive");
  }
  if (j.contains("ransac")) {
    const json& r = j["ransac"];
    const std::string w = "method.ransac";
    check_keys(r, w, {"max_distance", "iterations"});
    spec.ransac.max_distance = get<double>(r, w, "max_distance").value_or(spec.ransac.max_distance);
    spec.ransac.iterations = get<int>(r, w, "iterations").value_or(spec.ransac.iterations);
    if (!(spec.ransac.max_distance > 0.0)) throw ConfigError(w + ".max_distance", "must be positive");
    if (spec.ransac.iterations <= 0) throw ConfigError(w + ".iterations", "must be positive");
  }
  if (j.contains("gpr")) {
    const json& g = j["gpr"];
    const std::string w = "method.gpr";
    check_keys(g, w, {"length_scales", "signal_variances", "noise_variances"});
    spec.gpr.length_scales = get_positive_list(g, w, "length_scales", spec.gpr.length_scales);
    spec.gpr.signal_variances = get_positive_list(g, w, "signal_variances", spec.gpr.signal_variances);
    spec.gpr.noise_variances = get_positive_list(g, w, "noise_variances", spec.gpr.noise_variances);
  }
  return spec;
}

RobustConfig parse_robust(const json& j) {
  RobustConfig rc;
  check_keys(j, "robust", {"gamma", "refinements", "inlier_cutoff", "kernel_scale", "kernel_exponent"});
  rc.gamma = get<double>(j, "robust", "gamma").value_or(rc.gamma);
  rc.refinements = get<int>(j, "robust", "refinements").value_or(rc.refinements);
  rc.inlier_cutoff = get<double>(j, "robust", "inlier_cutoff").value_or(rc.inlier_cutoff);
  rc.kernel.scale = get<double>(j, "robust", "kernel_scale").value_or(rc.kernel.scale);
  rc.kernel.exponent = get<double>(j, "robust", "kernel_exponent").value_or(rc.kernel.exponent);
  return rc;
}

void validate_robust(const RobustConfig& rc) {
  if (!(rc.gamma > 0.0)) throw ConfigError("robust.gamma", "must be positive");
  if (rc.refinements < 1) throw ConfigError("robust.refinements", "must be at least 1");
  if (!(rc.inlier_cutoff > 0.0 && rc.inlier_cutoff < 1.0)) {
    throw ConfigError("robust.inlier_cutoff", "must lie in (0, 1)");
  }
  if (!(rc.kernel.scale > 0.0)) throw ConfigError("robust.kernel_scale", "must be positive");
  if (!(rc.kernel.exponent > 0.0)) throw ConfigError("robust.kernel_exponent", "must be positive");
}

GridSpec parse_grid(const json& j) {
  GridSpec g;
  check_keys(j, "grid", {"lo", "hi", "points"});
  g.lo = get<double>(j, "grid", "lo");
  g.hi = get<double>(j, "grid", "hi");
  g.points = get<int>(j, "grid", "points").value_or(g.points);
  return g;
}

void validate_grid(const GridSpec& g) {
  if (g.points < 2) throw ConfigError("grid.points", "must be at least 2");
  if (g.lo.has_value() != g.hi.has_value()) throw ConfigError("grid", "set both 'lo' and 'hi' or neither");
  if (g.lo && !(*g.lo < *g.hi)) throw ConfigError("grid", "'lo' must be below 'hi'");
}

json metric_json(const stats::MetricPair& m) { return json{{"r_squared", m.r_squared}, {"rmse", m.rmse}}; }

json metrics_json(const std::vector<stats::MetricPair>& ms) {
  json arr = json::array();
  for (const auto& m : ms) arr.push_back(metric_json(m));
  return arr;
}

std::vector<stats::MetricPair> metrics_from_json(const json& arr) {
  std::vector<stats::MetricPair> out;
  for (const auto& m : arr) out.push_back({m.at("r_squared").get<double>(), m.at("rmse").get<double>()});
  return out;
}

std::span<const double> column(const Eigen::MatrixXd& m, Eigen::Index c) {
  return {m.data() + c * m.rows(), static_cast<std::size_t>(m.rows())};
}

// One MetricPair per output column.
std::vector<stats::MetricPair> column_metrics(const Eigen::MatrixXd& predicted, const Eigen::MatrixXd& reference) {
  std::vector<stats::MetricPair> out;
  for (Eigen::Index c = 0; c < reference.cols(); ++c) {
    out.push_back(stats::metrics(column(predicted, c), column(reference, c)));
  }
  return out;
}

Eigen::MatrixXd grid_inputs(Interval domain, int points) {
  Eigen::MatrixXd x(points, 1);
  for (int k = 0; k < points; ++k) {
    x(k, 0) = points == 1 ? domain.lo : domain.lo + (domain.hi - domain.lo) * k / (points - 1);
  }
  return x;
}

// Grid domain: explicit config, else the target domain, else the data range.
Interval grid_domain(const GridSpec& grid, const Dataset& ds) {
  if (grid.lo) return {*grid.lo, *grid.hi};
  if (ds.provenance.target && target_input_arity(*ds.provenance.target) == 1) {
    return target_domain(*ds.provenance.target);
  }
  return {ds.inputs.col(0).minCoeff(), ds.inputs.col(0).maxCoeff()};
}

bool linear_dataset(const Dataset& ds) { return ds.provenance.target == TargetId::kLine; }

MlpArchitecture resolve_architecture(const MethodSpec& spec, const Dataset& ds) {
  const bool lin = linear_dataset(ds);
  return MlpArchitecture{spec.hidden.value_or(lin ? std::vector<int>{10} : std::vector<int>{20, 10}),
                         spec.activation.value_or(lin ? Activation::kIdentity : Activation::kTanh)};
}

json robust_json(const RobustFitResult& r) {
  json steps = json::array();
  for (const auto& rec : r.history) {
    json stats = json::array();
    for (const auto& s : rec.stats) {
      stats.push_back({{"median", s.median}, {"mad", s.mad}, {"threshold", s.threshold}, {"floored", s.floored}});
    }
    steps.push_back({{"step", rec.step.index},
                     {"seed", rec.step.seed},
                     {"reweighted", rec.step.reweighted},
                     {"train_loss", rec.train_loss},
                     {"weight_change", rec.weight_change},
                     {"weights",
                      {{"min", rec.summary.min},
                       {"mean", rec.summary.mean},
                       {"max", rec.summary.max},
                       {"inlier_fraction", rec.summary.inlier_fraction}}},
                     {"row_stats", stats}});
  }
  json final_stats = json::array();
  for (const auto& s : r.stats) {
    final_stats.push_back({{"median", s.median}, {"mad", s.mad}, {"threshold", s.threshold}, {"floored", s.floored}});
  }
  return json{{"history", steps}, {"final_row_stats", final_stats}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace

// --- ids ----------------------------------------------------------------------

std::string_view to_string(Method m) {
  for (const auto& [method, id] : kMethodIds) {
    if (method == m) return id;
  }
  throw InvalidArgument("unknown method");
}

Method parse_method(std::string_view text) {
  for (const auto& [method, id] : kMethodIds) {
    if (id == text) return method;
  }
  throw InvalidArgument("unknown method '" + std::string(text) + "'");
}

const std::vector<std::string>& dataset_ids() {
  static const std::vector<std::string> ids{"linear-1",    "linear-2",             "nonlinear-1",
                                            "nonlinear-2", "nonlinear-1-outliers", "nonlinear-2-outliers",
                                            "dynamics"};
  return ids;
}

Dataset make_named_dataset(std::string_view id, std::uint64_t seed) {
  if (id == "linear-1") return make_linear_1(seed);
  if (id == "linear-2") return make_linear_2(seed);
  if (id == "nonlinear-1") return make_nonlinear(TargetId::kCubicMix, seed, false);
  if (id == "nonlinear-2") return make_nonlinear(TargetId::kSincMix, seed, false);
  if (id == "nonlinear-1-outliers") return make_nonlinear(TargetId::kCubicMix, seed, true);
  if (id == "nonlinear-2-outliers") return make_nonlinear(TargetId::kSincMix, seed, true);
  if (id == "dynamics") return make_dynamics_surrogate(seed);
  throw ConfigError("dataset.id", "unknown dataset '" + std::string(id) + "'");
}

// --- configs ----------------------------------------------------------------------

ExperimentConfig parse_experiment(const json& j) {
  check_keys(j, "", {"name", "seed", "dataset", "method", "robust", "grid", "output_dir"});
  ExperimentConfig cfg;
  cfg.seed = get<std::uint64_t>(j, "", "seed").value_or(0);
  if (!j.contains("dataset")) throw ConfigError("dataset", "required");
  cfg.dataset = parse_dataset(j["dataset"]);
  if (!j.contains("method")) throw ConfigError("method", "required");
  cfg.method = parse_method_spec(j["method"]);
  if (j.contains("robust")) cfg.robust = parse_robust(j["robust"]);
  validate_robust(cfg.robust);
  if (j.contains("grid")) cfg.grid = parse_grid(j["grid"]);
  validate_grid(cfg.grid);
  if (auto out = get<std::string>(j, "", "output_dir")) cfg.output_dir = *out;
  const std::string dataset_name = cfg.dataset.path ? cfg.dataset.path->stem().string() : cfg.dataset.id;
  cfg.name = get<std::string>(j, "", "name").value_or(std::string(to_string(cfg.method.method)) + "_" + dataset_name);
  if (cfg.name.empty()) throw ConfigError("name", "must not be empty");
  return cfg;
}

json to_json(const ExperimentConfig& cfg) {
  json dataset = json::object();
  if (cfg.dataset.path) {
    dataset["path"] = cfg.dataset.path->generic_string();
  } else {
    dataset["id"] = cfg.dataset.id;
  }
  if (cfg.dataset.seed) dataset["seed"] = *cfg.dataset.seed;

  const MethodSpec& m = cfg.method;
  json method{{"id", to_string(m.method)}};
  if (m.hidden) method["hidden"] = *m.hidden;
  if (m.activation) method["activation"] = to_string(*m.activation);
  method["training"] = {{"max_epochs", m.training.max_epochs},
                        {"learning_rate", m.training.learning_rate},
                        {"final_learning_rate", m.training.final_learning_rate},
                        {"patience", m.training.patience}};
  method["ransac"] = {{"max_distance", m.ransac.max_distance}, {"iterations", m.ransac.iterations}};
  method["gpr"] = {{"length_scales", m.gpr.length_scales},
                   {"signal_variances", m.gpr.signal_variances},
                   {"noise_variances", m.gpr.noise_variances}};

  json grid{{"points", cfg.grid.points}};
  if (cfg.grid.lo) grid["lo"] = *cfg.grid.lo;
  if (cfg.grid.hi) grid["hi"] = *cfg.grid.hi;

  return json{{"name", cfg.name},
              {"seed", cfg.seed},
              {"dataset", dataset},
              {"method", method},
              {"robust",
               {{"gamma", cfg.robust.gamma},
                {"refinements", cfg.robust.refinements},
                {"inlier_cutoff", cfg.robust.inlier_cutoff},
                {"kernel_scale", cfg.robust.kernel.scale},
                {"kernel_exponent", cfg.robust.kernel.exponent}}},
              {"grid", grid},
              {"output_dir", cfg.output_dir.generic_string()}};
}

BatchConfig parse_batch(const json& j) {
  check_keys(j, "", {"output_dir", "defaults", "experiments"});
  BatchConfig batch;
  if (auto out = get<std::string>(j, "", "output_dir")) batch.output_dir = *out;
  const json defaults = j.value("defaults", json::object());
  if (!defaults.is_object()) throw ConfigError("defaults", "expected an object");
  if (!j.contains("experiments") || !j["experiments"].is_array() || j["experiments"].empty()) {
    throw ConfigError("experiments", "expected a non-empty array");
  }
  std::set<std::string> names;
  for (std::size_t k = 0; k < j["experiments"].size(); ++k) {
    json merged = defaults;
    merged.merge_patch(j["experiments"][k]);
    ExperimentConfig cfg;
    try {
      cfg = parse_experiment(merged);
    } catch (const ConfigError& e) {
      throw ConfigError("experiments[" + std::to_string(k) + "]." + e.field(), e.message());
    }
    if (!names.insert(cfg.name).second) {
      throw ConfigError("experiments[" + std::to_string(k) + "].name", "duplicate name '" + cfg.name + "'");
    }
    if (cfg.output_dir.empty()) cfg.output_dir = batch.output_dir / cfg.name;
    batch.experiments.push_back(std::move(cfg));
  }
  return batch;
}

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string(), e.what());
  }
}

// --- confusion ------------------------------------------------------------------

double ConfusionCounts::precision() const {
  const auto flagged = true_positive + false_positive;
  return flagged ? static_cast<double>(true_positive) / static_cast<double>(flagged) : 0.0;
}

double ConfusionCounts::recall() const {
  const auto actual = true_positive + false_negative;
  return actual ? static_cast<double>(true_positive) / static_cast<double>(actual) : 0.0;
}

ConfusionCounts confusion(const InlierMask& mask, const std::vector<bool>& flags) {
  if (static_cast<std::size_t>(mask.cols()) != flags.size()) {
    throw InvalidArgument("confusion: mask and flags disagree in sample count");
  }
  ConfusionCounts c;
  for (Eigen::Index j = 0; j < mask.cols(); ++j) {
    const bool predicted = !mask.col(j).all();
    const bool actual = flags[static_cast<std::size_t>(j)];
    if (predicted && actual) ++c.true_positive;
    if (predicted && !actual) ++c.false_positive;
    if (!predicted && actual) ++c.false_negative;
    if (!predicted && !actual) ++c.true_negative;
  }
  return c;
}

// --- reports --------------------------------------------------------------------

json to_json(const FitReport& r) {
  json j{{"schema_version", r.schema_version},
         {"experiment", r.experiment},
         {"dataset", {{"id", r.dataset_id}, {"rows", r.rows}, {"flagged", r.flagged}}},
         {"method", {{"id", r.method_id}, {"architecture", r.architecture}}},
         {"seeds", {{"experiment", r.seed}, {"dataset", r.dataset_seed}, {"split", r.split_seed}}},
         {"splits", {{"train", metrics_json(r.train)}, {"validation", metrics_json(r.validation)},
                     {"test", metrics_json(r.test)}}}};
  if (r.truth_basis) {
    j["truth"] = {{"basis", *r.truth_basis}, {"metrics", metrics_json(r.truth)}};
  } else {
    j["truth"] = nullptr;
  }
  if (r.outliers) {
    const ConfusionCounts& c = *r.outliers;
    j["outliers"] = {{"true_positive", c.true_positive},   {"false_positive", c.false_positive},
                     {"true_negative", c.true_negative},   {"false_negative", c.false_negative},
                     {"precision", c.precision()},         {"recall", c.recall()}};
  } else {
    j["outliers"] = nullptr;
  }
  j["robust"] = r.robust ? *r.robust : json(nullptr);
  j["config"] = r.config;
  return j;
}

FitReport report_from_json(const json& j) {
  try {
    FitReport r;
    r.schema_version = j.at("schema_version").get<int>();
    if (r.schema_version != kReportSchemaVersion) {
      throw InvalidDataset("unsupported report schema_version " + std::to_string(r.schema_version));
    }
    r.experiment = j.at("experiment").get<std::string>();
    r.dataset_id = j.at("dataset").at("id").get<std::string>();
    r.rows = j.at("dataset").at("rows").get<Eigen::Index>();
    r.flagged = j.at("dataset").at("flagged").get<Eigen::Index>();
    r.method_id = j.at("method").at("id").get<std::string>();
    r.architecture = j.at("method").at("architecture").get<std::string>();
    r.seed = j.at("seeds").at("experiment").get<std::uint64_t>();
    r.dataset_seed = j.at("seeds").at("dataset").get<std::uint64_t>();
    r.split_seed = j.at("seeds").at("split").get<std::uint64_t>();
    r.train = metrics_from_json(j.at("splits").at("train"));
    r.validation = metrics_from_json(j.at("splits").at("validation"));
    r.test = metrics_from_json(j.at("splits").at("test"));
    if (!j.at("truth").is_null()) {
      r.truth_basis = j["truth"].at("basis").get<std::string>();
      r.truth = metrics_from_json(j["truth"].at("metrics"));
    }
    if (!j.at("outliers").is_null()) {
      const json& o = j["outliers"];
      r.outliers = ConfusionCounts{o.at("true_positive").get<std::int64_t>(), o.at("false_positive").get<std::int64_t>(),
                                   o.at("true_negative").get<std::int64_t>(), o.at("false_negative").get<std::int64_t>()};
    }
    if (!j.at("robust").is_null()) r.robust = j["robust"];
    r.config = j.at("config");
    return r;
  } catch (const json::exception& e) {
    throw InvalidDataset(std::string("malformed report: ") + e.what());
  }
}

// --- execution --------------------------------------------------------------------

ExperimentRun execute_experiment(const ExperimentConfig& cfg) {
  validate_robust(cfg.robust);
  validate_grid(cfg.grid);

  ExperimentRun run;
  FitReport& report = run.report;
  report.experiment = cfg.name;
  report.seed = cfg.seed;
  report.dataset_seed = cfg.dataset.seed.value_or(cfg.seed);
  report.split_seed = derive_seed(cfg.seed, kSplitStream);
  const std::uint64_t fit_seed = derive_seed(cfg.seed, kFitStream);

  if (cfg.dataset.path) {
    run.dataset = read_table(*cfg.dataset.path);
    report.dataset_seed = run.dataset.provenance.seed;
    report.dataset_id = run.dataset.provenance.generator.empty() ? cfg.dataset.path->stem().string()
                                                                 : run.dataset.provenance.generator;
  } else {
    run.dataset = make_named_dataset(cfg.dataset.id, report.dataset_seed);
    report.dataset_id = cfg.dataset.id;
  }
  const Dataset& ds = run.dataset;
  ds.validate();
  report.rows = ds.size();
  report.flagged = static_cast<Eigen::Index>(ds.flagged_count());

  const Method method = cfg.method.method;
  report.method_id = std::string(to_string(method));
  if (method == Method::kRansac && (ds.n_inputs() != 1 || ds.n_outputs() != 1)) {
    throw ConfigError("method.id", "ransac requires a 1-input, 1-output dataset");
  }
  if (method == Method::kGpr && ds.n_outputs() != 1) {
    throw ConfigError("method.id", "gpr requires a 1-output dataset");
  }

  run.split = split_dataset(ds, report.split_seed);
  const Dataset train = ds.subset(run.split.train);
  const Dataset validation = ds.subset(run.split.validation);
  const Dataset test = ds.subset(run.split.test);

  RobustConfig rc = cfg.robust;
  rc.seed = fit_seed;
  const MlpArchitecture arch = resolve_architecture(cfg.method, ds);
  if (is_network(method)) report.architecture = join_sizes(arch.hidden) + ":" + std::string(to_string(arch.activation));

  std::optional<LinearModel> ransac_model;
  switch (method) {
    case Method::kRobustNN: {
      MlpRegressor mlp(arch, cfg.method.training);
      run.robust = robust_fit(mlp, train, rc, &validation);
      run.model = run.robust->model;
      break;
    }
    case Method::kTraditionalNN: {
      MlpRegressor mlp(arch, cfg.method.training);
      run.model = mlp.fit(train, unit_weights(train), FitContext{&validation, {}, fit_seed});
      break;
    }
    case Method::kRobustLinear: {
      run.robust = robust_fit(LinearRegressor{}, train, rc);
      run.model = run.robust->model;
      break;
    }
    case Method::kRansac: {
      RansacResult r = ransac_fit(train, cfg.method.ransac.max_distance, cfg.method.ransac.iterations, fit_seed);
      run.model = std::make_shared<LinearModel>(r.model);
      break;
    }
    case Method::kGpr: {
      run.model = std::make_shared<GprModel>(gpr_fit(train, cfg.method.gpr));
      break;
    }
  }
  const Model& model = *run.model;

  report.train = column_metrics(model.predict(train.inputs), train.outputs);
  report.validation = column_metrics(model.predict(validation.inputs), validation.outputs);
  report.test = column_metrics(model.predict(test.inputs), test.outputs);

  const auto& target = ds.provenance.target;
  if (target && ds.n_inputs() == 1 && target_input_arity(*target) == 1) {
    const Eigen::MatrixXd x = grid_inputs(grid_domain(cfg.grid, ds), cfg.grid.points);
    report.truth_basis = "grid";
    report.truth = column_metrics(model.predict(x), true_function(*target, x));
  } else if (ds.clean_outputs) {
    report.truth_basis = "test-clean";
    report.truth = column_metrics(model.predict(test.inputs), *test.clean_outputs);
  }

  if (ds.outlier_flags) {
    if (run.robust) {
      // Every row is classified against the final training residual scale.
      const WeightMatrix w = weights_from_stats(residual_matrix(ds, model), run.robust->stats, rc.kernel);
      report.outliers = confusion(inlier_mask(w, rc.inlier_cutoff), *ds.outlier_flags);
    } else if (method == Method::kRansac) {
      const ResidualMatrix r = residual_matrix(ds, model);
      report.outliers = confusion((r.array().abs() <= cfg.method.ransac.max_distance).matrix(), *ds.outlier_flags);
    }
  }
  if (run.robust) report.robust = robust_json(*run.robust);
  report.config = to_json(cfg);
  return run;
}

FitReport run_experiment(const ExperimentConfig& cfg) {
  if (cfg.output_dir.empty()) throw ConfigError("output_dir", "required");
  const auto start = std::chrono::steady_clock::now();
  ExperimentRun run = execute_experiment(cfg);
  run.report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (ec) throw IoError("cannot create '" + cfg.output_dir.string() + "': " + ec.message());

  write_text(cfg.output_dir / "report.json", to_json(run.report).dump(2) + "\n");
  write_text(cfg.output_dir / "summary.txt", render_summary(run.report));
  write_text(cfg.output_dir / "timing.json",
             json{{"experiment", run.report.experiment}, {"wall_seconds", run.report.wall_seconds}}.dump(2) + "\n");
  const Dataset& ds = run.dataset;
  if (ds.n_inputs() == 1) {
    const auto& target = ds.provenance.target;
    emit_predictions(*run.model, cfg.grid, grid_domain(cfg.grid, ds),
                     target && target_input_arity(*target) == 1 ? target : std::nullopt,
                     cfg.output_dir / "predictions.csv");
  } else {
    emit_sample_predictions(*run.model, ds, cfg.output_dir / "predictions.csv");
  }
  return run.report;
}

void emit_predictions(const Model& model, const GridSpec& grid, Interval domain,
                      const std::optional<TargetId>& target, const std::filesystem::path& path) {
  if (grid.points < 1) throw InvalidArgument("emit_predictions: grid needs at least one point");
  if (model.n_inputs() != 1) throw InvalidArgument("emit_predictions: grid emission needs a 1-input model");
  Dataset out;
  out.inputs = grid_inputs(domain, grid.points);
  out.outputs = model.predict(out.inputs);
  if (target) out.clean_outputs = true_function(*target, out.inputs);
  out.provenance = Provenance{"grid-" + model.kind(), 0, target};
  write_table(out, path);
}

void emit_sample_predictions(const Model& model, const Dataset& dataset, const std::filesystem::path& path) {
  Dataset out;
  out.inputs.resize(dataset.size(), 1);
  for (Eigen::Index j = 0; j < dataset.size(); ++j) out.inputs(j, 0) = static_cast<double>(j);
  out.outputs = model.predict(dataset.inputs);
  out.clean_outputs = dataset.clean_outputs;
  out.provenance = Provenance{"samples-" + model.kind(), dataset.provenance.seed, std::nullopt};
  write_table(out, path);
}

// --- comparison tables ------------------------------------------------------------

ComparisonTable summarize(const std::vector<FitReport>& reports) {
  if (reports.empty()) throw InvalidArgument("summarize: no reports");
  ComparisonTable table;
  for (const auto& r : reports) {
    if (std::find(table.datasets.begin(), table.datasets.end(), r.dataset_id) == table.datasets.end()) {
      table.datasets.push_back(r.dataset_id);
    }
  }
  for (const auto& dataset : table.datasets) {
    for (const auto& r : reports) {
      if (r.dataset_id != dataset) continue;
      const bool truth = r.truth_basis.has_value();
      const auto& metrics = truth ? r.truth : r.test;
      for (std::size_t i = 0; i < metrics.size(); ++i) {
        ComparisonRow row;
        row.dataset = dataset;
        row.method = r.method_id;
        row.architecture = r.architecture;
        row.output = static_cast<int>(i) + 1;
        row.basis = truth ? *r.truth_basis : "test";
        row.source = r.experiment + (truth ? ":truth.metrics[" : ":splits.test[") + std::to_string(i) + "]";
        row.metrics = metrics[i];
        table.rows.push_back(std::move(row));
      }
    }
  }
  return table;
}

std::string render_text(const ComparisonTable& table) {
  std::size_t method_w = 6, arch_w = 4;
  for (const auto& row : table.rows) {
    method_w = std::max(method_w, row.method.size());
    arch_w = std::max(arch_w, row.architecture.size());
  }
  std::ostringstream out;
  for (const auto& dataset : table.datasets) {
    out << "dataset: " << dataset << "\n";
    out << "  " << std::left << std::setw(static_cast<int>(method_w)) << "method" << "  "
        << std::setw(static_cast<int>(arch_w)) << "arch" << "  " << std::right << std::setw(3) << "out" << "  "
        << std::setw(10) << "R2" << "  " << std::setw(10) << "RMSE" << "  basis\n";
    for (const auto& row : table.rows) {
      if (row.dataset != dataset) continue;
      out << "  " << std::left << std::setw(static_cast<int>(method_w)) << row.method << "  "
          << std::setw(static_cast<int>(arch_w)) << (row.architecture.empty() ? "-" : row.architecture) << "  "
          << std::right << std::setw(3) << row.output << "  " << std::fixed << std::setprecision(4)
          << std::setw(10) << row.metrics.r_squared << "  " << std::setw(10) << row.metrics.rmse << "  "
          << row.basis << "\n";
      out.unsetf(std::ios::fixed);
    }
  }
  return out.str();
}

std::string render_csv(const ComparisonTable& table) {
  std::string out = "dataset,method,architecture,output,basis,source,r_squared,rmse\n";
  for (const auto& row : table.rows) {
    out += row.dataset + ',' + row.method + ',' + row.architecture + ',' + std::to_string(row.output) + ',' +
           row.basis + ',' + row.source + ',' + format_double(row.metrics.r_squared) + ',' +
           format_double(row.metrics.rmse) + '\n';
  }
  return out;
}

std::string render_summary(const FitReport& r) {
  std::ostringstream out;
  out << "experiment: " << r.experiment << "\n"
      << "dataset:    " << r.dataset_id << " (" << r.rows << " rows, " << r.flagged << " flagged, seed "
      << r.dataset_seed << ")\n"
      << "method:     " << r.method_id << (r.architecture.empty() ? "" : " [" + r.architecture + "]") << "\n"
      << std::fixed << std::setprecision(4);
  const auto block = [&](const char* label, const std::vector<stats::MetricPair>& ms) {
    for (std::size_t i = 0; i < ms.size(); ++i) {
      out << "  " << std::left << std::setw(12) << label << " y" << i + 1 << std::right << "  R2 " << std::setw(9)
          << ms[i].r_squared << "  RMSE " << std::setw(9) << ms[i].rmse << "\n";
    }
  };
  block("train", r.train);
  block("validation", r.validation);
  block("test", r.test);
  if (r.truth_basis) block(r.truth_basis->c_str(), r.truth);
  if (r.outliers) {
    const ConfusionCounts& c = *r.outliers;
    out << "outliers:   TP " << c.true_positive << "  FP " << c.false_positive << "  TN " << c.true_negative
        << "  FN " << c.false_negative << "  precision " << c.precision() << "  recall " << c.recall() << "\n";
  }
  return out.str();
}

}  // namespace robustreg
