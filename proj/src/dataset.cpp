#include "robustreg/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "robustreg/errors.hpp"

namespace robustreg {

// --- targets ----------------------------------------------------------------

std::string_view to_string(TargetId id) {
  switch (id) {
    case TargetId::kLine:
      return "line";
    case TargetId::kCubicMix:
      return "cubic-mix";
    case TargetId::kSincMix:
      return "sinc-mix";
    case TargetId::kDynamicsSurrogate:
      return "dynamics-surrogate";
  }
  throw InvalidArgument("unknown target id");
}

TargetId parse_target_id(std::string_view text) {
  for (TargetId id : {TargetId::kLine, TargetId::kCubicMix, TargetId::kSincMix,
                      TargetId::kDynamicsSurrogate}) {
    if (text == to_string(id)) return id;
  }
  throw InvalidArgument("unknown target id '" + std::string(text) + "'");
}

Interval target_domain(TargetId id) {
  switch (id) {
    case TargetId::kLine:
      return {0.0, 10.0};
    case TargetId::kCubicMix:
      return {-2.0, 2.0};
    case TargetId::kSincMix:
      return {-10.0, 10.0};
    case TargetId::kDynamicsSurrogate:
      break;
  }
  throw InvalidArgument("target '" + std::string(to_string(id)) + "' has no 1-D domain");
}

int target_input_arity(TargetId id) { return id == TargetId::kDynamicsSurrogate ? 12 : 1; }
int target_output_arity(TargetId id) { return id == TargetId::kDynamicsSurrogate ? 4 : 1; }

double true_function(TargetId id, double x) {
  switch (id) {
    case TargetId::kLine:
      return 2.0 * x + 1.0;
    case TargetId::kCubicMix:
      return -0.5 * x * x * x + std::cos(5.0 * x) + std::exp(x) - 2.0;
    case TargetId::kSincMix: {
      const double sinc = x == 0.0 ? 1.0 : std::sin(x) / x;
      return 1.0 + 0.05 * x + sinc;
    }
    case TargetId::kDynamicsSurrogate:
      break;
  }
  throw InvalidArgument("target '" + std::string(to_string(id)) + "' is not scalar");
}

Eigen::MatrixXd true_function(TargetId id, const Eigen::MatrixXd& inputs) {
  if (inputs.cols() != target_input_arity(id)) {
    throw InvalidArgument("true_function: expected " + std::to_string(target_input_arity(id)) +
                          " input columns, got " + std::to_string(inputs.cols()));
  }
  Eigen::MatrixXd out(inputs.rows(), target_output_arity(id));
  for (Eigen::Index j = 0; j < inputs.rows(); ++j) {
    if (id == TargetId::kDynamicsSurrogate) {
      const Eigen::Matrix<double, 12, 1> state = inputs.row(j).transpose();
      out.row(j) = surrogate_torque(state).transpose();
    } else {
      out(j, 0) = true_function(id, inputs(j, 0));
    }
  }
  return out;
}

double output_range(TargetId id) {
  const Interval d = target_domain(id);
  constexpr int kSamples = 100001;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int k = 0; k < kSamples; ++k) {
    const double x = d.lo + (d.hi - d.lo) * k / (kSamples - 1);
    const double y = true_function(id, x);
    lo = std::min(lo, y);
    hi = std::max(hi, y);
  }
  return hi - lo;
}

// --- Dataset ----------------------------------------------------------------

std::size_t Dataset::flagged_count() const {
  if (!outlier_flags) return 0;
  return static_cast<std::size_t>(std::count(outlier_flags->begin(), outlier_flags->end(), true));
}

void Dataset::validate() const {
  const Eigen::Index n = inputs.rows();
  if (outputs.rows() != n) {
    throw InvalidArgument("dataset: inputs have " + std::to_string(n) + " rows, outputs " +
                          std::to_string(outputs.rows()));
  }
  if (clean_outputs && (clean_outputs->rows() != n || clean_outputs->cols() != outputs.cols())) {
    throw InvalidArgument("dataset: clean outputs shape mismatch");
  }
  if (outlier_flags && static_cast<Eigen::Index>(outlier_flags->size()) != n) {
    throw InvalidArgument("dataset: outlier flags length mismatch");
  }
  if (!inputs.allFinite() || !outputs.allFinite() ||
      (clean_outputs && !clean_outputs->allFinite())) {
    throw InvalidArgument("dataset: non-finite entry");
  }
}

Dataset Dataset::subset(const std::vector<Eigen::Index>& rows) const {
  Dataset out;
  out.provenance = provenance;
  out.inputs.resize(static_cast<Eigen::Index>(rows.size()), inputs.cols());
  out.outputs.resize(static_cast<Eigen::Index>(rows.size()), outputs.cols());
  if (clean_outputs) out.clean_outputs.emplace(static_cast<Eigen::Index>(rows.size()), outputs.cols());
  if (outlier_flags) out.outlier_flags.emplace(rows.size(), false);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const Eigen::Index j = rows[k];
    if (j < 0 || j >= size()) {
      throw InvalidArgument("dataset subset: row index " + std::to_string(j) + " out of range");
    }
    const auto r = static_cast<Eigen::Index>(k);
    out.inputs.row(r) = inputs.row(j);
    out.outputs.row(r) = outputs.row(j);
    if (clean_outputs) out.clean_outputs->row(r) = clean_outputs->row(j);
    if (outlier_flags) (*out.outlier_flags)[k] = (*outlier_flags)[static_cast<std::size_t>(j)];
  }
  return out;
}

bool operator==(const Dataset& a, const Dataset& b) {
  auto same = [](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    return x.rows() == y.rows() && x.cols() == y.cols() && x == y;
  };
  if (!same(a.inputs, b.inputs) || !same(a.outputs, b.outputs)) return false;
  if (a.clean_outputs.has_value() != b.clean_outputs.has_value()) return false;
  if (a.clean_outputs && !same(*a.clean_outputs, *b.clean_outputs)) return false;
  return a.outlier_flags == b.outlier_flags && a.provenance == b.provenance;
}

// --- seeds ------------------------------------------------------------------

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// --- generators -------------------------------------------------------------

namespace {

Dataset one_d_dataset(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& clean,
                      std::vector<bool> flags, std::string generator, std::uint64_t seed,
                      TargetId target) {
  Dataset ds;
  ds.inputs = x;
  ds.outputs = y;
  ds.clean_outputs = Eigen::MatrixXd(clean);
  ds.outlier_flags = std::move(flags);
  ds.provenance = Provenance{std::move(generator), seed, target};
  return ds;
}

}  // namespace

Dataset make_linear_1(std::uint64_t seed, const LinearOneOptions& options) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> domain_x(options.domain.lo, options.domain.hi);
  std::uniform_real_distribution<double> band_x(options.noisy_band.lo, options.noisy_band.hi);
  std::normal_distribution<double> noise(options.noise_mean, options.noise_sd);

  const int n = options.clean_count + options.noisy_count;
  Eigen::VectorXd x(n), y(n), clean(n);
  std::vector<bool> flags(static_cast<std::size_t>(n), false);
  for (int j = 0; j < options.clean_count; ++j) {
    x(j) = domain_x(rng);
    clean(j) = true_function(TargetId::kLine, x(j));
    y(j) = clean(j);
  }
  for (int j = options.clean_count; j < n; ++j) {
    x(j) = band_x(rng);
    clean(j) = true_function(TargetId::kLine, x(j));
    y(j) = clean(j) + noise(rng);
    flags[static_cast<std::size_t>(j)] = true;
  }
  return one_d_dataset(x, y, clean, std::move(flags), "linear-1", seed, TargetId::kLine);
}

Dataset make_linear_2(std::uint64_t seed, const LinearTwoOptions& options) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> domain_x(options.domain.lo, options.domain.hi);
  std::normal_distribution<double> noise(options.noise_mean, options.noise_sd);

  Eigen::VectorXd x(options.count), y(options.count), clean(options.count);
  for (int j = 0; j < options.count; ++j) {
    x(j) = domain_x(rng);
    clean(j) = true_function(TargetId::kLine, x(j));
    y(j) = clean(j) + noise(rng);
  }
  return one_d_dataset(x, y, clean, std::vector<bool>(static_cast<std::size_t>(options.count), false),
                       "linear-2", seed, TargetId::kLine);
}

Dataset make_nonlinear(TargetId target, std::uint64_t seed, bool with_outliers,
                       const NonlinearOptions& options) {
  double noise_sd = 0.0;
  std::string generator;
  if (target == TargetId::kCubicMix) {
    noise_sd = 0.2;
    generator = "nonlinear-1";
  } else if (target == TargetId::kSincMix) {
    noise_sd = 0.1;
    generator = "nonlinear-2";
  } else {
    throw InvalidArgument("make_nonlinear: target must be cubic-mix or sinc-mix");
  }

  const Interval d = target_domain(target);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> domain_x(d.lo, d.hi);
  std::normal_distribution<double> noise(0.0, noise_sd);

  Eigen::VectorXd x(options.count), y(options.count), clean(options.count);
  for (int j = 0; j < options.count; ++j) {
    x(j) = domain_x(rng);
    clean(j) = true_function(target, x(j));
    y(j) = clean(j) + noise(rng);
  }
  Dataset base = one_d_dataset(x, y, clean, std::vector<bool>(static_cast<std::size_t>(options.count), false),
                               generator, seed, target);
  if (!with_outliers) return base;
  return inject_outliers(base, options.outlier_count, options.offsets, derive_seed(seed, 1));
}

Dataset inject_outliers(const Dataset& dataset, int count, OffsetRange offsets, std::uint64_t seed) {
  if (count < 0) throw InvalidArgument("inject_outliers: negative count");
  if (!dataset.clean_outputs) throw InvalidArgument("inject_outliers: dataset has no clean outputs");
  if (!dataset.provenance.target) throw InvalidArgument("inject_outliers: dataset has no target function");
  if (!(offsets.lo >= 0.0 && offsets.hi >= offsets.lo)) {
    throw InvalidArgument("inject_outliers: invalid offset range");
  }
  if (count == 0) return dataset;

  const TargetId target = *dataset.provenance.target;
  if (dataset.n_inputs() != 1 || dataset.n_outputs() != 1) {
    throw InvalidArgument("inject_outliers: only 1-input, 1-output datasets");
  }
  const Interval d = target_domain(target);
  const double range = output_range(target);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> domain_x(d.lo, d.hi);
  std::uniform_real_distribution<double> magnitude(offsets.lo, offsets.hi);
  std::bernoulli_distribution negative(0.5);

  const Eigen::Index n0 = dataset.size();
  const Eigen::Index n = n0 + count;
  Dataset out = dataset;
  out.inputs.conservativeResize(n, 1);
  out.outputs.conservativeResize(n, 1);
  out.clean_outputs->conservativeResize(n, 1);
  if (!out.outlier_flags) out.outlier_flags.emplace(static_cast<std::size_t>(n0), false);
  out.outlier_flags->resize(static_cast<std::size_t>(n), true);
  for (Eigen::Index j = n0; j < n; ++j) {
    const double x = domain_x(rng);
    const double f = true_function(target, x);
    const double offset = magnitude(rng) * range;
    out.inputs(j, 0) = x;
    out.clean_outputs->coeffRef(j, 0) = f;
    out.outputs(j, 0) = negative(rng) ? f - offset : f + offset;
  }
  out.provenance.generator += "-outliers";
  return out;
}

SplitIndices split_dataset(Eigen::Index n, std::uint64_t seed) {
  if (n < 10) {
    throw InvalidArgument("split_dataset: need at least 10 rows, got " + std::to_string(n));
  }
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);

  const auto n_train = static_cast<std::size_t>(std::floor(0.8 * static_cast<double>(n)));
  const auto n_val = static_cast<std::size_t>(std::floor(0.1 * static_cast<double>(n)));
  SplitIndices s;
  s.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.validation.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train),
                      perm.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  s.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), perm.end());
  return s;
}

SplitIndices split_dataset(const Dataset& dataset, std::uint64_t seed) {
  return split_dataset(dataset.size(), seed);
}

// --- dynamics surrogate -----------------------------------------------------

const std::array<JointConstants, 4>& surrogate_constants() {
  // a, b, c, d, e per joint.
  static const std::array<JointConstants, 4> kConstants{{
      {0.020, 0.050, 0.10, 0.05, 0.30},
      {0.015, 0.080, 0.15, 0.05, 0.20},
      {0.010, 0.040, 0.08, 0.05, 0.25},
      {0.025, 0.060, 0.12, 0.05, 0.10},
  }};
  return kConstants;
}

Eigen::Vector4d surrogate_torque(const Eigen::Matrix<double, 12, 1>& state) {
  const auto& k = surrogate_constants();
  Eigen::Vector4d tau;
  for (int i = 0; i < 4; ++i) {
    const double pos = state(i);
    const double vel = state(4 + i);
    const double acc = state(8 + i);
    const double sign = vel > 0.0 ? 1.0 : (vel < 0.0 ? -1.0 : 0.0);
    tau(i) = k[i].inertia * acc + k[i].viscous * vel +
             k[i].coulomb * sign * (1.0 - std::exp(-std::abs(vel) / k[i].coulomb_smooth)) +
             k[i].gravity * std::sin(pos);
  }
  return tau;
}

double Chirp::phase_at(double t) const {
  return 2.0 * std::numbers::pi * (f0 * t + (f1 - f0) * t * t / (2.0 * duration)) + phase;
}

double Chirp::frequency_at(double t) const { return f0 + (f1 - f0) * t / duration; }

double Chirp::position(double t) const { return amplitude * std::sin(phase_at(t)); }

double Chirp::velocity(double t) const {
  const double omega = 2.0 * std::numbers::pi * frequency_at(t);
  return amplitude * std::cos(phase_at(t)) * omega;
}

double Chirp::acceleration(double t) const {
  const double omega = 2.0 * std::numbers::pi * frequency_at(t);
  const double omega_dot = 2.0 * std::numbers::pi * (f1 - f0) / duration;
  const double phi = phase_at(t);
  return amplitude * (-std::sin(phi) * omega * omega + std::cos(phi) * omega_dot);
}

Dataset make_dynamics_surrogate(std::uint64_t seed, const DynamicsOptions& options) {
  const std::array<double, 4> amplitudes{1.0, 0.8, 1.2, 0.6};
  const std::array<double, 4> phases{0.0, 0.25 * std::numbers::pi, 0.5 * std::numbers::pi,
                                     0.75 * std::numbers::pi};
  std::array<Chirp, 4> chirps;
  for (int i = 0; i < 4; ++i) {
    chirps[i] = Chirp{amplitudes[i], 0.0, 1.0, options.duration, phases[i]};
  }

  const auto n = static_cast<Eigen::Index>(std::llround(options.duration * options.rate_hz)) + 1;
  Dataset ds;
  ds.inputs.resize(n, 12);
  ds.clean_outputs.emplace(n, 4);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double t = static_cast<double>(j) / options.rate_hz;
    Eigen::Matrix<double, 12, 1> state;
    for (int i = 0; i < 4; ++i) {
      state(i) = chirps[i].position(t);
      state(4 + i) = chirps[i].velocity(t);
      state(8 + i) = chirps[i].acceleration(t);
    }
    ds.inputs.row(j) = state.transpose();
    ds.clean_outputs->row(j) = surrogate_torque(state).transpose();
  }

  std::mt19937_64 rng(seed);
  ds.outputs = *ds.clean_outputs;
  for (Eigen::Index i = 0; i < 4; ++i) {
    const double range = ds.clean_outputs->col(i).maxCoeff() - ds.clean_outputs->col(i).minCoeff();
    std::normal_distribution<double> noise(0.0, options.noise_fraction * range);
    for (Eigen::Index j = 0; j < n; ++j) ds.outputs(j, i) += noise(rng);
  }
  ds.outlier_flags.emplace(static_cast<std::size_t>(n), false);
  ds.provenance = Provenance{"dynamics", seed, TargetId::kDynamicsSurrogate};
  return ds;
}

// --- tabular files ----------------------------------------------------------

namespace {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

struct Header {
  int n_in = 0;
  int n_out = 0;
  int n_clean = 0;
  bool has_flags = false;
  std::size_t width() const {
    return static_cast<std::size_t>(n_in + n_out + n_clean) + (has_flags ? 1 : 0);
  }
};

Header parse_header(const std::string& line) {
  Header h;
  // Group order: 0 = x, 1 = y, 2 = yc, 3 = outlier.
  int group = 0;
  const char* names[] = {"x", "y", "yc"};
  int* counts[] = {&h.n_in, &h.n_out, &h.n_clean};
  auto missing = [&](int g) { return ParseError(1, "missing column '" + std::string(names[g]) +
                                                       std::to_string(*counts[g] + 1) + "'"); };
  for (const std::string& name : split_fields(line)) {
    if (h.has_flags) throw ParseError(1, "column '" + name + "' after 'outlier'");
    if (name == "outlier") {
      h.has_flags = true;
      continue;
    }
    int g = -1;
    std::string_view digits;
    if (name.starts_with("yc")) {
      g = 2;
      digits = std::string_view(name).substr(2);
    } else if (name.starts_with("y")) {
      g = 1;
      digits = std::string_view(name).substr(1);
    } else if (name.starts_with("x")) {
      g = 0;
      digits = std::string_view(name).substr(1);
    }
    int index = 0;
    if (g < 0 || digits.empty() ||
        std::from_chars(digits.data(), digits.data() + digits.size(), index).ptr !=
            digits.data() + digits.size()) {
      throw ParseError(1, "unknown column '" + name + "'");
    }
    if (g < group) throw ParseError(1, "column '" + name + "' out of order");
    while (group < g) {
      if (*counts[group] == 0 && group < 2) throw missing(group);
      ++group;
    }
    if (index != *counts[g] + 1) throw missing(g);
    ++*counts[g];
  }
  if (h.n_in == 0) throw missing(0);
  if (h.n_out == 0) throw missing(1);
  if (h.n_clean != 0 && h.n_clean != h.n_out) throw missing(2);
  return h;
}

Provenance parse_metadata(const std::string& line, std::size_t line_no) {
  Provenance p;
  std::istringstream in(line.substr(1));
  std::string token;
  while (in >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "malformed metadata token '" + token + "'");
    const std::string key = token.substr(0, eq);
    const std::string value = token.substr(eq + 1);
    if (key == "generator") {
      p.generator = value;
    } else if (key == "seed") {
      if (std::from_chars(value.data(), value.data() + value.size(), p.seed).ptr !=
          value.data() + value.size()) {
        throw ParseError(line_no, "malformed seed '" + value + "'");
      }
    } else if (key == "target") {
      try {
        p.target = parse_target_id(value);
      } catch (const InvalidArgument& e) {
        throw ParseError(line_no, e.what());
      }
    }
  }
  return p;
}

}  // namespace

void write_table(const Dataset& dataset, const std::filesystem::path& path) {
  dataset.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");

  const Eigen::Index n_in = dataset.n_inputs();
  const Eigen::Index n_out = dataset.n_outputs();
  std::string header;
  for (Eigen::Index i = 1; i <= n_in; ++i) header += (i > 1 ? ",x" : "x") + std::to_string(i);
  for (Eigen::Index i = 1; i <= n_out; ++i) header += ",y" + std::to_string(i);
  if (dataset.clean_outputs) {
    for (Eigen::Index i = 1; i <= n_out; ++i) header += ",yc" + std::to_string(i);
  }
  if (dataset.outlier_flags) header += ",outlier";
  out << header << '\n';

  const Provenance& p = dataset.provenance;
  if (!p.generator.empty() || p.target) {
    out << "# generator=" << (p.generator.empty() ? "unknown" : p.generator) << " seed=" << p.seed;
    if (p.target) out << " target=" << to_string(*p.target);
    out << '\n';
  }

  std::string row;
  for (Eigen::Index j = 0; j < dataset.size(); ++j) {
    row.clear();
    for (Eigen::Index i = 0; i < n_in; ++i) {
      if (i > 0) row += ',';
      row += format_double(dataset.inputs(j, i));
    }
    for (Eigen::Index i = 0; i < n_out; ++i) row += ',' + format_double(dataset.outputs(j, i));
    if (dataset.clean_outputs) {
      for (Eigen::Index i = 0; i < n_out; ++i) row += ',' + format_double((*dataset.clean_outputs)(j, i));
    }
    if (dataset.outlier_flags) row += (*dataset.outlier_flags)[static_cast<std::size_t>(j)] ? ",1" : ",0";
    out << row << '\n';
  }
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

Dataset read_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");

  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw InvalidDataset("'" + path.string() + "': empty file");
  ++line_no;
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const Header h = parse_header(line);

  Dataset ds;
  std::vector<std::vector<double>> rows;
  std::vector<bool> flags;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      if (line_no == 2) {
        ds.provenance = parse_metadata(t, line_no);
        continue;
      }
      throw ParseError(line_no, "metadata allowed only on line 2");
    }
    const auto fields = split_fields(t);
    if (fields.size() != h.width()) {
      throw ParseError(line_no, "expected " + std::to_string(h.width()) + " fields, got " +
                                    std::to_string(fields.size()));
    }
    std::vector<double> values;
    values.reserve(fields.size());
    const std::size_t n_numeric = h.width() - (h.has_flags ? 1 : 0);
    for (std::size_t k = 0; k < n_numeric; ++k) {
      const std::string& f = fields[k];
      double v = 0.0;
      const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
      if (res.ec != std::errc() || res.ptr != f.data() + f.size() || !std::isfinite(v)) {
        throw ParseError(line_no, "invalid number '" + f + "' in column " + std::to_string(k + 1));
      }
      values.push_back(v);
    }
    if (h.has_flags) {
      const std::string& f = fields.back();
      if (f != "0" && f != "1") throw ParseError(line_no, "outlier flag must be 0 or 1, got '" + f + "'");
      flags.push_back(f == "1");
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw InvalidDataset("'" + path.string() + "': empty data section");

  const auto n = static_cast<Eigen::Index>(rows.size());
  ds.inputs.resize(n, h.n_in);
  ds.outputs.resize(n, h.n_out);
  if (h.n_clean > 0) ds.clean_outputs.emplace(n, h.n_out);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& r = rows[static_cast<std::size_t>(j)];
    for (int i = 0; i < h.n_in; ++i) ds.inputs(j, i) = r[static_cast<std::size_t>(i)];
    for (int i = 0; i < h.n_out; ++i) ds.outputs(j, i) = r[static_cast<std::size_t>(h.n_in + i)];
    for (int i = 0; i < h.n_clean; ++i) {
      (*ds.clean_outputs)(j, i) = r[static_cast<std::size_t>(h.n_in + h.n_out + i)];
    }
  }
  if (h.has_flags) ds.outlier_flags = std::move(flags);
  return ds;
}

}  // namespace robustreg
