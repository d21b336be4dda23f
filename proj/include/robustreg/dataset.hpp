#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace robustreg {

/// Noise-free mappings the synthetic generators sample from.
enum class TargetId {
  kLine,               // y = 2x + 1
  kCubicMix,           // y = -0.5x^3 + cos(5x) + e^x - 2
  kSincMix,            // y = 1 + 0.05x + sin(x)/x
  kDynamicsSurrogate,  // 12 inputs (theta, dtheta, ddtheta) -> 4 torques
};

std::string_view to_string(TargetId id);
TargetId parse_target_id(std::string_view text);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Default sampling domain of a 1-input target.
Interval target_domain(TargetId id);

int target_input_arity(TargetId id);
int target_output_arity(TargetId id);

/// Scalar evaluation for the 1-input targets. sinc-mix is continued at 0 by its limit.
double true_function(TargetId id, double x);

/// Rowwise evaluation: inputs n x n_in -> outputs n x n_out.
Eigen::MatrixXd true_function(TargetId id, const Eigen::MatrixXd& inputs);

/// max f - min f over the default domain (dense sampling).
double output_range(TargetId id);

struct Provenance {
  std::string generator;
  std::uint64_t seed = 0;
  std::optional<TargetId> target;

  bool operator==(const Provenance&) const = default;
};

/// Paired samples. Row j of `inputs`/`outputs` is sample j.
struct Dataset {
  Eigen::MatrixXd inputs;   // n x n_in
  Eigen::MatrixXd outputs;  // n x n_out
  std::optional<Eigen::MatrixXd> clean_outputs;
  std::optional<std::vector<bool>> outlier_flags;
  Provenance provenance;

  Eigen::Index size() const { return inputs.rows(); }
  Eigen::Index n_inputs() const { return inputs.cols(); }
  Eigen::Index n_outputs() const { return outputs.cols(); }
  std::size_t flagged_count() const;

  // Throws InvalidArgument when row counts disagree or entries are non-finite.
  void validate() const;

  Dataset subset(const std::vector<Eigen::Index>& rows) const;
};

bool operator==(const Dataset& a, const Dataset& b);

struct SplitIndices {
  std::vector<Eigen::Index> train;
  std::vector<Eigen::Index> validation;
  std::vector<Eigen::Index> test;
};

struct OffsetRange {
  double lo = 1.0;  // multiples of output_range(target)
  double hi = 3.0;
};

struct LinearOneOptions {
  Interval domain{0.0, 10.0};
  Interval noisy_band{4.0, 6.0};
  int clean_count = 1000;
  int noisy_count = 100;
  double noise_mean = 1.0;
  double noise_sd = 0.5;
};

struct LinearTwoOptions {
  Interval domain{0.0, 10.0};
  int count = 1100;
  double noise_mean = 0.0;
  double noise_sd = 0.5;
};

struct NonlinearOptions {
  int count = 2000;
  int outlier_count = 150;
  OffsetRange offsets{};
};

Dataset make_linear_1(std::uint64_t seed, const LinearOneOptions& options = {});
Dataset make_linear_2(std::uint64_t seed, const LinearTwoOptions& options = {});

/// `target` must be kCubicMix or kSincMix. Outliers, when requested, come from
/// inject_outliers with seed derive_seed(seed, 1).
Dataset make_nonlinear(TargetId target, std::uint64_t seed, bool with_outliers,
                       const NonlinearOptions& options = {});

/// Appends `count` samples at uniform x over the target domain with y displaced
/// from f(x) by a random-sign offset of magnitude in [lo, hi] * output_range.
Dataset inject_outliers(const Dataset& dataset, int count, OffsetRange offsets, std::uint64_t seed);

/// 80/10/10 random partition, |train| = floor(0.8 n), |validation| = floor(0.1 n).
SplitIndices split_dataset(Eigen::Index n, std::uint64_t seed);
SplitIndices split_dataset(const Dataset& dataset, std::uint64_t seed);

// --- inverse-dynamics surrogate ---------------------------------------------

struct JointConstants {
  double inertia;         // a: N m s^2 / rad
  double viscous;         // b
  double coulomb;         // c
  double coulomb_smooth;  // d: rad/s
  double gravity;         // e
};

/// Per-joint plant constants of the surrogate.
const std::array<JointConstants, 4>& surrogate_constants();

/// tau_i = a theta''_i + b theta'_i + c sign(theta'_i)(1 - exp(-|theta'_i|/d)) + e sin(theta_i).
/// state = (theta_1..4, dtheta_1..4, ddtheta_1..4).
Eigen::Vector4d surrogate_torque(const Eigen::Matrix<double, 12, 1>& state);

struct Chirp {
  double amplitude = 1.0;
  double f0 = 0.0;  // Hz
  double f1 = 1.0;  // Hz
  double duration = 60.0;
  double phase = 0.0;

  double phase_at(double t) const;
  double frequency_at(double t) const;  // instantaneous, Hz
  double position(double t) const;
  double velocity(double t) const;
  double acceleration(double t) const;
};

struct DynamicsOptions {
  double rate_hz = 100.0;
  double duration = 60.0;
  double noise_fraction = 0.01;  // noise sd as a fraction of each torque's range
};

Dataset make_dynamics_surrogate(std::uint64_t seed, const DynamicsOptions& options = {});

// --- seeds ------------------------------------------------------------------

/// Independent stream seed derived from a base seed (splitmix64 mix).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

// --- tabular files ----------------------------------------------------------

void write_table(const Dataset& dataset, const std::filesystem::path& path);
Dataset read_table(const std::filesystem::path& path);

}  // namespace robustreg
