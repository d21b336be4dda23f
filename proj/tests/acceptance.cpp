// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <Eigen/Core>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "robustreg/errors.hpp"
#include "robustreg/experiment.hpp"
#include "robustreg/linear.hpp"
#include "robustreg/mlp.hpp"
#include "robustreg/robust_fit.hpp"
#include "robustreg/stats.hpp"
#include "robustreg/weighting.hpp"

using namespace robustreg;
using nlohmann::json;

namespace {

// Tolerances.
constexpr double kLineCoefTol = 0.02;
constexpr double kLineRmseMax = 0.02;
constexpr double kTraditionalLineRmseMin = 0.1;
constexpr double kRansacRatioMin = 3.0;
constexpr double kRobustOutlierRmseMax = 0.1;
constexpr double kBaselineOutlierRmseMin = 0.15;
constexpr double kCleanR2Min = 0.9;
constexpr double kRecallMin = 0.9;
constexpr double kPrecisionMin = 0.8;
constexpr double kDynamicsR2Min = 0.9;
constexpr int kDynamicsComponentsMin = 3;
constexpr double kSubsetTol = 1e-9;
constexpr double kGradientRelTol = 1e-5;

constexpr int kLinearTwoSeeds = 5;
constexpr int kOutlierSeeds = 3;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

ExperimentRun run(const std::string& dataset, const std::string& method, std::uint64_t seed,
                  const json& method_extra = json::object()) {
  json method_json = method_extra;
  method_json["id"] = method;
  return execute_experiment(parse_experiment({{"dataset", dataset}, {"method", method_json}, {"seed", seed}}));
}

double grid_rmse(const ExperimentRun& r) { return r.report.truth.at(0).rmse; }

// Majority over `seeds` trials; stops once the outcome cannot change.
Outcome majority(int seeds, const std::function<bool(std::uint64_t, std::string&)>& trial) {
  Outcome o;
  int passed = 0, failed = 0;
  const int needed = seeds / 2 + 1;
  for (int s = 1; s <= seeds && passed < needed && failed < needed; ++s) {
    std::string note;
    const bool ok = trial(static_cast<std::uint64_t>(s), note);
    (ok ? passed : failed) += 1;
    o.detail += (o.detail.empty() ? "" : "; ") + std::string("seed ") + std::to_string(s) + (ok ? " ok " : " bad ") + note;
  }
  o.pass = passed >= needed;
  o.detail = std::to_string(passed) + "/" + std::to_string(passed + failed) + " seeds pass [" + o.detail + "]";
  return o;
}

void check(Outcome& o, bool ok, const std::string& what) {
  o.pass = o.pass && ok;
  o.detail += (o.detail.empty() ? "" : "; ") + what + (ok ? "" : " (FAIL)");
}

// --- criteria -------------------------------------------------------------------

// Slope and intercept of a 1-input model that is affine by construction.
std::pair<double, double> affine_coefficients(const Model& m) {
  Eigen::MatrixXd x(2, 1);
  x << 0.0, 10.0;
  const Eigen::MatrixXd y = m.predict(x);
  return {(y(1, 0) - y(0, 0)) / 10.0, y(0, 0)};
}

std::map<std::string, ExperimentRun> g_outlier_runs;  // robust-NN runs reused by criterion 5

Outcome criterion_1() {
  Outcome o;
  for (const char* method : {"robust-linear", "robust-nn"}) {
    const ExperimentRun r = run("linear-1", method, 1);
    const auto [slope, intercept] = affine_coefficients(*r.model);
    check(o, std::abs(slope - 2.0) <= kLineCoefTol && std::abs(intercept - 1.0) <= kLineCoefTol,
          std::string(method) + " slope " + fmt("%.4f", slope) + " intercept " + fmt("%.4f", intercept));
    check(o, grid_rmse(r) <= kLineRmseMax, std::string(method) + " rmse " + fmt("%.2e", grid_rmse(r)));
  }
  const double trad = grid_rmse(run("linear-1", "traditional-nn", 1));
  check(o, trad >= kTraditionalLineRmseMin, "traditional-nn rmse " + fmt("%.4f", trad) + " (need >= 0.1)");
  const double ransac = grid_rmse(run("linear-1", "ransac", 1));
  check(o, ransac <= kLineRmseMax, "ransac rmse " + fmt("%.4f", ransac));
  return o;
}

Outcome criterion_2() {
  return majority(kLinearTwoSeeds, [](std::uint64_t seed, std::string& note) {
    const double robust = grid_rmse(run("linear-2", "robust-nn", seed));
    const double trad = grid_rmse(run("linear-2", "traditional-nn", seed));
    const double ransac = grid_rmse(run("linear-2", "ransac", seed));
    note = "robust " + fmt("%.4f", robust) + " trad " + fmt("%.4f", trad) + " ransac " + fmt("%.4f", ransac);
    return robust <= trad && ransac >= kRansacRatioMin * robust;
  });
}

Outcome criterion_3() {
  Outcome o;
  for (const char* dataset : {"nonlinear-1-outliers", "nonlinear-2-outliers"}) {
    const Outcome d = majority(kOutlierSeeds, [dataset](std::uint64_t seed, std::string& note) {
      ExperimentRun robust = run(dataset, "robust-nn", seed);
      const double r = grid_rmse(robust);
      if (seed == 1) g_outlier_runs.emplace(dataset, std::move(robust));
      const double t = grid_rmse(run(dataset, "traditional-nn", seed));
      const double g = grid_rmse(run(dataset, "gpr", seed));
      note = "robust " + fmt("%.4f", r) + " trad " + fmt("%.4f", t) + " gpr " + fmt("%.4f", g);
      return r < kRobustOutlierRmseMax && t > kBaselineOutlierRmseMin && g > kBaselineOutlierRmseMin;
    });
    check(o, d.pass, std::string(dataset) + ": " + d.detail);
  }
  return o;
}

Outcome criterion_4() {
  Outcome o;
  for (const char* dataset : {"nonlinear-1", "nonlinear-2"}) {
    for (const char* method : {"robust-nn", "traditional-nn", "gpr"}) {
      const double r2 = run(dataset, method, 1).report.truth.at(0).r_squared;
      check(o, r2 >= kCleanR2Min, std::string(dataset) + " " + method + " R2 " + fmt("%.4f", r2));
    }
  }
  return o;
}

Outcome criterion_5() {
  Outcome o;
  const auto score = [&](const std::string& label, const ExperimentRun& r) {
    const ConfusionCounts& c = *r.report.outliers;
    check(o, c.recall() >= kRecallMin && c.precision() >= kPrecisionMin,
          label + " recall " + fmt("%.3f", c.recall()) + " precision " + fmt("%.3f", c.precision()));
  };
  score("linear-1 robust-linear", run("linear-1", "robust-linear", 1));
  for (const char* dataset : {"nonlinear-1-outliers", "nonlinear-2-outliers"}) {
    auto it = g_outlier_runs.find(dataset);
    if (it == g_outlier_runs.end()) it = g_outlier_runs.emplace(dataset, run(dataset, "robust-nn", 1)).first;
    score(std::string(dataset) + " robust-nn", it->second);
  }
  return o;
}

Outcome criterion_6() {
  Outcome o;
  const WeightKernel w;
  check(o, w(0.0) == 1.0, "W(0) = 1");
  check(o, std::abs(w(1.0) - std::exp(-7.0)) <= 1e-12, "W(1) = e^-7");
  bool symmetric = true, monotone = true, in_range = true;
  double prev = 1.0;
  for (int k = 0; k <= 4000; ++k) {
    const double v = k * 1e-3;
    symmetric = symmetric && w(v) == w(-v);
    monotone = monotone && w(v) <= prev;
    in_range = in_range && w(v) > 0.0 && w(v) <= 1.0;
    prev = w(v);
  }
  in_range = in_range && w(1e300) > 0.0;
  check(o, symmetric, "symmetry");
  check(o, monotone, "monotone in |v|");
  check(o, in_range, "range (0, 1]");
  check(o, w(0.7) > 0.66, "W(0.7) = " + fmt("%.4f", w(0.7)));
  check(o, w(1.3) < 1e-25, "W(1.3) = " + fmt("%.2e", w(1.3)));
  return o;
}

Outcome criterion_7() {
  Outcome o;
  std::mt19937_64 rng(77);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  double worst_subset = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    Dataset ds;
    ds.inputs.resize(30, 2);
    ds.outputs.resize(30, 1);
    for (Eigen::Index k = 0; k < ds.inputs.size(); ++k) ds.inputs(k) = g(rng);
    for (Eigen::Index k = 0; k < ds.outputs.size(); ++k) ds.outputs(k) = g(rng);
    WeightMatrix w = WeightMatrix::Zero(1, 30);
    std::vector<Eigen::Index> keep;
    for (Eigen::Index j = 0; j < 30; ++j) {
      if (j < 4 || u(rng) < 0.5) {
        keep.push_back(j);
        w(0, j) = 1.0;
      }
    }
    const LinearModel a = linear_fit(ds, w);
    const LinearModel b = linear_fit(ds.subset(keep));
    worst_subset = std::max({worst_subset, (a.coefficients() - b.coefficients()).cwiseAbs().maxCoeff(),
                             (a.intercept() - b.intercept()).cwiseAbs().maxCoeff()});
  }
  check(o, worst_subset <= kSubsetTol, "0/1 weights vs subset max diff " + fmt("%.1e", worst_subset));

  double worst_grad = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    Dataset ds;
    ds.inputs.resize(8, 2);
    ds.outputs.resize(8, 2);
    for (Eigen::Index k = 0; k < ds.inputs.size(); ++k) ds.inputs(k) = g(rng);
    for (Eigen::Index k = 0; k < ds.outputs.size(); ++k) ds.outputs(k) = g(rng);
    WeightMatrix w(2, 8);
    for (Eigen::Index k = 0; k < w.size(); ++k) w(k) = u(rng);
    MlpModel m = mlp_init(std::vector<int>{2, 5, 3, 2}, Activation::kTanh, static_cast<std::uint64_t>(trial));
    const LossAndGradient lg = mlp_loss_and_gradient(m, ds, w);
    const Eigen::VectorXd p = m.parameters();
    const auto idx = static_cast<Eigen::Index>(u(rng) * static_cast<double>(p.size()));
    const double h = 1e-6;
    Eigen::VectorXd q = p;
    q(idx) += h;
    m.set_parameters(q);
    const double up = mlp_loss(m, ds, w);
    q(idx) -= 2 * h;
    m.set_parameters(q);
    const double down = mlp_loss(m, ds, w);
    const double fd = (up - down) / (2 * h);
    worst_grad = std::max(worst_grad, std::abs(fd - lg.gradient(idx)) / std::max(1.0, std::abs(lg.gradient(idx))));
  }
  check(o, worst_grad < kGradientRelTol, "gradient vs finite difference max rel err " + fmt("%.1e", worst_grad));

  bool oracle = true;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> v(1 + static_cast<std::size_t>(u(rng) * 40));
    for (auto& x : v) x = std::round(4.0 * g(rng)) / 2.0;
    auto med = [](std::vector<double> s) {
      std::sort(s.begin(), s.end());
      const std::size_t n = s.size();
      return n % 2 ? s[n / 2] : 0.5 * (s[n / 2 - 1] + s[n / 2]);
    };
    const double m = med(v);
    std::vector<double> dev;
    for (double x : v) dev.push_back(std::abs(x - m));
    oracle = oracle && stats::median(v) == m && stats::mad(v) == med(dev);
  }
  check(o, oracle, "median/MAD vs sort oracle on 1000 vectors");
  return o;
}

Outcome criterion_8() {
  Outcome o;
  const Dataset ds = make_nonlinear(TargetId::kSincMix, 8, true);
  const SplitIndices split = split_dataset(ds, 8);
  const Dataset train = ds.subset(split.train);
  const Dataset val = ds.subset(split.validation);
  TrainingHyper hyper;
  hyper.max_epochs = 300;
  const MlpRegressor mlp({{20, 10}, Activation::kTanh}, hyper);

  RobustConfig one;
  one.refinements = 1;
  one.seed = 21;
  const auto bare = mlp.fit(train, unit_weights(train), FitContext{&val, {}, 21});
  check(o, robust_fit(mlp, train, one, &val).model->predict(val.inputs) == bare->predict(val.inputs),
        "refinements=1 bitwise");

  RobustConfig wide;
  wide.gamma = 1e6;
  wide.seed = 21;
  const auto final_seed = refit_schedule(wide).back().seed;
  const auto bare_final = mlp.fit(train, unit_weights(train), FitContext{&val, {}, final_seed});
  check(o, robust_fit(mlp, train, wide, &val).model->predict(val.inputs) == bare_final->predict(val.inputs),
        "gamma=1e6 bitwise");
  const auto lin_wide = robust_fit(LinearRegressor{}, train, wide);
  check(o, lin_wide.model->predict(train.inputs) == linear_fit(train).predict(train.inputs),
        "gamma=1e6 linear bitwise");

  const json cfg{{"dataset", "nonlinear-2-outliers"},
                 {"method", {{"id", "robust-nn"}, {"training", {{"max_epochs", 300}}}}},
                 {"seed", 5}};
  const std::string a = to_json(execute_experiment(parse_experiment(cfg)).report).dump(2);
  const std::string b = to_json(execute_experiment(parse_experiment(cfg)).report).dump(2);
  check(o, a == b, "identical configs give byte-identical reports");
  return o;
}

Outcome criterion_9() {
  Outcome o;
  const json arch{{"hidden", {20, 10}}, {"activation", "tanh"}};
  const ExperimentRun robust = run("dynamics", "robust-nn", 1, arch);
  const ExperimentRun trad = run("dynamics", "traditional-nn", 1, arch);
  int better = 0;
  std::ostringstream s;
  for (std::size_t i = 0; i < 4; ++i) {
    const double r2 = robust.report.test.at(i).r_squared;
    const double rr = robust.report.truth.at(i).rmse;
    const double tr = trad.report.truth.at(i).rmse;
    check(o, r2 >= kDynamicsR2Min, "tau" + std::to_string(i + 1) + " test R2 " + fmt("%.4f", r2));
    better += rr <= tr;
    s << (i ? ", " : "") << fmt("%.4f", rr) << " vs " << fmt("%.4f", tr);
  }
  check(o, better >= kDynamicsComponentsMin,
        "robust <= traditional clean RMSE on " + std::to_string(better) + "/4 (" + s.str() + ")");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, criterion_1}, {2, criterion_2}, {3, criterion_3}, {4, criterion_4}, {5, criterion_5},
      {6, criterion_6}, {7, criterion_7}, {8, criterion_8}, {9, criterion_9}};
  std::vector<int> only;
  for (int k = 1; k < argc; ++k) only.push_back(std::atoi(argv[k]));

  int failures = 0;
  for (const auto& [id, fn] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !o.pass;
    std::printf("%s criterion %d: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", id, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
