#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "robustreg/errors.hpp"
#include "robustreg/experiment.hpp"
#include "robustreg/linear.hpp"
#include "robustreg/weighting.hpp"

namespace py = pybind11;
using namespace robustreg;

namespace {

std::span<const double> as_span(const std::vector<double>& v) { return {v.data(), v.size()}; }

Dataset make_dataset(Eigen::MatrixXd inputs, Eigen::MatrixXd outputs) {
  Dataset ds;
  ds.inputs = std::move(inputs);
  ds.outputs = std::move(outputs);
  ds.validate();
  return ds;
}

// JSON crosses the boundary as text; the Python side decodes it.
std::string run_experiment_json(const std::string& config_json, bool write_files) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(config_json);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config", e.what());
  }
  const ExperimentConfig cfg = parse_experiment(j);
  const FitReport report = write_files ? run_experiment(cfg) : execute_experiment(cfg).report;
  return to_json(report).dump();
}

struct PyRobustFit {
  RobustFitResult result;
  Eigen::MatrixXd predict(const Eigen::MatrixXd& x) const { return result.model->predict(x); }
};

PyRobustFit robust_fit_py(const Dataset& train, const std::string& regressor, double gamma, int refinements,
                          std::uint64_t seed, const std::vector<int>& hidden, const std::string& activation,
                          int max_epochs, const Dataset* validation) {
  RobustConfig cfg;
  cfg.gamma = gamma;
  cfg.refinements = refinements;
  cfg.seed = seed;
  if (regressor == "linear") return {robust_fit(LinearRegressor{}, train, cfg)};
  if (regressor == "mlp") {
    TrainingHyper hyper;
    hyper.max_epochs = max_epochs;
    MlpRegressor mlp(MlpArchitecture{hidden, parse_activation(activation)}, hyper);
    return {robust_fit(mlp, train, cfg, validation)};
  }
  throw InvalidArgument("unknown regressor '" + regressor + "' (expected 'linear' or 'mlp')");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Robust regression by iterative median/MAD reweighting";

  static py::exception<ConfigError> config_error(m, "ConfigError", PyExc_ValueError);
  static py::exception<NumericalError> numerical_error(m, "NumericalError", PyExc_RuntimeError);
  static py::exception<IoError> io_error(m, "IoError", PyExc_OSError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      py::set_error(config_error, e.what());
    } catch (const NumericalError& e) {
      py::set_error(numerical_error, e.what());
    } catch (const IoError& e) {
      py::set_error(io_error, e.what());
    } catch (const InvalidArgument& e) {
      py::set_error(PyExc_ValueError, e.what());
    }
  });

  m.attr("REPORT_SCHEMA_VERSION") = kReportSchemaVersion;

  py::class_<Dataset>(m, "Dataset")
      .def(py::init(&make_dataset), py::arg("inputs"), py::arg("outputs"))
      .def_readonly("inputs", &Dataset::inputs)
      .def_readonly("outputs", &Dataset::outputs)
      .def_readonly("clean_outputs", &Dataset::clean_outputs)
      .def_readonly("outlier_flags", &Dataset::outlier_flags)
      .def_property_readonly("generator", [](const Dataset& d) { return d.provenance.generator; })
      .def_property_readonly("seed", [](const Dataset& d) { return d.provenance.seed; })
      .def("__len__", &Dataset::size)
      .def("subset", &Dataset::subset, py::arg("rows"))
      .def("__eq__", [](const Dataset& a, const Dataset& b) { return a == b; });

  m.def("dataset_ids", &dataset_ids);
  m.def(
      "generate", [](const std::string& id, std::uint64_t seed) { return make_named_dataset(id, seed); },
      py::arg("dataset"), py::arg("seed") = 0);
  m.def("read_table", &read_table, py::arg("path"));
  m.def("write_table", &write_table, py::arg("dataset"), py::arg("path"));
  m.def(
      "split", [](const Dataset& d, std::uint64_t seed) {
        const SplitIndices s = split_dataset(d, seed);
        return py::make_tuple(s.train, s.validation, s.test);
      },
      py::arg("dataset"), py::arg("seed"));

  m.def("median", [](const std::vector<double>& v) { return stats::median(as_span(v)); });
  m.def("mad", [](const std::vector<double>& v) { return stats::mad(as_span(v)); });
  m.def("r_squared", [](const std::vector<double>& p, const std::vector<double>& r) {
    return stats::r_squared(as_span(p), as_span(r));
  });
  m.def("rmse", [](const std::vector<double>& p, const std::vector<double>& r) {
    return stats::rmse(as_span(p), as_span(r));
  });

  m.def(
      "weight", [](double v, double scale, double exponent) { return WeightKernel{scale, exponent}(v); },
      py::arg("v"), py::arg("scale") = 7.0, py::arg("exponent") = 8.0);
  m.def(
      "weight_matrix",
      [](const Eigen::MatrixXd& residuals, double gamma) {
        WeightResult w = weight_matrix(residuals, gamma);
        py::list stats;
        for (const auto& s : w.stats) {
          py::dict d;
          d["median"] = s.median;
          d["mad"] = s.mad;
          d["threshold"] = s.threshold;
          d["floored"] = s.floored;
          stats.append(d);
        }
        return py::make_tuple(w.weights, stats);
      },
      py::arg("residuals"), py::arg("gamma") = 2.0,
      "Residuals are n_out x n. Returns (weights, per-row statistics).");

  m.def(
      "linear_fit",
      [](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, std::optional<Eigen::MatrixXd> w) {
        const LinearModel model = w ? linear_fit(x, y, *w) : linear_fit(make_dataset(x, y));
        return py::make_tuple(model.coefficients(), model.intercept());
      },
      py::arg("inputs"), py::arg("outputs"), py::arg("weights") = std::nullopt,
      "Weighted least squares. Returns (coefficients n_in x n_out, intercept).");

  py::class_<PyRobustFit>(m, "RobustFit")
      .def("predict", &PyRobustFit::predict, py::arg("inputs"))
      .def_property_readonly("weights", [](const PyRobustFit& f) { return f.result.weights; })
      .def_property_readonly("inlier_mask", [](const PyRobustFit& f) { return f.result.mask; })
      .def_property_readonly("refinements", [](const PyRobustFit& f) { return f.result.history.size(); })
      .def_property_readonly("train_losses", [](const PyRobustFit& f) {
        std::vector<double> out;
        for (const auto& rec : f.result.history) out.push_back(rec.train_loss);
        return out;
      });

  m.def("robust_fit", &robust_fit_py, py::arg("train"), py::arg("regressor") = "linear", py::arg("gamma") = 2.0,
        py::arg("refinements") = 5, py::arg("seed") = 0, py::arg("hidden") = std::vector<int>{10},
        py::arg("activation") = "tanh", py::arg("max_epochs") = 5000, py::arg("validation") = nullptr);

  m.def("run_experiment_json", &run_experiment_json, py::arg("config_json"), py::arg("write_files") = true);
}
