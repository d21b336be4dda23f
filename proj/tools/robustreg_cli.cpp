// robustreg: generate datasets, run fits and benchmarks, compare reports.
//
// Exit codes: 0 success, 2 config error, 3 fit/numerical error, 4 I/O error.

#include <CLI11.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "robustreg/errors.hpp"
#include "robustreg/experiment.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace robustreg;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

struct Overrides {
  std::optional<std::string> dataset;
  std::optional<std::string> method;
  std::optional<std::uint64_t> seed;
  std::optional<double> gamma;
  std::optional<int> refinements;
  std::optional<std::string> arch;
};

std::vector<int> parse_arch(const std::string& text) {
  std::vector<int> sizes;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find(',', pos), text.size());
    int v = 0;
    const auto res = std::from_chars(text.data() + pos, text.data() + end, v);
    if (res.ec != std::errc{} || res.ptr != text.data() + end || v <= 0) {
      throw ConfigError("arch", "expected comma-separated positive sizes, got '" + text + "'");
    }
    sizes.push_back(v);
    pos = end + 1;
  }
  return sizes;
}

// Patches one experiment object with command-line values; flags win.
void apply_overrides(json& exp, const Overrides& o) {
  if (exp.contains("method") && exp["method"].is_string()) exp["method"] = json{{"id", exp["method"]}};
  if (o.method) exp["method"]["id"] = *o.method;
  if (o.arch) exp["method"]["hidden"] = parse_arch(*o.arch);
  if (o.dataset) {
    const auto& ids = dataset_ids();
    const bool known = std::find(ids.begin(), ids.end(), *o.dataset) != ids.end();
    exp["dataset"] = known ? json{{"id", *o.dataset}} : json{{"path", *o.dataset}};
  }
  if (o.seed) exp["seed"] = *o.seed;
  if (o.gamma) exp["robust"]["gamma"] = *o.gamma;
  if (o.refinements) exp["robust"]["refinements"] = *o.refinements;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw IoError("cannot write '" + path.string() + "'");
}

void write_comparison(const ComparisonTable& table, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  write_file(dir / "comparison.txt", render_text(table));
  write_file(dir / "comparison.csv", render_csv(table));
}

int cmd_generate(const std::string& dataset, std::uint64_t seed, const fs::path& out) {
  const Dataset ds = make_named_dataset(dataset, seed);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  write_table(ds, out);
  std::cout << "wrote " << ds.size() << " rows of '" << dataset << "' (seed " << seed << ") to " << out.string()
            << "\n";
  return 0;
}

int cmd_fit(const std::optional<fs::path>& config, const Overrides& o, const std::optional<fs::path>& out) {
  json exp = config ? load_json(*config) : json::object();
  apply_overrides(exp, o);
  if (out) exp["output_dir"] = out->generic_string();
  if (!exp.contains("output_dir")) exp["output_dir"] = "runs/" + parse_experiment(exp).name;
  const ExperimentConfig cfg = parse_experiment(exp);
  const FitReport report = run_experiment(cfg);
  std::cout << render_summary(report) << "report: " << (cfg.output_dir / "report.json").string() << "\n";
  return 0;
}

int cmd_bench(const fs::path& config, const Overrides& o, const std::optional<fs::path>& out) {
  json batch = load_json(config);
  if (!batch.is_object()) throw ConfigError("", "batch config must be an object");
  if (out) batch["output_dir"] = out->generic_string();
  if (!batch.contains("output_dir")) batch["output_dir"] = "bench";
  if (batch.contains("experiments") && batch["experiments"].is_array()) {
    for (auto& exp : batch["experiments"]) apply_overrides(exp, o);
  }
  const BatchConfig cfg = parse_batch(batch);
  std::vector<FitReport> reports;
  for (const auto& exp : cfg.experiments) {
    std::cerr << "running " << exp.name << "\n";
    reports.push_back(run_experiment(exp));
  }
  const ComparisonTable table = summarize(reports);
  write_comparison(table, cfg.output_dir);
  std::cout << render_text(table);
  return 0;
}

int cmd_report(const std::vector<fs::path>& inputs, const std::optional<fs::path>& out) {
  std::vector<FitReport> reports;
  for (const auto& in : inputs) {
    const fs::path file = fs::is_directory(in) ? in / "report.json" : in;
    if (!fs::exists(file)) throw IoError("no report at '" + file.string() + "'");
    try {
      reports.push_back(report_from_json(load_json(file)));
    } catch (const ConfigError& e) {
      throw InvalidDataset(e.what());
    }
  }
  const ComparisonTable table = summarize(reports);
  if (out) write_comparison(table, *out);
  std::cout << render_text(table);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust regression by iterative median/MAD reweighting"};
  app.require_subcommand(1);

  Overrides o;
  std::optional<fs::path> config;
  std::optional<fs::path> out;
  const auto add_overrides = [&](CLI::App* cmd) {
    cmd->add_option("--dataset", o.dataset, "Dataset id or table path");
    cmd->add_option("--method", o.method, "robust-nn | traditional-nn | robust-linear | ransac | gpr");
    cmd->add_option("--seed", o.seed, "Experiment seed");
    cmd->add_option("--gamma", o.gamma, "Threshold multiplier on MAD");
    cmd->add_option("--refinements", o.refinements, "Total number of fits, the first unweighted");
    cmd->add_option("--arch", o.arch, "Hidden layer sizes, e.g. 20,10");
  };

  auto* generate = app.add_subcommand("generate", "Write a synthetic dataset table");
  std::string gen_dataset;
  std::uint64_t gen_seed = 0;
  fs::path gen_out;
  generate->add_option("--dataset", gen_dataset, "Dataset id")->required();
  generate->add_option("--seed", gen_seed, "Generator seed");
  generate->add_option("--out", gen_out, "Output CSV path")->required();

  auto* fit = app.add_subcommand("fit", "Run one experiment");
  fit->add_option("--config", config, "Experiment config (JSON)");
  fit->add_option("--out", out, "Output directory");
  add_overrides(fit);

  auto* bench = app.add_subcommand("bench", "Run a batch of experiments and summarize");
  fs::path bench_config;
  bench->add_option("--config", bench_config, "Batch config (JSON)")->required();
  bench->add_option("--out", out, "Output directory");
  add_overrides(bench);

  auto* report = app.add_subcommand("report", "Compare saved reports");
  std::vector<fs::path> report_inputs;
  report->add_option("reports", report_inputs, "report.json files or run directories")->required();
  report->add_option("--out", out, "Directory for comparison.txt and comparison.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*generate) return cmd_generate(gen_dataset, gen_seed, gen_out);
    if (*fit) return cmd_fit(config, o, out);
    if (*bench) return cmd_bench(bench_config, o, out);
    if (*report) return cmd_report(report_inputs, out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "fit error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  }
  return 0;
}
