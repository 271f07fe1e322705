// cpfsim: run, compare and sweep CPF experiments from JSON configs.
//
// Exit codes: 0 ok, 1 I/O failure, 2 invalid config, 3 model/runtime error,
// 4 compare or selftest reported FAIL.

#include <omp.h>

#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "cpf/app/acceptance.hpp"
#include "cpf/app/compare.hpp"
#include "cpf/app/config.hpp"
#include "cpf/app/runner.hpp"
#include "cpf/error.hpp"

#ifndef CPF_VERSION
#define CPF_VERSION "dev"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cpf::app;

namespace {

struct Common {
  std::string output_dir = ".";
  std::optional<std::uint64_t> seed;
  int threads = 0;
  bool quiet = false;
};

std::ostream& log(const Common& c) {
  static std::ofstream sink;
  return c.quiet ? static_cast<std::ostream&>(sink) : std::cout;
}

json with_seed(json doc, const Common& c) {
  if (c.seed) doc["mc"]["seed"] = *c.seed;
  return doc;
}

std::string write_rows(const Common& c, const std::string& name, const std::vector<Row>& rows) {
  const fs::path path = fs::path(c.output_dir) / name;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_text_file(path.string(), to_csv(rows));
  return path.string();
}

void write_manifest(const Common& c, const std::string& command, const json& config, std::uint64_t seed, double seconds,
                    const std::vector<std::string>& outputs) {
  json m;
  m["manifest_version"] = 1;
  m["command"] = command;
  m["config"] = config;
  m["seed"] = seed;
  m["version"] = CPF_VERSION;
  m["compiler"] = __VERSION__;
  m["threads"] = omp_get_max_threads();
  m["wall_time_seconds"] = seconds;
  m["outputs"] = outputs;
  fs::create_directories(c.output_dir);
  write_text_file((fs::path(c.output_dir) / "manifest.json").string(), m.dump(2) + "\n");
}

double since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

int cmd_run(const Common& c, const std::string& config_path) {
  const auto start = std::chrono::steady_clock::now();
  const json doc = with_seed(read_config_document(config_path), c);
  const ExperimentConfig cfg = parse_config(doc);
  const auto rows = evaluate(cfg);
  const std::string out = write_rows(c, cfg.output_path, rows);
  write_manifest(c, "run", doc, cfg.mc.seed, since(start), {out});
  log(c) << "wrote " << rows.size() << " rows to " << out << "\n";
  return 0;
}

int cmd_compare(const Common& c, const std::vector<std::string>& paths, double sigma_tol, double abs_tol) {
  const auto start = std::chrono::steady_clock::now();
  std::array<json, 2> docs;
  std::array<std::vector<Row>, 2> rows;
  std::vector<std::string> outputs;
  for (std::size_t i = 0; i < 2; ++i) {
    docs[i] = with_seed(read_config_document(paths[i]), c);
    const ExperimentConfig cfg = parse_config(docs[i]);
    rows[i] = evaluate(cfg);
    outputs.push_back(write_rows(c, std::string(i == 0 ? "a_" : "b_") + cfg.output_path, rows[i]));
  }
  const CompareReport report = compare_rows(rows[0], rows[1], sigma_tol, abs_tol);
  const std::string text = report.to_text(sigma_tol, abs_tol);
  const fs::path report_path = fs::path(c.output_dir) / "compare_report.txt";
  write_text_file(report_path.string(), text);
  outputs.push_back(report_path.string());
  write_manifest(c, "compare", json{{"a", docs[0]}, {"b", docs[1]}, {"sigma_tol", sigma_tol}, {"abs_tol", abs_tol}},
                 c.seed.value_or(0), since(start), outputs);
  log(c) << text;
  std::cout << (report.pass ? "PASS" : "FAIL") << "\n";
  return report.pass ? 0 : 4;
}

// "sweep": {"axes": [{"parameter": "/model/tau_c", "values": [...]}, ...],
//           "hold_white_rate": gamma_w (optional, sets /model/g)}
std::vector<json> expand_sweep(const json& doc) {
  if (!doc.contains("sweep") || !doc["sweep"].is_object()) throw ConfigError("/sweep", "missing sweep object");
  const json& sweep = doc["sweep"];
  if (!sweep.contains("axes") || !sweep["axes"].is_array() || sweep["axes"].empty())
    throw ConfigError("/sweep/axes", "expected a non-empty array");
  std::vector<json> variants{doc};
  variants[0].erase("sweep");
  for (std::size_t a = 0; a < sweep["axes"].size(); ++a) {
    const json& axis = sweep["axes"][a];
    const std::string base = "/sweep/axes/" + std::to_string(a);
    if (!axis.contains("parameter") || !axis["parameter"].is_string())
      throw ConfigError(base + "/parameter", "expected a JSON pointer string");
    if (!axis.contains("values") || !axis["values"].is_array() || axis["values"].empty())
      throw ConfigError(base + "/values", "expected a non-empty array");
    json::json_pointer ptr;
    try {
      ptr = json::json_pointer(axis["parameter"].get<std::string>());
    } catch (const json::exception& e) {
      throw ConfigError(base + "/parameter", e.what());
    }
    std::vector<json> next;
    for (const json& v : variants)
      for (const json& value : axis["values"]) {
        json copy = v;
        copy[ptr] = value;
        next.push_back(std::move(copy));
      }
    variants = std::move(next);
  }
  if (sweep.contains("hold_white_rate")) {
    if (!sweep["hold_white_rate"].is_number() || sweep["hold_white_rate"].get<double>() <= 0.0)
      throw ConfigError("/sweep/hold_white_rate", "expected a positive number");
    const double gamma_w = sweep["hold_white_rate"].get<double>();
    for (json& v : variants) {
      if (!v["model"].contains("tau_c") || !v["model"]["tau_c"].is_number())
        throw ConfigError("/sweep/hold_white_rate", "needs a model with a numeric tau_c");
      v["model"]["g"] = std::sqrt(gamma_w / (2.0 * v["model"]["tau_c"].get<double>()));
    }
  }
  return variants;
}

int cmd_sweep(const Common& c, const std::string& config_path) {
  const auto start = std::chrono::steady_clock::now();
  const json doc = with_seed(read_config_document(config_path), c);
  std::vector<Row> all;
  std::string name;
  std::uint64_t seed = 0;
  for (const json& variant : expand_sweep(doc)) {
    const ExperimentConfig cfg = parse_config(variant);
    if (name.empty()) name = "sweep_" + cfg.output_path;
    seed = cfg.mc.seed;
    const auto rows = evaluate(cfg);
    all.insert(all.end(), rows.begin(), rows.end());
    log(c) << cfg.model_tag << ": " << rows.size() << " rows\n";
  }
  const std::string out = write_rows(c, name, all);
  write_manifest(c, "sweep", doc, seed, since(start), {out});
  log(c) << "wrote " << all.size() << " rows to " << out << "\n";
  return 0;
}

int cmd_selftest(const Common& c) {
  const auto results = run_acceptance([&](const CriterionResult& r) {
    print_result(std::cout, r);
    std::cout.flush();
  });
  std::size_t passed = 0;
  for (const auto& r : results) passed += r.passed ? 1 : 0;
  log(c) << passed << "/" << results.size() << " criteria passed\n";
  return passed == results.size() ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional past-future correlation of a dephasing qubit"};
  app.set_version_flag("--version", CPF_VERSION);
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--output", common.output_dir, "Output directory");
    sub->add_option("--seed", common.seed, "Override the Monte Carlo seed");
    sub->add_option("--threads", common.threads, "Worker threads (0 = OpenMP default)")->check(CLI::NonNegativeNumber);
    sub->add_flag("--quiet", common.quiet, "Suppress progress output");
  };

  std::string config_path;
  auto* run = app.add_subcommand("run", "Evaluate one config and write CSV + manifest");
  run->add_option("--config", config_path, "JSON config or run manifest")->required();
  add_common(run);

  std::vector<std::string> compare_paths;
  double sigma_tol = 3.0;
  double abs_tol = 1e-10;
  auto* compare = app.add_subcommand("compare", "Evaluate two configs and compare them point by point");
  compare->add_option("--config", compare_paths, "Two configs (give --config twice)")->required()->expected(2);
  compare->add_option("--sigma-tol", sigma_tol, "Tolerance in combined standard errors")->check(CLI::PositiveNumber);
  compare->add_option("--abs-tol", abs_tol, "Absolute tolerance for deterministic pairs")->check(CLI::NonNegativeNumber);
  add_common(compare);

  auto* sweep = app.add_subcommand("sweep", "Cartesian product over parameter values");
  sweep->add_option("--config", config_path, "JSON config with a sweep section")->required();
  add_common(sweep);

  auto* selftest = app.add_subcommand("selftest", "Run the acceptance suite");
  selftest->add_option("--threads", common.threads, "Worker threads")->check(CLI::NonNegativeNumber);
  selftest->add_flag("--quiet", common.quiet, "Only print per-criterion lines");

  CLI11_PARSE(app, argc, argv);
  if (common.threads > 0) omp_set_num_threads(common.threads);

  try {
    if (*run) return cmd_run(common, config_path);
    if (*compare) return cmd_compare(common, compare_paths, sigma_tol, abs_tol);
    if (*sweep) return cmd_sweep(common, config_path);
    if (*selftest) return cmd_selftest(common);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const cpf::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 1;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
