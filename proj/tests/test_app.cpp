#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "cpf/app/compare.hpp"
#include "cpf/app/config.hpp"
#include "cpf/app/runner.hpp"
#include "cpf/error.hpp"

using namespace cpf;
using namespace cpf::app;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json white_surface() {
  return json::parse(R"({
    "model": {"type": "white", "gamma_w": 1.0},
    "quantity": "cpf_surface", "method": "analytic",
    "t_grid": {"start": 0, "stop": 2, "count": 50},
    "tau_grid": {"start": 0, "stop": 2, "count": 50}
  })");
}

std::string config_error_field(const json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<accepted>";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("cpfsim_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const int status = std::system((std::string(CPFSIM_PATH) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, WhiteSurfaceIsAllZero) {
  const auto rows = evaluate(parse_config(white_surface()));
  ASSERT_EQ(rows.size(), 2500u);
  for (const Row& r : rows) {
    EXPECT_EQ(r.value, 0.0);
    EXPECT_FALSE(r.std_error);
    EXPECT_EQ(r.quantity, "cpf");
  }
}

TEST(Config, GaussianDiagonalPlateau) {
  const auto rows = evaluate(parse_config(json::parse(R"({
    "model": {"type": "static_gauss", "g": 1.0}, "quantity": "cpf", "method": "analytic",
    "t_grid": {"start": 2, "stop": 6, "count": 9}})")));
  ASSERT_EQ(rows.size(), 9u);
  for (const Row& r : rows) {
    EXPECT_EQ(r.t, *r.tau);
    EXPECT_NEAR(r.value, 0.5, 1e-3);
  }
}

TEST(Config, ErrorsNameTheField) {
  json doc = white_surface();
  doc["model"]["gamma_w"] = -1.0;
  EXPECT_EQ(config_error_field(doc), "/model/gamma_w");
  doc = white_surface();
  doc["model"]["type"] = "pink";
  EXPECT_EQ(config_error_field(doc), "/model/type");
  doc = white_surface();
  doc["t_grid"]["stop"] = -1.0;
  EXPECT_EQ(config_error_field(doc), "/t_grid");
  doc = white_surface();
  doc.erase("tau_grid");
  EXPECT_EQ(config_error_field(doc), "/tau_grid");
  doc = white_surface();
  doc["method"] = "oracle";
  EXPECT_EQ(config_error_field(doc), "/method");
  doc = white_surface();
  doc["quantity"] = "conditional_coherence";
  EXPECT_EQ(config_error_field(doc), "/yx");
  doc["yx"] = 0;
  EXPECT_EQ(config_error_field(doc), "/yx");
  doc = white_surface();
  doc["mc"] = {{"n_trajectories", 0}};
  EXPECT_EQ(config_error_field(doc), "/mc");
}

TEST(Config, MalformedJsonReportsPosition) {
  const fs::path dir = scratch("malformed");
  std::ofstream(dir / "bad.json") << "{\n  \"model\": {\"type\": \"white\",,}\n}";
  try {
    read_config_document((dir / "bad.json").string());
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(read_config_document((dir / "missing.json").string()), std::ios_base::failure);
}

TEST(Config, SpinBathAndOracleAgree) {
  json doc = json::parse(R"({
    "model": {"type": "random_spin_bath", "n_spins": 10, "seed": 3},
    "quantity": "probability_table", "method": "analytic",
    "t_grid": {"start": 0.1, "stop": 2, "count": 6}})");
  const auto closed = evaluate(parse_config(doc));
  doc["method"] = "oracle";
  const auto replay = evaluate(parse_config(doc));
  const CompareReport report = compare_rows(closed, replay, 3.0, 1e-10);
  EXPECT_TRUE(report.pass) << report.to_text(3.0, 1e-10);
  EXPECT_LT(report.max_abs_difference, 1e-12);
}

TEST(Config, BathTooLargeAtRuntime) {
  const json doc = json::parse(R"({
    "model": {"type": "random_spin_bath", "n_spins": 15, "seed": 3},
    "quantity": "coherence", "method": "oracle", "t_grid": {"start": 0, "stop": 1, "count": 2}})");
  try {
    evaluate(parse_config(doc));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::bath_too_large);
  }
}

TEST(Csv, RoundTripIsLossless) {
  json doc = json::parse(R"({
    "model": {"type": "exp_corr_gauss", "g": 1.0, "tau_c": 0.3},
    "quantity": "moments", "method": "montecarlo", "mc": {"n_trajectories": 2000, "seed": 5},
    "t_grid": {"start": 0.1, "stop": 1, "count": 3}})");
  const auto rows = evaluate(parse_config(doc));
  const std::string text = to_csv(rows);
  EXPECT_EQ(text.substr(0, text.find('\n')), kCsvHeader);
  const auto parsed = parse_csv(text);
  ASSERT_EQ(parsed.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(parsed[i].value, rows[i].value);
    EXPECT_EQ(parsed[i].std_error, rows[i].std_error);
    EXPECT_EQ(parsed[i].n_samples, rows[i].n_samples);
    EXPECT_EQ(parsed[i].model, rows[i].model);
  }
  EXPECT_EQ(to_csv(parsed), text);
}

TEST(Compare, GridMismatchAndTolerances) {
  const auto a = evaluate(parse_config(white_surface()));
  json other = white_surface();
  other["t_grid"]["count"] = 49;
  const auto b = evaluate(parse_config(other));
  try {
    compare_rows(a, b, 3.0, 1e-10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::grid_mismatch);
  }
  auto shifted = a;
  for (Row& r : shifted) r.value += 1e-6;
  EXPECT_FALSE(compare_rows(a, shifted, 3.0, 1e-10).pass);
  EXPECT_TRUE(compare_rows(a, shifted, 3.0, 1e-5).pass);
}

TEST(Compare, ScaledBathFitsGaussianAndLorentzMonteCarlo) {
  json bath = json::parse(R"({
    "model": {"type": "scaled_spin_bath", "n_spins": 50, "g": 1.0},
    "quantity": "cpf_surface", "method": "analytic",
    "t_grid": {"start": 0, "stop": 2, "count": 21}, "tau_grid": {"start": 0, "stop": 2, "count": 21}})");
  json gauss = bath;
  gauss["model"] = {{"type", "static_gauss"}, {"g", 1.0}};
  EXPECT_TRUE(compare_rows(evaluate(parse_config(bath)), evaluate(parse_config(gauss)), 3.0, 0.01).pass);

  json analytic = json::parse(R"({
    "model": {"type": "static_lorentz", "gamma": 1.0},
    "quantity": "cpf", "method": "analytic", "t_grid": {"start": 0.2, "stop": 3, "count": 5}})");
  json mc = analytic;
  mc["method"] = "sampling";
  mc["mc"] = {{"n_trajectories", 200000}, {"seed", 17}};
  const auto report = compare_rows(evaluate(parse_config(analytic)), evaluate(parse_config(mc)), 4.0, 0.0);
  EXPECT_TRUE(report.pass) << report.to_text(4.0, 0.0);
}

TEST(Cli, ManifestReplayIsBitIdentical) {
  const fs::path dir = scratch("replay");
  std::ofstream(dir / "cfg.json") << R"({
    "model": {"type": "exp_corr_gauss", "g": 1.0, "tau_c": 1.0},
    "quantity": "cpf", "method": "sampling", "mc": {"n_trajectories": 20000, "chunk_size": 1000},
    "t_grid": {"start": 0.5, "stop": 2, "count": 4}, "output": "run.csv"})";
  ASSERT_EQ(run_cli("run --config " + (dir / "cfg.json").string() + " --output " + (dir / "a").string() +
                    " --seed 1234 --threads 1"),
            0);
  ASSERT_EQ(run_cli("run --config " + (dir / "a" / "manifest.json").string() + " --output " + (dir / "b").string() +
                    " --threads 3"),
            0);
  const std::string first = slurp(dir / "a" / "run.csv");
  EXPECT_FALSE(first.empty());
  EXPECT_EQ(first, slurp(dir / "b" / "run.csv"));
  const json manifest = json::parse(slurp(dir / "a" / "manifest.json"));
  EXPECT_EQ(manifest["seed"], 1234);
  EXPECT_EQ(manifest["config"]["mc"]["seed"], 1234);
  for (const char* key : {"version", "wall_time_seconds", "threads", "outputs"}) EXPECT_TRUE(manifest.contains(key));
}

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch("exit");
  std::ofstream(dir / "bad.json") << R"({"model": {"type": "white"}})";
  EXPECT_EQ(run_cli("run --config " + (dir / "bad.json").string() + " --output " + dir.string()), 2);
  EXPECT_EQ(run_cli("run --config " + (dir / "nope.json").string() + " --output " + dir.string()), 1);
  std::ofstream(dir / "big.json") << R"({"model": {"type": "random_spin_bath", "n_spins": 16, "seed": 1},
    "quantity": "coherence", "method": "oracle", "t_grid": {"start": 0, "stop": 1, "count": 2}})";
  EXPECT_EQ(run_cli("run --config " + (dir / "big.json").string() + " --output " + dir.string()), 3);
  std::ofstream(dir / "zero.json") << R"({"model": {"type": "static_gauss", "g": 1.0},
    "quantity": "conditional_coherence", "yx": -1, "method": "analytic",
    "t_grid": {"start": 0, "stop": 1, "count": 2}, "tau_grid": {"start": 0, "stop": 1, "count": 2}})";
  EXPECT_EQ(run_cli("run --config " + (dir / "zero.json").string() + " --output " + dir.string()), 3);
}

TEST(Cli, CompareAndSweep) {
  const fs::path dir = scratch("compare");
  std::ofstream(dir / "a.json") << R"({"model": {"type": "random_spin_bath", "n_spins": 6, "seed": 4},
    "quantity": "probability_table", "method": "analytic", "t_grid": {"start": 0.1, "stop": 2, "count": 4}})";
  std::ofstream(dir / "b.json") << R"({"model": {"type": "random_spin_bath", "n_spins": 6, "seed": 4},
    "quantity": "probability_table", "method": "oracle", "t_grid": {"start": 0.1, "stop": 2, "count": 4}})";
  std::ofstream(dir / "c.json") << R"({"model": {"type": "random_spin_bath", "n_spins": 6, "seed": 5},
    "quantity": "probability_table", "method": "oracle", "t_grid": {"start": 0.1, "stop": 2, "count": 4}})";
  const std::string out = " --output " + dir.string() + " --quiet";
  EXPECT_EQ(run_cli("compare --config " + (dir / "a.json").string() + " --config " + (dir / "b.json").string() +
                    " --abs-tol 1e-10" + out),
            0);
  EXPECT_TRUE(fs::exists(dir / "compare_report.txt"));
  EXPECT_EQ(run_cli("compare --config " + (dir / "a.json").string() + " --config " + (dir / "c.json").string() +
                    " --abs-tol 1e-10" + out),
            4);

  std::ofstream(dir / "sweep.json") << R"({"model": {"type": "exp_corr_gauss", "g": 1.0, "tau_c": 1.0},
    "quantity": "cpf", "method": "analytic", "t_grid": {"start": 0, "stop": 20, "count": 41},
    "sweep": {"axes": [{"parameter": "/model/tau_c", "values": [0.1, 1, 5, 100]}], "hold_white_rate": 1.0}})";
  ASSERT_EQ(run_cli("sweep --config " + (dir / "sweep.json").string() + out), 0);
  const auto rows = parse_csv(slurp(dir / "sweep_cpf_analytic.csv"));
  ASSERT_EQ(rows.size(), 4u * 41u);
  double previous_peak = 0.0;
  for (std::size_t block = 0; block < 4; ++block) {
    double peak = 0.0;
    for (std::size_t i = 0; i < 41; ++i) peak = std::max(peak, rows[block * 41 + i].value);
    EXPECT_GT(peak, previous_peak);
    previous_peak = peak;
  }
  std::ofstream(dir / "badsweep.json") << R"({"model": {"type": "white", "gamma_w": 1.0}, "quantity": "cpf",
    "method": "analytic", "t_grid": {"start": 0, "stop": 1, "count": 2}, "sweep": {"axes": []}})";
  EXPECT_EQ(run_cli("sweep --config " + (dir / "badsweep.json").string() + out), 2);
}
