#pragma once

// JSON experiment configuration for the cpfsim command-line tool.
//
// Units: every rate (gamma_w, g, gamma, omega, couplings) is in inverse time
// and every time (grids, tau_c, path_dt) is in the same time unit.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "cpf/analytic.hpp"
#include "cpf/core.hpp"
#include "cpf/mc.hpp"
#include "cpf/spinbath.hpp"
#include "json.hpp"

namespace cpf::app {

/// Validation failure, reported with the offending JSON pointer (or the
/// parser's line/column for malformed JSON).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field.empty() ? message : "field '" + field + "': " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

enum class Quantity { coherence, conditional_coherence, cpf, cpf_surface, moments, rate, probability_table };

const char* to_string(Quantity q) noexcept;

struct GridSpec {
  double start = 0.0;
  double stop = 0.0;
  std::size_t count = 1;

  std::vector<double> points() const;
};

using ModelSpec = std::variant<NoiseModel, SpinBathSpec, LorentzCouplingSpec>;

struct ExperimentConfig {
  ModelSpec model;
  std::string model_tag;
  SystemInit system_init;
  Quantity quantity = Quantity::cpf;
  GridSpec t_grid;
  std::optional<GridSpec> tau_grid;
  std::optional<Outcome> yx;
  Outcome y_select = Outcome::plus();
  Method method = Method::analytic;
  McConfig mc;
  std::string output_path;
  nlohmann::json source;  // the validated input document
};

/// Validates and converts a config document. Throws ConfigError.
ExperimentConfig parse_config(const nlohmann::json& doc);

/// Reads a config file, or the "config" member of a run manifest.
/// Throws ConfigError for malformed or invalid content and
/// std::ios_base::failure when the file cannot be read.
nlohmann::json read_config_document(const std::string& path);

/// Random bath used by the "random_spin_bath" model type: couplings uniform
/// in [-1, 1] and Haar-like random spin amplitudes.
SpinBathSpec random_spin_bath(std::size_t n_spins, std::uint64_t seed);

}  // namespace cpf::app
