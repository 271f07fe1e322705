#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cpf/app/config.hpp"

namespace cpf::app {

/// One CSV record: t,tau,value,std_error,n_samples,quantity,model,method.
struct Row {
  double t = 0.0;
  std::optional<double> tau;
  double value = 0.0;
  std::optional<double> std_error;
  std::optional<std::uint64_t> n_samples;
  std::string quantity;
  std::string model;
  std::string method;
};

inline constexpr const char* kCsvHeader = "t,tau,value,std_error,n_samples,quantity,model,method";

/// Evaluates the configured quantity on its grid, in grid order.
std::vector<Row> evaluate(const ExperimentConfig& cfg);

/// Lossless (17 significant digit) CSV text.
std::string to_csv(const std::vector<Row>& rows);

/// Parses CSV text produced by to_csv.
std::vector<Row> parse_csv(const std::string& text);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace cpf::app
