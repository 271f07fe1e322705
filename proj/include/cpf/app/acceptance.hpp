#pragma once

#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace cpf::app {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Runs every acceptance criterion. `on_result` is invoked as each one
/// finishes (for streaming output).
std::vector<CriterionResult> run_acceptance(const std::function<void(const CriterionResult&)>& on_result = {});

void print_result(std::ostream& os, const CriterionResult& r);

}  // namespace cpf::app
