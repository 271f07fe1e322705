#include <iostream>

#include "cpf/app/acceptance.hpp"

int main() {
  int failed = 0;
  cpf::app::run_acceptance([&](const cpf::app::CriterionResult& r) {
    cpf::app::print_result(std::cout, r);
    std::cout.flush();
    failed += r.passed ? 0 : 1;
  });
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << "\n";
  return failed == 0 ? 0 : 1;
}
