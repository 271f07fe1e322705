#pragma once

#include <string>
#include <vector>

#include "cpf/app/runner.hpp"

namespace cpf::app {

struct ComparePoint {
  double t = 0.0;
  std::optional<double> tau;
  std::string quantity;
  double value_a = 0.0;
  double value_b = 0.0;
  double difference = 0.0;
  /// |difference| / combined standard error, when either side is stochastic.
  std::optional<double> sigmas;
  bool pass = false;
};

struct CompareReport {
  std::vector<ComparePoint> points;
  double max_abs_difference = 0.0;
  double max_sigmas = 0.0;
  bool pass = false;

  std::string to_text(double sigma_tol, double abs_tol) const;
};

/// Matches rows by (quantity, t, tau). Stochastic pairs pass when
/// |a - b| <= sigma_tol * sqrt(se_a^2 + se_b^2); deterministic pairs when
/// |a - b| <= abs_tol. Throws grid_mismatch when the (t, tau) point sets
/// differ or no quantity is shared.
CompareReport compare_rows(const std::vector<Row>& a, const std::vector<Row>& b, double sigma_tol, double abs_tol);

}  // namespace cpf::app
