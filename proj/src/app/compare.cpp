#include "cpf/app/compare.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

namespace cpf::app {

namespace {

using GridKey = std::tuple<double, double, bool>;  // t, tau, has_tau

GridKey grid_key(const Row& r) { return {r.t, r.tau.value_or(0.0), r.tau.has_value()}; }

}  // namespace

CompareReport compare_rows(const std::vector<Row>& a, const std::vector<Row>& b, double sigma_tol, double abs_tol) {
  std::set<GridKey> grid_a, grid_b;
  for (const Row& r : a) grid_a.insert(grid_key(r));
  for (const Row& r : b) grid_b.insert(grid_key(r));
  if (grid_a != grid_b) fail(ErrorCode::grid_mismatch, "the two runs were evaluated on different (t, tau) points");

  std::map<std::pair<std::string, GridKey>, const Row*> index_b;
  for (const Row& r : b) index_b[{r.quantity, grid_key(r)}] = &r;

  CompareReport report;
  report.pass = true;
  for (const Row& ra : a) {
    const auto it = index_b.find({ra.quantity, grid_key(ra)});
    if (it == index_b.end()) continue;
    const Row& rb = *it->second;
    ComparePoint p{ra.t, ra.tau, ra.quantity, ra.value, rb.value, ra.value - rb.value, std::nullopt, false};
    const double se_a = ra.std_error.value_or(0.0);
    const double se_b = rb.std_error.value_or(0.0);
    const double combined = std::sqrt(se_a * se_a + se_b * se_b);
    if ((ra.std_error || rb.std_error) && combined > 0.0) {
      p.sigmas = std::abs(p.difference) / combined;
      p.pass = *p.sigmas <= sigma_tol;
      report.max_sigmas = std::max(report.max_sigmas, *p.sigmas);
    } else {
      p.pass = std::abs(p.difference) <= abs_tol;
    }
    report.max_abs_difference = std::max(report.max_abs_difference, std::abs(p.difference));
    report.pass = report.pass && p.pass;
    report.points.push_back(p);
  }
  if (report.points.empty()) fail(ErrorCode::grid_mismatch, "the two runs share no quantity");
  return report;
}

std::string CompareReport::to_text(double sigma_tol, double abs_tol) const {
  std::ostringstream os;
  os << "quantity,t,tau,value_a,value_b,difference,sigmas,pass\n";
  char buf[256];
  char tau[32], sigmas[32];
  for (const ComparePoint& p : points) {
    tau[0] = sigmas[0] = '\0';
    if (p.tau) std::snprintf(tau, sizeof tau, "%.17g", *p.tau);
    if (p.sigmas) std::snprintf(sigmas, sizeof sigmas, "%.3f", *p.sigmas);
    std::snprintf(buf, sizeof buf, "%s,%.17g,%s,%.17g,%.17g,%.3e,%s,%s\n", p.quantity.c_str(), p.t, tau, p.value_a,
                  p.value_b, p.difference, sigmas, p.pass ? "PASS" : "FAIL");
    os << buf;
  }
  std::snprintf(buf, sizeof buf, "# points=%zu max|diff|=%.3e max_sigmas=%.3f sigma_tol=%g abs_tol=%g overall=%s\n",
                points.size(), max_abs_difference, max_sigmas, sigma_tol, abs_tol, pass ? "PASS" : "FAIL");
  os << buf;
  return os.str();
}

}  // namespace cpf::app
