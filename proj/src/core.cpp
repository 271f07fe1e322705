#include "cpf/core.hpp"

#include <cmath>
#include <string>

namespace cpf {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::invalid_moment_set: return "invalid moment set";
    case ErrorCode::zero_probability_postselection: return "zero-probability postselection";
    case ErrorCode::bath_too_large: return "bath too large";
    case ErrorCode::empty_postselection: return "empty postselection";
    case ErrorCode::delta_singular: return "delta-singular";
    case ErrorCode::undefined_correlation: return "undefined";
    case ErrorCode::unreachable_polarization: return "unreachable polarization";
    case ErrorCode::step_too_coarse: return "step too coarse";
    case ErrorCode::grid_mismatch: return "grid mismatch";
  }
  return "unknown error";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(detail.empty() ? std::string(to_string(code))
                                        : std::string(to_string(code)) + ": " + detail),
      code_(code) {}

void fail(ErrorCode code, const std::string& detail) { throw Error(code, detail); }

void require_finite(double value, const char* name) {
  if (!std::isfinite(value)) fail(ErrorCode::invalid_argument, std::string(name) + " must be finite");
}

void require_nonnegative(double value, const char* name) {
  if (!std::isfinite(value) || value < 0.0)
    fail(ErrorCode::invalid_argument, std::string(name) + " must be finite and >= 0");
}

void require_positive(double value, const char* name) {
  if (!std::isfinite(value) || value <= 0.0)
    fail(ErrorCode::invalid_argument, std::string(name) + " must be finite and > 0");
}

Outcome::Outcome(int value) : value_(value) {
  if (value != 1 && value != -1)
    fail(ErrorCode::invalid_argument, "outcome must be +1 or -1, got " + std::to_string(value));
}

TimePair TimePair::make(double t, double tau) {
  require_nonnegative(t, "t");
  require_nonnegative(tau, "tau");
  return {t, tau};
}

const char* to_string(Method method) noexcept {
  switch (method) {
    case Method::analytic: return "analytic";
    case Method::montecarlo: return "montecarlo";
    case Method::sampling: return "sampling";
    case Method::oracle: return "oracle";
  }
  return "unknown";
}

void MomentSet::validate() const {
  constexpr double slack = 1e-12;
  for (double v : {f_t, f_tau, f_joint}) {
    if (!std::isfinite(v)) fail(ErrorCode::invalid_moment_set, "non-finite moment");
    if (std::abs(v) > 1.0 + slack) fail(ErrorCode::invalid_moment_set, "moment outside [-1, 1]");
  }
}

CpfProbabilityTable::CpfProbabilityTable(Outcome y, const std::array<double, 4>& joint)
    : y_(y), joint_(joint) {
  for (Outcome x : kOutcomes) {
    marginal_x_[x.is_plus() ? 0 : 1] = joint_[index(Outcome::plus(), x)] + joint_[index(Outcome::minus(), x)];
  }
  for (Outcome z : kOutcomes) {
    marginal_z_[z.is_plus() ? 0 : 1] = joint_[index(z, Outcome::plus())] + joint_[index(z, Outcome::minus())];
  }
}

CpfProbabilityTable CpfProbabilityTable::from_joint(Outcome y, const std::array<double, 4>& joint) {
  double total = 0.0;
  for (double p : joint) {
    if (!std::isfinite(p) || p < -kTolerance || p > 1.0 + kTolerance)
      fail(ErrorCode::invalid_moment_set, "probability entry " + std::to_string(p) + " outside [0, 1]");
    total += p;
  }
  if (std::abs(total - 1.0) > kTolerance)
    fail(ErrorCode::invalid_moment_set, "probabilities sum to " + std::to_string(total));
  return CpfProbabilityTable(y, joint);
}

void CpfSurface::validate() const {
  auto increasing = [](const std::vector<double>& g) {
    for (std::size_t i = 1; i < g.size(); ++i)
      if (!(g[i] > g[i - 1])) return false;
    return !g.empty();
  };
  if (!increasing(t_grid) || !increasing(tau_grid))
    fail(ErrorCode::invalid_argument, "surface grids must be non-empty and strictly increasing");
  if (values.size() != t_grid.size() * tau_grid.size())
    fail(ErrorCode::invalid_argument, "surface values do not match grid dimensions");
  if (!std_errors.empty() && std_errors.size() != values.size())
    fail(ErrorCode::invalid_argument, "surface std_errors do not match values");
}

double cpf_from_moments(const MomentSet& m) {
  m.validate();
  return m.f_joint - m.f_t * m.f_tau;
}

CpfProbabilityTable cpf_probability_table(const MomentSet& m, Outcome y) {
  m.validate();
  std::array<double, 4> joint{};
  for (Outcome z : kOutcomes) {
    for (Outcome x : kOutcomes) {
      const double xy = (x * y).value();
      const double zy = (z * y).value();
      const double zx = (z * x).value();
      joint[CpfProbabilityTable::index(z, x)] = 0.25 * (1.0 + xy * m.f_t + zy * m.f_tau + zx * m.f_joint);
    }
  }
  return CpfProbabilityTable::from_joint(y, joint);
}

double cpf_from_table(const CpfProbabilityTable& table) {
  double c = 0.0;
  for (Outcome z : kOutcomes) {
    for (Outcome x : kOutcomes) {
      const double connected = table.joint(z, x) - table.marginal_z(z) * table.marginal_x(x);
      c += connected * (z * x).value();
    }
  }
  return c;
}

}  // namespace cpf
