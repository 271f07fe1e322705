#include "cpf/analytic.hpp"

#include <cmath>
#include <sstream>

namespace cpf {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// x - (1 - e^{-x}) without cancellation at small x.
double ou_shape(double x) {
  if (x < 1e-3) return x * x * (0.5 - x * (1.0 / 6.0 - x * (1.0 / 24.0 - x / 120.0)));
  return x + std::expm1(-x);
}

// 1 - e^{-x}
double one_minus_exp(double x) { return -std::expm1(-x); }

// log f(s) for the Gaussian families; -inf never occurs for finite s.
double gaussian_log_first_moment(const NoiseModel& model, double s) {
  return std::visit(overloaded{
                        [&](const White& m) { return -2.0 * m.gamma_w * s; },
                        [&](const ExpCorrGauss& m) {
                          const double a = m.tau_c * m.g;
                          return -4.0 * a * a * ou_shape(s / m.tau_c);
                        },
                        [&](const StaticGauss& m) { return -2.0 * (m.g * s) * (m.g * s); },
                        [&](const StaticLorentz&) -> double { return 0.0; },
                    },
                    model);
}

double lorentz_moment(const StaticLorentz& m, double s) {
  return std::exp(-m.gamma * std::abs(s)) * std::cos(m.omega * s);
}

}  // namespace

void validate(const NoiseModel& model) {
  std::visit(overloaded{
                 [](const White& m) { require_positive(m.gamma_w, "gamma_w"); },
                 [](const ExpCorrGauss& m) {
                   require_positive(m.g, "g");
                   require_positive(m.tau_c, "tau_c");
                 },
                 [](const StaticGauss& m) { require_positive(m.g, "g"); },
                 [](const StaticLorentz& m) {
                   require_positive(m.gamma, "gamma");
                   require_finite(m.omega, "omega");
                 },
             },
             model);
}

std::string describe(const NoiseModel& model) {
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{
                 [&](const White& m) { os << "white(gamma_w=" << m.gamma_w << ")"; },
                 [&](const ExpCorrGauss& m) { os << "exp_corr_gauss(g=" << m.g << ";tau_c=" << m.tau_c << ")"; },
                 [&](const StaticGauss& m) { os << "static_gauss(g=" << m.g << ")"; },
                 [&](const StaticLorentz& m) { os << "static_lorentz(gamma=" << m.gamma << ";omega=" << m.omega << ")"; },
             },
             model);
  return os.str();
}

namespace analytic {

double correlation_function(const NoiseModel& model, double dt) {
  validate(model);
  require_nonnegative(dt, "dt");
  return std::visit(overloaded{
                        [&](const White&) -> double {
                          if (dt == 0.0) fail(ErrorCode::delta_singular, "white-noise correlation is a delta at dt = 0");
                          return 0.0;
                        },
                        [&](const ExpCorrGauss& m) { return m.g * m.g * std::exp(-dt / m.tau_c); },
                        [&](const StaticGauss& m) { return m.g * m.g; },
                        [&](const StaticLorentz&) -> double {
                          fail(ErrorCode::undefined_correlation, "Cauchy frequencies have no second moment");
                        },
                    },
                    model);
}

PhaseCovariance phase_covariance(const NoiseModel& model, double t, double tau) {
  validate(model);
  require_nonnegative(t, "t");
  require_nonnegative(tau, "tau");
  return std::visit(overloaded{
                        [&](const White& m) { return PhaseCovariance{m.gamma_w * t, m.gamma_w * tau, 0.0}; },
                        [&](const ExpCorrGauss& m) {
                          const double a2 = (m.g * m.tau_c) * (m.g * m.tau_c);
                          return PhaseCovariance{2.0 * a2 * ou_shape(t / m.tau_c), 2.0 * a2 * ou_shape(tau / m.tau_c),
                                                 a2 * one_minus_exp(t / m.tau_c) * one_minus_exp(tau / m.tau_c)};
                        },
                        [&](const StaticGauss& m) {
                          const double g2 = m.g * m.g;
                          return PhaseCovariance{g2 * t * t, g2 * tau * tau, g2 * t * tau};
                        },
                        [&](const StaticLorentz&) -> PhaseCovariance {
                          fail(ErrorCode::undefined_correlation, "Cauchy phases have no covariance");
                        },
                    },
                    model);
}

double first_moment(const NoiseModel& model, double s) {
  validate(model);
  require_nonnegative(s, "s");
  if (const auto* lorentz = std::get_if<StaticLorentz>(&model)) return lorentz_moment(*lorentz, s);
  return std::exp(gaussian_log_first_moment(model, s));
}

double joint_moment(const NoiseModel& model, double t, double tau) {
  validate(model);
  require_nonnegative(t, "t");
  require_nonnegative(tau, "tau");
  return std::visit(overloaded{
                        [&](const White& m) { return std::exp(-2.0 * m.gamma_w * t) * std::exp(-2.0 * m.gamma_w * tau); },
                        [&](const ExpCorrGauss& m) {
                          // f(t) f(tau) cosh(phi), evaluated in log space.
                          const double a = m.tau_c * m.g;
                          const double phi = 4.0 * a * a * one_minus_exp(t / m.tau_c) * one_minus_exp(tau / m.tau_c);
                          const double log_ff = gaussian_log_first_moment(model, t) + gaussian_log_first_moment(model, tau);
                          return 0.5 * (std::exp(log_ff + phi) + std::exp(log_ff - phi));
                        },
                        [&](const StaticGauss& m) {
                          const double sum = m.g * (t + tau);
                          const double diff = m.g * (t - tau);
                          return 0.5 * (std::exp(-2.0 * sum * sum) + std::exp(-2.0 * diff * diff));
                        },
                        [&](const StaticLorentz& m) { return 0.5 * (lorentz_moment(m, t + tau) + lorentz_moment(m, t - tau)); },
                    },
                    model);
}

MomentSet moments(const NoiseModel& model, double t, double tau) {
  return {first_moment(model, t), first_moment(model, tau), joint_moment(model, t, tau)};
}

double cpf(const NoiseModel& model, double t, double tau) { return cpf_from_moments(moments(model, t, tau)); }

double conditional_coherence(const NoiseModel& model, double t, double tau, Outcome yx) {
  const MomentSet m = moments(model, t, tau);
  const double sign = yx.value();
  const double denominator = 1.0 + sign * m.f_t;
  if (std::abs(denominator) <= kPostselectionEpsilon)
    fail(ErrorCode::zero_probability_postselection, "1 + yx f(t) vanishes");
  return (m.f_tau + sign * m.f_joint) / denominator;
}

double dephasing_rate(const NoiseModel& model, double t) {
  validate(model);
  require_nonnegative(t, "t");
  return std::visit(overloaded{
                        [&](const White& m) { return 2.0 * m.gamma_w; },
                        [&](const ExpCorrGauss& m) { return 4.0 * m.g * m.g * m.tau_c * one_minus_exp(t / m.tau_c); },
                        [&](const StaticGauss& m) { return 4.0 * m.g * m.g * t; },
                        [&](const StaticLorentz& m) { return m.gamma + m.omega * std::tan(m.omega * t); },
                    },
                    model);
}

namespace unhalved {

double static_gauss_joint_moment(double g, double t, double tau) {
  const double sum = g * (t + tau);
  const double diff = g * (t - tau);
  return std::exp(-2.0 * sum * sum) + std::exp(-2.0 * diff * diff);
}

double lorentz_conditional_coherence(double gamma, double t, double tau, Outcome yx) {
  const double sign = yx.value();
  const double numerator =
      std::exp(-gamma * std::abs(tau)) + sign * (std::exp(-gamma * std::abs(t + tau)) + std::exp(-gamma * std::abs(t - tau)));
  return numerator / (1.0 + sign * std::exp(-gamma * std::abs(t)));
}

}  // namespace unhalved

}  // namespace analytic
}  // namespace cpf
