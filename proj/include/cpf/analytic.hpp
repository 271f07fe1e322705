#pragma once

// Closed-form dephasing moments for stationary noise drives of a qubit
// evolving under d/dt psi = -i xi(t) sigma_z psi.

#include <string>
#include <variant>

#include "cpf/core.hpp"

namespace cpf {

/// Delta-correlated Gaussian noise, chi(dt) = gamma_w delta(dt).
struct White {
  double gamma_w = 1.0;
};

/// Gaussian noise with chi(dt) = g^2 exp(-|dt| / tau_c).
struct ExpCorrGauss {
  double g = 1.0;
  double tau_c = 1.0;
};

/// Gaussian noise that never decorrelates, chi(dt) = g^2.
struct StaticGauss {
  double g = 1.0;
};

/// Time-constant random frequency with Cauchy density centred at omega/2,
/// half-width gamma/2. Has no second moment.
struct StaticLorentz {
  double gamma = 1.0;
  double omega = 0.0;
};

using NoiseModel = std::variant<White, ExpCorrGauss, StaticGauss, StaticLorentz>;

void validate(const NoiseModel& model);
std::string describe(const NoiseModel& model);

namespace analytic {

/// Noise autocorrelation chi(dt). Throws delta_singular for White at dt = 0
/// (and returns 0 for White at dt > 0), undefined_correlation for
/// StaticLorentz.
double correlation_function(const NoiseModel& model, double dt);

/// Variance and covariance of the integrated phases theta1 = int_0^t xi and
/// theta2 = int_t^{t+tau} xi. Gaussian models only.
struct PhaseCovariance {
  double var1 = 0.0;
  double var2 = 0.0;
  double cov = 0.0;
};
PhaseCovariance phase_covariance(const NoiseModel& model, double t, double tau);

/// f(s) = E cos(2 theta) over an interval of length s.
double first_moment(const NoiseModel& model, double s);

/// f(t, tau) = E[cos(2 theta1) cos(2 theta2)].
double joint_moment(const NoiseModel& model, double t, double tau);

MomentSet moments(const NoiseModel& model, double t, double tau);

double cpf(const NoiseModel& model, double t, double tau);

/// Coherence between the second and third measurements, conditioned on the
/// product yx of the first two outcomes:
/// [f(tau) + yx f(t,tau)] / [1 + yx f(t)].
double conditional_coherence(const NoiseModel& model, double t, double tau, Outcome yx);

/// gamma(t) = -d/dt ln f(t) from the model's closed form.
double dephasing_rate(const NoiseModel& model, double t);

inline constexpr double kPostselectionEpsilon = 1e-12;

/// Variants missing the factor 1/2 on the two-time cross term. Regression
/// witnesses only: both break |value| <= 1.
namespace unhalved {
double static_gauss_joint_moment(double g, double t, double tau);
double lorentz_conditional_coherence(double gamma, double t, double tau, Outcome yx);
}  // namespace unhalved

}  // namespace analytic
}  // namespace cpf
