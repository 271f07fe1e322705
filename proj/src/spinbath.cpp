#include "cpf/spinbath.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace cpf {

namespace {

void require_normalized(complex a, complex b, const char* what) {
  const double norm = std::norm(a) + std::norm(b);
  if (!std::isfinite(norm) || std::abs(norm - 1.0) > 1e-12)
    fail(ErrorCode::invalid_argument, std::string(what) + " amplitudes are not normalized");
}

}  // namespace

void SpinBathSpec::validate() const {
  if (couplings.empty()) fail(ErrorCode::invalid_argument, "spin bath needs at least one spin");
  if (alphas.size() != couplings.size() || betas.size() != couplings.size())
    fail(ErrorCode::invalid_argument, "couplings, alphas and betas must have equal length");
  for (std::size_t k = 0; k < couplings.size(); ++k) {
    require_finite(couplings[k], "coupling");
    require_normalized(alphas[k], betas[k], "bath spin");
  }
}

void SystemInit::validate() const { require_normalized(a, b, "system"); }

void LorentzCouplingSpec::validate() const {
  require_positive(gamma, "gamma");
  require_finite(omega, "omega");
  if (n_spins < 1) fail(ErrorCode::invalid_argument, "n_spins must be >= 1");
  require_normalized(alpha, beta, "bath spin");
}

namespace spinbath {

complex coherence(const SpinBathSpec& spec, double u) {
  spec.validate();
  require_finite(u, "time");
  complex c{1.0, 0.0};
  for (std::size_t k = 0; k < spec.n_spins(); ++k) {
    const complex phase = std::polar(1.0, 2.0 * spec.couplings[k] * u);
    c *= std::norm(spec.alphas[k]) * phase + std::norm(spec.betas[k]) * std::conj(phase);
  }
  return c;
}

complex conditional_coherence(const SpinBathSpec& spec, double t, double tau, Outcome yx) {
  require_nonnegative(t, "t");
  require_nonnegative(tau, "tau");
  const double sign = yx.value();
  const double denominator = 1.0 + sign * coherence(spec, t).real();
  if (std::abs(denominator) <= 1e-12) fail(ErrorCode::zero_probability_postselection, "1 + yx Re c_t vanishes");
  const complex numerator = coherence(spec, tau) + sign * 0.5 * (coherence(spec, t + tau) + std::conj(coherence(spec, t - tau)));
  return numerator / denominator;
}

MomentSet moments(const SpinBathSpec& spec, double t, double tau) {
  require_nonnegative(t, "t");
  require_nonnegative(tau, "tau");
  return {coherence(spec, t).real(), coherence(spec, tau).real(),
          0.5 * (coherence(spec, t + tau).real() + coherence(spec, t - tau).real())};
}

double cpf(const SpinBathSpec& spec, double t, double tau) { return cpf_from_moments(moments(spec, t, tau)); }

CpfProbabilityTable cpf_probability(const SpinBathSpec& spec, double t, double tau, Outcome y) {
  return cpf_probability_table(moments(spec, t, tau), y);
}

SpinBathSpec scaled_gaussian_bath(std::size_t n_spins, double g, double omega) {
  if (n_spins < 1) fail(ErrorCode::invalid_argument, "n_spins must be >= 1");
  require_positive(g, "g");
  require_finite(omega, "omega");
  const double root_n = std::sqrt(static_cast<double>(n_spins));
  const double polarization = omega / (2.0 * g * root_n);
  if (std::abs(polarization) > 1.0)
    fail(ErrorCode::unreachable_polarization, "|omega / (2 g sqrt(N))| = " + std::to_string(std::abs(polarization)) + " > 1");
  const complex alpha{std::sqrt(0.5 * (1.0 + polarization)), 0.0};
  const complex beta{std::sqrt(0.5 * (1.0 - polarization)), 0.0};
  return {std::vector<double>(n_spins, g / root_n), std::vector<complex>(n_spins, alpha),
          std::vector<complex>(n_spins, beta)};
}

complex lorentz_coherence(const LorentzCouplingSpec& spec, double t) {
  spec.validate();
  require_nonnegative(t, "t");
  const double n = static_cast<double>(spec.n_spins);
  const complex phase = std::polar(1.0, spec.omega * t / n);
  const complex factor = std::norm(spec.alpha) * phase + std::norm(spec.beta) * std::conj(phase);
  return std::exp(-spec.gamma * std::abs(t)) * std::pow(factor, static_cast<int>(spec.n_spins));
}

double lorentz_conditional_coherence(double gamma, double t, double tau, Outcome yx) {
  require_positive(gamma, "gamma");
  require_nonnegative(t, "t");
  require_nonnegative(tau, "tau");
  const double sign = yx.value();
  const double denominator = 1.0 + sign * std::exp(-gamma * t);
  if (std::abs(denominator) <= 1e-12) fail(ErrorCode::zero_probability_postselection, "1 + yx e^{-gamma t} vanishes");
  const double numerator =
      std::exp(-gamma * tau) + sign * 0.5 * (std::exp(-gamma * (t + tau)) + std::exp(-gamma * std::abs(t - tau)));
  return numerator / denominator;
}

double lorentz_cpf(double gamma, double t, double tau) {
  require_positive(gamma, "gamma");
  require_nonnegative(t, "t");
  require_nonnegative(tau, "tau");
  return 0.5 * (std::exp(-gamma * (t + tau)) + std::exp(-gamma * std::abs(t - tau))) - std::exp(-gamma * (t + tau));
}

double sample_cauchy(double centre, double half_width, CounterRng& rng) {
  return centre + half_width * std::tan(std::numbers::pi * (rng.uniform_open() - 0.5));
}

SpinBathSpec sample_lorentz_bath(const LorentzCouplingSpec& spec, CounterRng& rng) {
  const double n = static_cast<double>(spec.n_spins);
  SpinBathSpec bath{std::vector<double>(spec.n_spins), std::vector<complex>(spec.n_spins, spec.alpha),
                    std::vector<complex>(spec.n_spins, spec.beta)};
  for (double& g : bath.couplings) g = sample_cauchy(0.5 * spec.omega, 0.5 * spec.gamma, rng) / n;
  return bath;
}

}  // namespace spinbath
}  // namespace cpf
