#pragma once

// Qubit coupled to N bath spins through sigma_z (x) sum_k g_k sigma_z^(k),
// bath initially in the product state prod_k (alpha_k |up> + beta_k |down>).

#include <complex>
#include <numbers>
#include <cstddef>
#include <vector>

#include "cpf/core.hpp"
#include "cpf/mc.hpp"
#include "cpf/rng.hpp"

namespace cpf {

using complex = std::complex<double>;

struct SpinBathSpec {
  std::vector<double> couplings;
  std::vector<complex> alphas;
  std::vector<complex> betas;

  std::size_t n_spins() const noexcept { return couplings.size(); }

  /// Throws invalid_argument on length mismatch, N = 0, non-finite entries,
  /// or |alpha|^2 + |beta|^2 != 1 beyond 1e-12.
  void validate() const;
};

/// System amplitudes on |+>, |-> (sigma_z eigenstates).
struct SystemInit {
  complex a{1.0, 0.0};
  complex b{0.0, 0.0};

  void validate() const;
};

/// Bath of N spins with i.i.d. couplings g_k = g~_k / N, g~_k Cauchy with
/// centre omega/2 and half-width gamma/2; uniform initial spin state.
struct LorentzCouplingSpec {
  double gamma = 1.0;
  double omega = 0.0;
  std::size_t n_spins = 1;
  complex alpha{std::numbers::sqrt2 / 2.0, 0.0};
  complex beta{std::numbers::sqrt2 / 2.0, 0.0};

  void validate() const;
};

namespace spinbath {

/// c_u = prod_k (|alpha_k|^2 e^{+2i g_k u} + |beta_k|^2 e^{-2i g_k u}).
/// Defined for any real u; negative u is used for c_{t - tau}.
complex coherence(const SpinBathSpec& spec, double u);

/// Coherence after the second measurement given the outcome product yx.
/// Throws zero_probability_postselection when 1 + yx Re c_t vanishes.
complex conditional_coherence(const SpinBathSpec& spec, double t, double tau, Outcome yx);

/// Moments f(t) = Re c_t, f(tau), and [f(t+tau) + f(t-tau)] / 2.
MomentSet moments(const SpinBathSpec& spec, double t, double tau);

double cpf(const SpinBathSpec& spec, double t, double tau);

CpfProbabilityTable cpf_probability(const SpinBathSpec& spec, double t, double tau, Outcome y);

/// Uniform bath with g_k = g / sqrt(N) and |alpha|^2 - |beta|^2 = omega / (2 g sqrt(N)).
/// Throws unreachable_polarization if that difference exceeds 1 in magnitude.
SpinBathSpec scaled_gaussian_bath(std::size_t n_spins, double g, double omega);

/// Ensemble-averaged coherence e^{-gamma t} (|a|^2 e^{i omega t/N} + |b|^2 e^{-i omega t/N})^N.
complex lorentz_coherence(const LorentzCouplingSpec& spec, double t);

/// [e^{-gamma tau} + yx (e^{-gamma (t+tau)} + e^{-gamma |t-tau|}) / 2] / [1 + yx e^{-gamma t}]
double lorentz_conditional_coherence(double gamma, double t, double tau, Outcome yx);

/// [e^{-gamma (t+tau)} + e^{-gamma |t-tau|}] / 2 - e^{-gamma (t+tau)}
double lorentz_cpf(double gamma, double t, double tau);

/// Draws one coupling realization g_k = g~_k / N, g~_k by inverse-CDF Cauchy.
SpinBathSpec sample_lorentz_bath(const LorentzCouplingSpec& spec, CounterRng& rng);

/// Inverse-CDF Cauchy draw: centre + half_width * tan(pi (u - 1/2)).
double sample_cauchy(double centre, double half_width, CounterRng& rng);

/// Ensemble averages over Cauchy coupling realizations, computed from
/// per-realization probability tables (table first, then correlation).
struct LorentzEnsemble {
  Estimate coherence_re;       // mean Re c_t
  Estimate coherence_im;       // mean Im c_t
  Estimate f_t;                // mean f(t)
  Estimate f_tau;              // mean f(tau)
  Estimate f_joint;            // mean [f(t+tau) + f(t-tau)] / 2
  Estimate cpf;                // mean f_joint - mean f_t * mean f_tau
  Estimate cpf_per_realization;  // mean of per-realization correlations
  Estimate conditional_coherence_plus;   // yx = +1
  Estimate conditional_coherence_minus;  // yx = -1; infinite error if undefined

  MomentSet mean_moments() const { return {f_t.value, f_tau.value, f_joint.value}; }
};

LorentzEnsemble lorentz_ensemble(const LorentzCouplingSpec& spec, double t, double tau, const McConfig& cfg);

}  // namespace spinbath
}  // namespace cpf
