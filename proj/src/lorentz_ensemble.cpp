#include <cmath>
#include <limits>

#include "cpf/spinbath.hpp"

namespace cpf::spinbath {

namespace {

// Per-realization variables: Re c_t, Im c_t, f(tau), [f(t+tau) + f(t-tau)]/2,
// and the per-realization correlation.
constexpr std::size_t kVars = 5;
using Accumulator = MomentAccumulator<kVars>;

Estimate conditional_estimate(const Accumulator& acc, double sign) {
  const double den = 1.0 + sign * acc.mean[0];
  if (std::abs(den) <= 1e-9) {
    return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::infinity(), acc.count};
  }
  const double num = acc.mean[2] + sign * acc.mean[3];
  const std::array<double, kVars> grad{-sign * num / (den * den), 0.0, 1.0 / den, sign / den, 0.0};
  return {num / den, acc.delta_method_error(grad), acc.count};
}

}  // namespace

LorentzEnsemble lorentz_ensemble(const LorentzCouplingSpec& spec, double t, double tau, const McConfig& cfg) {
  spec.validate();
  require_nonnegative(t, "t");
  require_nonnegative(tau, "tau");
  cfg.validate();

  const double n = static_cast<double>(spec.n_spins);
  const double w_up = std::norm(spec.alpha);
  const double w_down = std::norm(spec.beta);

  auto body = [&](Accumulator& acc, std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t r = begin; r < end; ++r) {
      CounterRng rng(cfg.seed, r, CounterRng::Domain::ensemble);
      complex c_t{1.0, 0.0}, c_tau{1.0, 0.0}, c_sum{1.0, 0.0}, c_diff{1.0, 0.0};
      for (std::size_t k = 0; k < spec.n_spins; ++k) {
        const double g = sample_cauchy(0.5 * spec.omega, 0.5 * spec.gamma, rng) / n;
        const complex e_t = std::polar(1.0, 2.0 * g * t);
        const complex e_tau = std::polar(1.0, 2.0 * g * tau);
        const complex e_sum = e_t * e_tau;
        const complex e_diff = e_t * std::conj(e_tau);
        c_t *= w_up * e_t + w_down * std::conj(e_t);
        c_tau *= w_up * e_tau + w_down * std::conj(e_tau);
        c_sum *= w_up * e_sum + w_down * std::conj(e_sum);
        c_diff *= w_up * e_diff + w_down * std::conj(e_diff);
      }
      const double joint = 0.5 * (c_sum.real() + c_diff.real());
      acc.push({c_t.real(), c_t.imag(), c_tau.real(), joint, joint - c_t.real() * c_tau.real()});
    }
  };
  const auto acc = reduce_chunks<Accumulator>(cfg, body);

  LorentzEnsemble out;
  out.coherence_re = acc.estimate_mean(0);
  out.coherence_im = acc.estimate_mean(1);
  out.f_t = acc.estimate_mean(0);
  out.f_tau = acc.estimate_mean(2);
  out.f_joint = acc.estimate_mean(3);
  out.cpf = {acc.mean[3] - acc.mean[0] * acc.mean[2],
             acc.delta_method_error({-acc.mean[2], 0.0, -acc.mean[0], 1.0, 0.0}), acc.count};
  out.cpf_per_realization = acc.estimate_mean(4);
  out.conditional_coherence_plus = conditional_estimate(acc, +1.0);
  out.conditional_coherence_minus = conditional_estimate(acc, -1.0);
  return out;
}

}  // namespace cpf::spinbath
