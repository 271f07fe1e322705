#include "cpf/stochastic.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "cpf/spinbath.hpp"

namespace cpf::stochastic {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

using Moments3 = MomentAccumulator<3>;

void require_times(double t, double tau) {
  require_nonnegative(t, "t");
  require_nonnegative(tau, "tau");
}

// Bivariate Gaussian with the given covariance via its Cholesky factor.
PhasePair sample_gaussian_pair(const analytic::PhaseCovariance& c, CounterRng& rng) {
  std::normal_distribution<double> normal;
  const double z1 = normal(rng);
  const double z2 = normal(rng);
  if (c.var1 <= 0.0) return {0.0, std::sqrt(std::max(c.var2, 0.0)) * z2};
  const double s1 = std::sqrt(c.var1);
  const double l21 = c.cov / s1;
  const double l22 = std::sqrt(std::max(c.var2 - l21 * l21, 0.0));
  return {s1 * z1, l21 * z1 + l22 * z2};
}

MomentEstimates to_estimates(const Moments3& acc) {
  return {acc.estimate_mean(0), acc.estimate_mean(1), acc.estimate_mean(2)};
}

Moments3 accumulate_moments(const NoiseModel& model, double t, double tau, const McConfig& cfg) {
  validate(model);
  require_times(t, tau);
  auto body = [&](Moments3& acc, std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t i = begin; i < end; ++i) {
      CounterRng rng(cfg.seed, i);
      const PhasePair pp = sample_phase_pair(model, t, tau, rng);
      const double c1 = std::cos(2.0 * pp.theta1);
      const double c2 = std::cos(2.0 * pp.theta2);
      acc.push({c1, c2, c1 * c2});
    }
  };
  return reduce_chunks<Moments3>(cfg, body);
}

double correlation_of_counts(const std::array<double, 4>& n_zx) {
  // n_zx ordered (z,x) = (+,+), (+,-), (-,+), (-,-)
  const double m = n_zx[0] + n_zx[1] + n_zx[2] + n_zx[3];
  const double zx = (n_zx[0] - n_zx[1] - n_zx[2] + n_zx[3]) / m;
  const double z = (n_zx[0] + n_zx[1] - n_zx[2] - n_zx[3]) / m;
  const double x = (n_zx[0] - n_zx[1] + n_zx[2] - n_zx[3]) / m;
  return zx - z * x;
}

}  // namespace

TrajectoryProbabilities::TrajectoryProbabilities(const PhasePair& pp)
    : c1_(std::cos(2.0 * pp.theta1)), c2_(std::cos(2.0 * pp.theta2)) {}

double TrajectoryProbabilities::p_y_given_x(Outcome y, Outcome x) const noexcept {
  return 0.5 * (1.0 + (y * x).value() * c1_);
}

double TrajectoryProbabilities::p_z_given_yx(Outcome z, Outcome y, Outcome) const noexcept {
  return 0.5 * (1.0 + (z * y).value() * c2_);
}

PhasePair sample_phase_pair(const NoiseModel& model, double t, double tau, CounterRng& rng) {
  return std::visit(overloaded{
                        [&](const StaticLorentz& m) {
                          const double frequency = spinbath::sample_cauchy(0.5 * m.omega, 0.5 * m.gamma, rng);
                          return PhasePair{frequency * t, frequency * tau};
                        },
                        [&](const StaticGauss& m) {
                          std::normal_distribution<double> normal(0.0, m.g);
                          const double xi = normal(rng);
                          return PhasePair{xi * t, xi * tau};
                        },
                        [&](const auto&) { return sample_gaussian_pair(analytic::phase_covariance(model, t, tau), rng); },
                    },
                    model);
}

TrajectoryProbabilities trajectory_probabilities(const PhasePair& pp) { return TrajectoryProbabilities(pp); }

OutcomeTriple sample_outcome_triple(const PhasePair& pp, CounterRng& rng) {
  const TrajectoryProbabilities probs(pp);
  const Outcome x = (rng() >> 63) ? Outcome::minus() : Outcome::plus();
  const Outcome y = rng.uniform_open() < probs.p_y_given_x(x, x) ? x : -x;
  const Outcome z = rng.uniform_open() < probs.p_z_given_yx(y, y, x) ? y : -y;
  return {x, y, z};
}

MomentEstimates mc_moments(const NoiseModel& model, double t, double tau, const McConfig& cfg) {
  return to_estimates(accumulate_moments(model, t, tau, cfg));
}

Estimate mc_cpf_semianalytic(const NoiseModel& model, double t, double tau, const McConfig& cfg) {
  const Moments3 acc = accumulate_moments(model, t, tau, cfg);
  const double value = acc.mean[2] - acc.mean[0] * acc.mean[1];
  return {value, acc.delta_method_error({-acc.mean[1], -acc.mean[0], 1.0}), acc.count};
}

CpfProbabilityTable mc_probability_table(const NoiseModel& model, double t, double tau, Outcome y,
                                         const McConfig& cfg) {
  const Moments3 acc = accumulate_moments(model, t, tau, cfg);
  return cpf_probability_table({acc.mean[0], acc.mean[1], acc.mean[2]}, y);
}

std::uint64_t TripleCounts::kept(Outcome y) const noexcept {
  std::uint64_t n = 0;
  for (Outcome z : kOutcomes)
    for (Outcome x : kOutcomes) n += at(y, z, x);
  return n;
}

std::uint64_t TripleCounts::total() const noexcept { return kept(Outcome::plus()) + kept(Outcome::minus()); }

TripleCounts sample_triples(const NoiseModel& model, double t, double tau, const McConfig& cfg) {
  validate(model);
  require_times(t, tau);
  auto body = [&](TripleCounts& acc, std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t i = begin; i < end; ++i) {
      CounterRng rng(cfg.seed, i);
      const PhasePair pp = sample_phase_pair(model, t, tau, rng);
      const OutcomeTriple triple = sample_outcome_triple(pp, rng);
      ++acc.at(triple.y, triple.z, triple.x);
    }
  };
  return reduce_chunks<TripleCounts>(cfg, body);
}

CpfProbabilityTable empirical_table(const TripleCounts& counts, Outcome y) {
  const std::uint64_t kept = counts.kept(y);
  if (kept == 0) fail(ErrorCode::empty_postselection, "no sampled triple has the requested middle outcome");
  std::array<double, 4> joint{};
  for (Outcome z : kOutcomes)
    for (Outcome x : kOutcomes)
      joint[CpfProbabilityTable::index(z, x)] = static_cast<double>(counts.at(y, z, x)) / static_cast<double>(kept);
  return CpfProbabilityTable::from_joint(y, joint);
}

Estimate cpf_from_counts(const TripleCounts& counts, Outcome y_select, std::uint64_t bootstrap_seed) {
  const std::uint64_t kept = counts.kept(y_select);
  if (kept == 0) fail(ErrorCode::empty_postselection, "no sampled triple has the requested middle outcome");

  std::array<double, 4> n_zx{};
  for (Outcome z : kOutcomes)
    for (Outcome x : kOutcomes)
      n_zx[CpfProbabilityTable::index(z, x)] = static_cast<double>(counts.at(y_select, z, x));
  const double value = correlation_of_counts(n_zx);

  // Resampling the kept triples with replacement is a multinomial draw over
  // the four (z, x) cells.
  std::vector<double> replicas(kBootstrapResamples);
  for (int b = 0; b < kBootstrapResamples; ++b) {
    CounterRng rng(bootstrap_seed, static_cast<std::uint64_t>(b), CounterRng::Domain::bootstrap);
    std::array<double, 4> resampled{};
    std::uint64_t remaining = kept;
    double mass_left = 1.0;
    for (std::size_t cell = 0; cell < 3; ++cell) {
      const double p = mass_left > 0.0 ? std::min(1.0, n_zx[cell] / static_cast<double>(kept) / mass_left) : 0.0;
      std::binomial_distribution<std::uint64_t> binomial(remaining, p);
      const std::uint64_t drawn = remaining > 0 ? binomial(rng) : 0;
      resampled[cell] = static_cast<double>(drawn);
      remaining -= drawn;
      mass_left -= n_zx[cell] / static_cast<double>(kept);
    }
    resampled[3] = static_cast<double>(remaining);
    replicas[static_cast<std::size_t>(b)] = correlation_of_counts(resampled);
  }
  double mean = 0.0;
  for (double r : replicas) mean += r;
  mean /= kBootstrapResamples;
  double var = 0.0;
  for (double r : replicas) var += (r - mean) * (r - mean);
  var /= kBootstrapResamples - 1;
  return {value, std::sqrt(var), kept};
}

Estimate mc_cpf_sampling(const NoiseModel& model, double t, double tau, Outcome y_select, const McConfig& cfg) {
  return cpf_from_counts(sample_triples(model, t, tau, cfg), y_select, cfg.seed);
}

Estimate mc_conditional_coherence(const NoiseModel& model, double t, double tau, Outcome yx, const McConfig& cfg) {
  const Moments3 acc = accumulate_moments(model, t, tau, cfg);
  const double sign = yx.value();
  const double den = 1.0 + sign * acc.mean[0];
  if (std::abs(den) <= 1e-9) fail(ErrorCode::zero_probability_postselection, "1 + yx f(t) vanishes on the sample");
  const double num = acc.mean[1] + sign * acc.mean[2];
  return {num / den, acc.delta_method_error({-sign * num / (den * den), 1.0 / den, sign / den}), acc.count};
}

double effective_path_dt(const ExpCorrGauss& model, const McConfig& cfg) {
  return cfg.path_dt > 0.0 ? cfg.path_dt : std::min(model.tau_c, 1.0 / model.g) / 50.0;
}

MomentEstimates ou_path_reference(const ExpCorrGauss& model, double t, double tau, const McConfig& cfg) {
  validate(NoiseModel{model});
  require_times(t, tau);
  cfg.validate();
  const double dt = effective_path_dt(model, cfg);
  if (dt > model.tau_c / 10.0) fail(ErrorCode::step_too_coarse, "path_dt exceeds tau_c / 10");

  auto steps_for = [&](double length) -> std::uint64_t {
    return length > 0.0 ? static_cast<std::uint64_t>(std::ceil(length / dt - 1e-9)) : 0;
  };
  const std::uint64_t n1 = steps_for(t);
  const std::uint64_t n2 = steps_for(tau);
  const double h1 = n1 ? t / static_cast<double>(n1) : 0.0;
  const double h2 = n2 ? tau / static_cast<double>(n2) : 0.0;
  const double decay1 = std::exp(-h1 / model.tau_c);
  const double decay2 = std::exp(-h2 / model.tau_c);
  const double kick1 = model.g * std::sqrt(-std::expm1(-2.0 * h1 / model.tau_c));
  const double kick2 = model.g * std::sqrt(-std::expm1(-2.0 * h2 / model.tau_c));

  auto body = [&](Moments3& acc, std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t i = begin; i < end; ++i) {
      CounterRng rng(cfg.seed, i);
      std::normal_distribution<double> normal;
      double xi = model.g * normal(rng);
      auto integrate = [&](std::uint64_t steps, double h, double decay, double kick) {
        double phase = 0.0;
        for (std::uint64_t s = 0; s < steps; ++s) {
          const double next = xi * decay + kick * normal(rng);
          phase += 0.5 * h * (xi + next);
          xi = next;
        }
        return phase;
      };
      const double theta1 = integrate(n1, h1, decay1, kick1);
      const double theta2 = integrate(n2, h2, decay2, kick2);
      const double c1 = std::cos(2.0 * theta1);
      const double c2 = std::cos(2.0 * theta2);
      acc.push({c1, c2, c1 * c2});
    }
  };
  return to_estimates(reduce_chunks<Moments3>(cfg, body));
}

}  // namespace cpf::stochastic
