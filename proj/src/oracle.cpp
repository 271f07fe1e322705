#include "cpf/oracle.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace cpf::oracle {

namespace {

void require_small_bath(const SpinBathSpec& spec) {
  spec.validate();
  if (spec.n_spins() > kMaxSpins)
    fail(ErrorCode::bath_too_large, std::to_string(spec.n_spins()) + " spins exceed the dense limit of " +
                                        std::to_string(kMaxSpins));
}

double convention_sign(PhaseConvention convention) { return convention == PhaseConvention::standard ? 1.0 : -1.0; }

// Sign of sigma_z for bit value b: 0 -> +1, 1 -> -1.
constexpr double z_sign(std::size_t bit) { return bit ? -1.0 : 1.0; }

void evolve_energy(StateVector& psi, const SpinBathSpec& spec, double angle_scale, Execution execution) {
  const std::size_t n_spins = spec.n_spins();
  const auto dim = static_cast<std::int64_t>(psi.size());
  auto kernel = [&](std::int64_t i) {
    const auto index = static_cast<std::size_t>(i);
    double field = 0.0;
    for (std::size_t k = 0; k < n_spins; ++k) field += spec.couplings[k] * z_sign((index >> (k + 1)) & 1u);
    psi[index] *= std::polar(1.0, angle_scale * z_sign(index & 1u) * field);
  };
  if (execution == Execution::serial) {
    for (std::int64_t i = 0; i < dim; ++i) kernel(i);
  } else {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < dim; ++i) kernel(i);
  }
}

void evolve_per_spin(StateVector& psi, const SpinBathSpec& spec, double angle_scale, Execution execution) {
  const auto dim = static_cast<std::int64_t>(psi.size());
  for (std::size_t k = 0; k < spec.n_spins(); ++k) {
    // Phases for the four (system, spin) sign combinations.
    const complex aligned = std::polar(1.0, angle_scale * spec.couplings[k]);
    const complex opposed = std::conj(aligned);
    const std::size_t bit = k + 1;
    auto kernel = [&](std::int64_t i) {
      const auto index = static_cast<std::size_t>(i);
      const bool same = (index & 1u) == ((index >> bit) & 1u);
      psi[index] *= same ? aligned : opposed;
    };
    if (execution == Execution::serial) {
      for (std::int64_t i = 0; i < dim; ++i) kernel(i);
    } else {
#pragma omp parallel for schedule(static)
      for (std::int64_t i = 0; i < dim; ++i) kernel(i);
    }
  }
}

// <+| rho_system |-> = sum over bath states of psi(+, B) conj(psi(-, B)).
complex system_off_diagonal(const StateVector& psi) {
  complex sum{0.0, 0.0};
  for (std::size_t i = 0; i < psi.size(); i += 2) sum += psi[i] * std::conj(psi[i + 1]);
  return sum;
}

}  // namespace

StateVector initial_state(const SpinBathSpec& spec, const SystemInit& init) {
  require_small_bath(spec);
  init.validate();
  const std::size_t dim = std::size_t{1} << (spec.n_spins() + 1);
  StateVector psi(dim);
  for (std::size_t index = 0; index < dim; ++index) {
    complex amp = (index & 1u) ? init.b : init.a;
    for (std::size_t k = 0; k < spec.n_spins(); ++k)
      amp *= ((index >> (k + 1)) & 1u) ? spec.betas[k] : spec.alphas[k];
    psi[index] = amp;
  }
  return psi;
}

void evolve(StateVector& psi, const SpinBathSpec& spec, double t, const Options& options) {
  // Component (s, sigma) picks up exp(+i s sigma g t): relative system phase 2 g t.
  const double angle_scale = t * convention_sign(options.convention);
  if (options.path == PropagatorPath::energy) {
    evolve_energy(psi, spec, angle_scale, options.execution);
  } else {
    evolve_per_spin(psi, spec, angle_scale, options.execution);
  }
}

double measure_x(StateVector& psi, Outcome s, Execution execution) {
  const double sign = s.value();
  const auto pairs = static_cast<std::int64_t>(psi.size() / 2);
  double probability = 0.0;
  auto kernel = [&](std::int64_t p) {
    const auto i = static_cast<std::size_t>(2 * p);
    const complex overlap = (psi[i] + sign * psi[i + 1]) * (0.5 * std::numbers::sqrt2);
    psi[i] = overlap * (0.5 * std::numbers::sqrt2);
    psi[i + 1] = sign * psi[i];
    return std::norm(overlap);
  };
  if (execution == Execution::serial) {
    for (std::int64_t p = 0; p < pairs; ++p) probability += kernel(p);
  } else {
#pragma omp parallel for schedule(static) reduction(+ : probability)
    for (std::int64_t p = 0; p < pairs; ++p) probability += kernel(p);
  }
  if (probability > 0.0) {
    const double scale = 1.0 / std::sqrt(probability);
    for (complex& a : psi) a *= scale;
  }
  return probability;
}

CpfProbabilityTable protocol(const SpinBathSpec& spec, const SystemInit& init, double t, double tau, Outcome y,
                             const Options& options) {
  require_nonnegative(t, "t");
  require_nonnegative(tau, "tau");
  const StateVector psi0 = initial_state(spec, init);

  struct Branch {
    double p_x = 0.0;
    double p_y_given_x = 0.0;
    StateVector after_y;
  };
  std::array<Branch, 2> branches;
  double p_y = 0.0;
  for (Outcome x : kOutcomes) {
    Branch& branch = branches[x.is_plus() ? 0 : 1];
    StateVector psi = psi0;
    branch.p_x = measure_x(psi, x, options.execution);
    if (branch.p_x <= 0.0) continue;
    evolve(psi, spec, t, options);
    branch.p_y_given_x = measure_x(psi, y, options.execution);
    branch.after_y = std::move(psi);
    p_y += branch.p_x * branch.p_y_given_x;
  }
  if (p_y <= 1e-12) fail(ErrorCode::zero_probability_postselection, "middle outcome has vanishing probability");

  std::array<double, 4> joint{};
  for (Outcome x : kOutcomes) {
    Branch& branch = branches[x.is_plus() ? 0 : 1];
    const double p_x_given_y = branch.p_x * branch.p_y_given_x / p_y;
    if (p_x_given_y <= 0.0) continue;
    evolve(branch.after_y, spec, tau, options);
    for (Outcome z : kOutcomes) {
      StateVector psi = branch.after_y;
      const double p_z_given_yx = measure_x(psi, z, options.execution);
      joint[CpfProbabilityTable::index(z, x)] = p_z_given_yx * p_x_given_y;
    }
  }
  return CpfProbabilityTable::from_joint(y, joint);
}

complex coherence(const SpinBathSpec& spec, double t, const Options& options) {
  require_nonnegative(t, "t");
  StateVector psi = initial_state(spec, SystemInit{});
  measure_x(psi, Outcome::plus(), options.execution);
  evolve(psi, spec, t, options);
  // rho = (1/2) [[1, x c], [x c*, 1]] with x = +1.
  return 2.0 * system_off_diagonal(psi);
}

complex conditional_coherence(const SpinBathSpec& spec, double t, double tau, Outcome yx, const Options& options) {
  require_nonnegative(t, "t");
  require_nonnegative(tau, "tau");
  const Outcome y = Outcome::plus();
  const Outcome x = yx * y;
  StateVector psi = initial_state(spec, SystemInit{});
  measure_x(psi, x, options.execution);
  evolve(psi, spec, t, options);
  if (measure_x(psi, y, options.execution) <= 1e-12)
    fail(ErrorCode::zero_probability_postselection, "outcome pair (x, y) has vanishing probability");
  evolve(psi, spec, tau, options);
  // rho = (1/2) [[1, y c], [y c*, 1]].
  return 2.0 * static_cast<double>(y.value()) * system_off_diagonal(psi);
}

}  // namespace cpf::oracle
