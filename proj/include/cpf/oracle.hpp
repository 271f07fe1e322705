#pragma once

// Dense system (x) bath statevector replay of the three-measurement protocol.
// Amplitude index bit 0 is the system sigma_z state (0 = |+>, 1 = |->), bit k (k >= 1) is
// bath spin k-1 (0 = up, 1 = down).

#include <cstddef>
#include <vector>

#include "cpf/mc.hpp"
#include "cpf/spinbath.hpp"

namespace cpf::oracle {

inline constexpr std::size_t kMaxSpins = 14;

/// standard: (system s, spin sigma) acquires e^{+i s sigma g t}, so c_t matches
/// the product formula including its imaginary part. conjugate flips every phase.
enum class PhaseConvention { standard, conjugate };

/// Two independent implementations of the diagonal propagator.
enum class PropagatorPath {
  energy,    // one phase per basis state from the summed bath field
  per_spin,  // N successive two-body phase passes
};

struct Options {
  PhaseConvention convention = PhaseConvention::standard;
  PropagatorPath path = PropagatorPath::energy;
  Execution execution = Execution::parallel;
};

using StateVector = std::vector<complex>;

/// System amplitude (a, b) times the bath product state.
StateVector initial_state(const SpinBathSpec& spec, const SystemInit& init);

/// In-place exp(-i H t) for the diagonal coupling Hamiltonian.
void evolve(StateVector& psi, const SpinBathSpec& spec, double t, const Options& options = {});

/// Projects the system onto |x_s> = (|+> + s|->)/sqrt(2). Returns the
/// outcome probability; the state is renormalised when it is non-zero.
double measure_x(StateVector& psi, Outcome s, Execution execution = Execution::parallel);

/// Full protocol: P(z, x | y) assembled from P(z|y,x) P(x|y) by Bayes.
/// Throws bath_too_large for N > kMaxSpins, zero_probability_postselection
/// if the middle outcome y has probability zero.
CpfProbabilityTable protocol(const SpinBathSpec& spec, const SystemInit& init, double t, double tau, Outcome y,
                             const Options& options = {});

/// c_t read off the reduced system state after outcome x = +1 and time t,
/// starting from |+>.
complex coherence(const SpinBathSpec& spec, double t, const Options& options = {});

/// c^{yx}_{t,tau} read off the reduced system state after outcomes x = yx,
/// y = +1 and the second interval, starting from |+>.
complex conditional_coherence(const SpinBathSpec& spec, double t, double tau, Outcome yx, const Options& options = {});

}  // namespace cpf::oracle
