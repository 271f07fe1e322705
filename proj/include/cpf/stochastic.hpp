#pragma once

// Trajectory-level simulation of a qubit under a classical dephasing drive.
// Each trajectory draws the integrated phases of one noise realization over
// the two measurement intervals; estimators average per-trajectory
// measurement probabilities or literally sampled outcome triples.

#include <array>

#include "cpf/analytic.hpp"
#include "cpf/core.hpp"
#include "cpf/mc.hpp"
#include "cpf/rng.hpp"

namespace cpf::stochastic {

/// theta1 = int_0^t xi, theta2 = int_t^{t+tau} xi.
struct PhasePair {
  double theta1 = 0.0;
  double theta2 = 0.0;
};

/// Per-realization conditional probabilities.
class TrajectoryProbabilities {
 public:
  explicit TrajectoryProbabilities(const PhasePair& pp);

  /// (1 + yx cos 2 theta1) / 2
  double p_y_given_x(Outcome y, Outcome x) const noexcept;
  /// (1 + zy cos 2 theta2) / 2, independent of x.
  double p_z_given_yx(Outcome z, Outcome y, Outcome x) const noexcept;
  static constexpr double p_x(Outcome) noexcept { return 0.5; }

 private:
  double c1_;
  double c2_;
};

/// Draws (theta1, theta2) with the model's exact joint law.
PhasePair sample_phase_pair(const NoiseModel& model, double t, double tau, CounterRng& rng);

TrajectoryProbabilities trajectory_probabilities(const PhasePair& pp);

/// x uniform, y ~ P(y|x), z ~ P(z|y,x).
OutcomeTriple sample_outcome_triple(const PhasePair& pp, CounterRng& rng);

struct MomentEstimates {
  Estimate f_t;
  Estimate f_tau;
  Estimate f_joint;
};

/// Sample means of cos 2theta1, cos 2theta2 and their product.
MomentEstimates mc_moments(const NoiseModel& model, double t, double tau, const McConfig& cfg);

/// f_joint - f_t f_tau on shared trajectories, delta-method error.
Estimate mc_cpf_semianalytic(const NoiseModel& model, double t, double tau, const McConfig& cfg);

/// Probability table built from the Monte Carlo moments.
CpfProbabilityTable mc_probability_table(const NoiseModel& model, double t, double tau, Outcome y,
                                         const McConfig& cfg);

/// Counts of sampled outcome triples, index [y][z][x] with 0 for +1.
struct TripleCounts {
  std::array<std::uint64_t, 8> counts{};

  std::uint64_t& at(Outcome y, Outcome z, Outcome x) noexcept { return counts[slot(y, z, x)]; }
  std::uint64_t at(Outcome y, Outcome z, Outcome x) const noexcept { return counts[slot(y, z, x)]; }
  std::uint64_t kept(Outcome y) const noexcept;
  std::uint64_t total() const noexcept;
  void merge(const TripleCounts& other) noexcept {
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
  }

 private:
  static constexpr std::size_t slot(Outcome y, Outcome z, Outcome x) noexcept {
    return (y.is_plus() ? 0u : 4u) + (z.is_plus() ? 0u : 2u) + (x.is_plus() ? 0u : 1u);
  }
};

/// One outcome triple per trajectory.
TripleCounts sample_triples(const NoiseModel& model, double t, double tau, const McConfig& cfg);

/// Empirical P(z,x|y) from the triples with the given middle outcome.
CpfProbabilityTable empirical_table(const TripleCounts& counts, Outcome y);

inline constexpr int kBootstrapResamples = 200;

/// <zx> - <z><x> over the postselected triples with bootstrap error.
/// Throws empty_postselection when no triple has y = y_select.
Estimate cpf_from_counts(const TripleCounts& counts, Outcome y_select, std::uint64_t bootstrap_seed);

/// sample_triples followed by cpf_from_counts.
Estimate mc_cpf_sampling(const NoiseModel& model, double t, double tau, Outcome y_select, const McConfig& cfg);

/// mean[cos 2theta2 (1 + yx cos 2theta1)] / (1 + yx mean cos 2theta1).
/// Throws zero_probability_postselection when the denominator is <= 1e-9.
Estimate mc_conditional_coherence(const NoiseModel& model, double t, double tau, Outcome yx, const McConfig& cfg);

/// Same three moments from discretized Ornstein-Uhlenbeck paths (exact AR(1)
/// update, stationary start, trapezoid phase integration). Throws
/// step_too_coarse when the step exceeds tau_c / 10.
MomentEstimates ou_path_reference(const ExpCorrGauss& model, double t, double tau, const McConfig& cfg);

/// Step used by ou_path_reference for this configuration.
double effective_path_dt(const ExpCorrGauss& model, const McConfig& cfg);

}  // namespace cpf::stochastic
