#pragma once

// Protocol-level types and the model-independent correlation algebra for the
// three-measurement (x -> y -> z) protocol in the sigma_x basis.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "cpf/error.hpp"

namespace cpf {

/// Result of a projective sigma_x measurement: +1 or -1.
class Outcome {
 public:
  /// Throws invalid_argument unless value is +1 or -1.
  explicit Outcome(int value);

  static constexpr Outcome plus() noexcept { return Outcome(Tag{}, +1); }
  static constexpr Outcome minus() noexcept { return Outcome(Tag{}, -1); }

  constexpr int value() const noexcept { return value_; }
  constexpr bool is_plus() const noexcept { return value_ > 0; }
  constexpr Outcome operator-() const noexcept { return Outcome(Tag{}, -value_); }
  constexpr Outcome operator*(Outcome other) const noexcept {
    return Outcome(Tag{}, value_ * other.value_);
  }
  constexpr bool operator==(const Outcome&) const = default;

 private:
  struct Tag {};
  constexpr Outcome(Tag, int v) noexcept : value_(v) {}
  int value_;
};

inline constexpr std::array<Outcome, 2> kOutcomes{Outcome::plus(), Outcome::minus()};

struct OutcomeTriple {
  Outcome x;
  Outcome y;
  Outcome z;
};

/// Measurement intervals: t between x and y, tau between y and z.
struct TimePair {
  double t = 0.0;
  double tau = 0.0;

  /// Throws invalid_argument for negative or non-finite times.
  static TimePair make(double t, double tau);
};

/// Dephasing moments: f(t), f'(tau) and the cross moment f(t, tau).
struct MomentSet {
  double f_t = 1.0;
  double f_tau = 1.0;
  double f_joint = 1.0;

  void validate() const;
};

/// P(z, x | y) for a fixed middle outcome y, with both marginals.
class CpfProbabilityTable {
 public:
  static constexpr double kTolerance = 1e-9;

  /// Builds the table from the four joint entries P(z,x|y), computing the
  /// marginals. Throws invalid_moment_set if an entry leaves [0,1] by more
  /// than kTolerance or the entries do not sum to one.
  static CpfProbabilityTable from_joint(Outcome y, const std::array<double, 4>& joint);

  Outcome y_condition() const noexcept { return y_; }
  double joint(Outcome z, Outcome x) const noexcept { return joint_[index(z, x)]; }
  double marginal_x(Outcome x) const noexcept { return marginal_x_[x.is_plus() ? 0 : 1]; }
  double marginal_z(Outcome z) const noexcept { return marginal_z_[z.is_plus() ? 0 : 1]; }
  const std::array<double, 4>& joint_entries() const noexcept { return joint_; }

  /// Entry order of joint_entries(): (z,x) = (+,+), (+,-), (-,+), (-,-).
  static constexpr std::size_t index(Outcome z, Outcome x) noexcept {
    return (z.is_plus() ? 0u : 2u) + (x.is_plus() ? 0u : 1u);
  }

 private:
  CpfProbabilityTable(Outcome y, const std::array<double, 4>& joint);

  Outcome y_;
  std::array<double, 4> joint_{};
  std::array<double, 2> marginal_x_{};
  std::array<double, 2> marginal_z_{};
};

/// Monte Carlo result.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t n_samples = 1;
};

enum class Method { analytic, montecarlo, sampling, oracle };

const char* to_string(Method method) noexcept;

/// Values of the correlation on a (t, tau) grid, row-major in t.
struct CpfSurface {
  std::vector<double> t_grid;
  std::vector<double> tau_grid;
  std::vector<double> values;
  std::vector<double> std_errors;  // empty for deterministic methods
  std::string model_tag;
  Method method = Method::analytic;

  double at(std::size_t i_t, std::size_t i_tau) const { return values[i_t * tau_grid.size() + i_tau]; }
  void validate() const;
};

/// f(t,tau) - f(t) f(tau).
double cpf_from_moments(const MomentSet& m);

/// P(z,x|y) = [1 + xy f_t + zy f_tau + zx f_joint] / 4.
CpfProbabilityTable cpf_probability_table(const MomentSet& m, Outcome y);

/// Sum over (z,x) of [P(z,x|y) - P(z|y) P(x|y)] z x.
double cpf_from_table(const CpfProbabilityTable& table);

}  // namespace cpf
