#include <gtest/gtest.h>

#include <cmath>

#include "cpf/analytic.hpp"
#include "cpf/error.hpp"
#include "cpf/stochastic.hpp"

using namespace cpf;

namespace {

McConfig config(std::uint64_t n, std::uint64_t seed) {
  McConfig cfg;
  cfg.n_trajectories = n;
  cfg.seed = seed;
  cfg.chunk_size = std::min<std::uint64_t>(cfg.chunk_size, n);
  return cfg;
}

void expect_within(const Estimate& e, double expected, double k, const std::string& what) {
  EXPECT_LE(std::abs(e.value - expected), k * e.std_error)
      << what << ": " << e.value << " +/- " << e.std_error << " vs " << expected;
}

}  // namespace

TEST(Trajectory, ConditionalProbabilitiesNormalise) {
  const stochastic::TrajectoryProbabilities p(stochastic::PhasePair{0.3, -1.2});
  for (Outcome x : kOutcomes) {
    EXPECT_NEAR(p.p_y_given_x(Outcome::plus(), x) + p.p_y_given_x(Outcome::minus(), x), 1.0, 1e-15);
    for (Outcome y : kOutcomes)
      EXPECT_NEAR(p.p_z_given_yx(Outcome::plus(), y, x) + p.p_z_given_yx(Outcome::minus(), y, x), 1.0, 1e-15);
  }
  EXPECT_NEAR(p.p_y_given_x(Outcome::plus(), Outcome::plus()), 0.5 * (1 + std::cos(0.6)), 1e-15);
  EXPECT_NEAR(p.p_z_given_yx(Outcome::minus(), Outcome::plus(), Outcome::minus()), 0.5 * (1 - std::cos(2.4)), 1e-15);
}

TEST(Trajectory, PhaseSamplerCovariance) {
  const NoiseModel ou = ExpCorrGauss{1.3, 0.4};
  const auto pc = analytic::phase_covariance(ou, 0.9, 1.7);
  const int n = 200000;
  double s11 = 0, s22 = 0, s12 = 0;
  for (int i = 0; i < n; ++i) {
    CounterRng rng(1, static_cast<std::uint64_t>(i));
    const auto pp = stochastic::sample_phase_pair(ou, 0.9, 1.7, rng);
    s11 += pp.theta1 * pp.theta1, s22 += pp.theta2 * pp.theta2, s12 += pp.theta1 * pp.theta2;
  }
  EXPECT_NEAR(s11 / n, pc.var1, 5.0 * pc.var1 * std::sqrt(2.0 / n));
  EXPECT_NEAR(s22 / n, pc.var2, 5.0 * pc.var2 * std::sqrt(2.0 / n));
  EXPECT_NEAR(s12 / n, pc.cov, 5.0 * std::sqrt((pc.var1 * pc.var2 + pc.cov * pc.cov) / n));
}

class MomentsAgree : public ::testing::TestWithParam<NoiseModel> {};

TEST_P(MomentsAgree, MonteCarloMatchesClosedForm) {
  const NoiseModel model = GetParam();
  std::uint64_t seed = 40;
  for (const auto& [t, tau] : {std::pair{0.3, 0.9}, std::pair{1.2, 0.5}, std::pair{2.0, 2.0}}) {
    const MomentSet exact = analytic::moments(model, t, tau);
    const auto m = stochastic::mc_moments(model, t, tau, config(200'000, ++seed));
    expect_within(m.f_t, exact.f_t, 4.5, "f_t");
    expect_within(m.f_tau, exact.f_tau, 4.5, "f_tau");
    expect_within(m.f_joint, exact.f_joint, 4.5, "f_joint");
    expect_within(stochastic::mc_cpf_semianalytic(model, t, tau, config(200'000, seed)), cpf_from_moments(exact), 4.5,
                  "cpf");
    for (Outcome yx : kOutcomes) {
      expect_within(stochastic::mc_conditional_coherence(model, t, tau, yx, config(200'000, seed)),
                    analytic::conditional_coherence(model, t, tau, yx), 4.5, "conditional coherence");
    }
  }
}

std::string model_name(const ::testing::TestParamInfo<NoiseModel>& info) {
  static constexpr std::array<const char*, 4> names{"White", "ExpCorrGauss", "StaticGauss", "StaticLorentz"};
  return names[info.param.index()];
}

INSTANTIATE_TEST_SUITE_P(Models, MomentsAgree,
                         ::testing::Values(NoiseModel{White{0.8}}, NoiseModel{ExpCorrGauss{1.0, 0.7}},
                                           NoiseModel{StaticGauss{0.6}}, NoiseModel{StaticLorentz{0.9, 1.3}}),
                         model_name);

TEST(Sampling, EmpiricalTableAndCounts) {
  const NoiseModel model = StaticGauss{1.0};
  const auto counts = stochastic::sample_triples(model, 0.7, 0.4, config(400'000, 9));
  EXPECT_EQ(counts.total(), 400'000u);
  EXPECT_EQ(counts.kept(Outcome::plus()) + counts.kept(Outcome::minus()), 400'000u);
  const auto exact = cpf_probability_table(analytic::moments(model, 0.7, 0.4), Outcome::plus());
  const auto empirical = stochastic::empirical_table(counts, Outcome::plus());
  const double n = static_cast<double>(counts.kept(Outcome::plus()));
  for (std::size_t i = 0; i < 4; ++i) {
    const double p = exact.joint_entries()[i];
    EXPECT_NEAR(empirical.joint_entries()[i], p, 4.5 * std::sqrt(p * (1 - p) / n));
  }
}

TEST(Sampling, CpfAgreesForBothPostselections) {
  const NoiseModel model = ExpCorrGauss{1.5, 2.0};
  const double exact = analytic::cpf(model, 0.6, 0.6);
  for (Outcome y : kOutcomes) expect_within(stochastic::mc_cpf_sampling(model, 0.6, 0.6, y, config(400'000, 5)), exact, 4.5, "cpf");
}

TEST(Sampling, BootstrapErrorTracksSpread) {
  // Spread of independent replicas against the reported bootstrap error.
  const NoiseModel model = StaticGauss{1.0};
  std::vector<double> values;
  double mean_error = 0.0;
  for (std::uint64_t seed = 100; seed < 140; ++seed) {
    const Estimate e = stochastic::mc_cpf_sampling(model, 1.0, 1.0, Outcome::plus(), config(20'000, seed));
    values.push_back(e.value);
    mean_error += e.std_error / 40.0;
  }
  double mean = 0.0, var = 0.0;
  for (double v : values) mean += v / 40.0;
  for (double v : values) var += (v - mean) * (v - mean) / 39.0;
  EXPECT_NEAR(std::sqrt(var) / mean_error, 1.0, 0.35);
}

TEST(Sampling, EmptyPostselection) {
  stochastic::TripleCounts counts;
  counts.at(Outcome::plus(), Outcome::plus(), Outcome::plus()) = 10;
  EXPECT_NO_THROW(stochastic::cpf_from_counts(counts, Outcome::plus(), 1));
  try {
    stochastic::cpf_from_counts(counts, Outcome::minus(), 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::empty_postselection);
  }
  // At t = 0, y always equals x, but y = -1 still occurs half the time.
  EXPECT_NO_THROW(stochastic::mc_cpf_sampling(StaticGauss{1.0}, 0.0, 0.5, Outcome::minus(), config(1000, 2)));
}

TEST(ConditionalCoherence, ZeroProbabilityPostselection) {
  try {
    stochastic::mc_conditional_coherence(StaticGauss{1.0}, 0.0, 1.0, Outcome::minus(), config(1000, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::zero_probability_postselection);
  }
}

TEST(Sampling, SeedsReproduceExactly) {
  const NoiseModel model = StaticLorentz{1.0, 0.0};
  const Estimate a = stochastic::mc_cpf_sampling(model, 1.0, 1.0, Outcome::plus(), config(50'000, 8));
  const Estimate b = stochastic::mc_cpf_sampling(model, 1.0, 1.0, Outcome::plus(), config(50'000, 8));
  const Estimate c = stochastic::mc_cpf_sampling(model, 1.0, 1.0, Outcome::plus(), config(50'000, 9));
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.std_error, b.std_error);
  EXPECT_NE(a.value, c.value);
}

// Exact moments of the trapezoid-discretised phases, from the OU kernel on the grid.
MomentSet discretised_ou_moments(double g, double tau_c, double t, double tau, double dt) {
  const auto n1 = static_cast<std::size_t>(std::ceil(t / dt - 1e-9));
  const auto n2 = static_cast<std::size_t>(std::ceil(tau / dt - 1e-9));
  std::vector<double> s1, w1, s2, w2;
  for (std::size_t i = 0; i <= n1; ++i) {
    s1.push_back(t * i / n1);
    w1.push_back((i == 0 || i == n1 ? 0.5 : 1.0) * t / n1);
  }
  for (std::size_t i = 0; i <= n2; ++i) {
    s2.push_back(t + tau * i / n2);
    w2.push_back((i == 0 || i == n2 ? 0.5 : 1.0) * tau / n2);
  }
  auto cov = [&](const std::vector<double>& sa, const std::vector<double>& wa, const std::vector<double>& sb,
                 const std::vector<double>& wb) {
    double sum = 0.0;
    for (std::size_t i = 0; i < sa.size(); ++i)
      for (std::size_t j = 0; j < sb.size(); ++j) sum += wa[i] * wb[j] * g * g * std::exp(-std::abs(sa[i] - sb[j]) / tau_c);
    return sum;
  };
  const double v1 = cov(s1, w1, s1, w1), v2 = cov(s2, w2, s2, w2), c12 = cov(s1, w1, s2, w2);
  return {std::exp(-2 * v1), std::exp(-2 * v2), std::exp(-2 * (v1 + v2)) * std::cosh(4 * c12)};
}

TEST(OuPath, MatchesDiscretisedMomentsAndBiasIsSmall) {
  const ExpCorrGauss model{1.0, 0.5};
  McConfig cfg = config(200'000, 61);
  cfg.path_dt = 0.01;
  const auto m = stochastic::ou_path_reference(model, 0.6, 0.8, cfg);
  const MomentSet disc = discretised_ou_moments(1.0, 0.5, 0.6, 0.8, 0.01);
  expect_within(m.f_t, disc.f_t, 4.5, "f_t");
  expect_within(m.f_tau, disc.f_tau, 4.5, "f_tau");
  expect_within(m.f_joint, disc.f_joint, 4.5, "f_joint");
  const MomentSet exact = analytic::moments(model, 0.6, 0.8);
  EXPECT_NEAR(disc.f_t, exact.f_t, 1e-4);
  EXPECT_NEAR(disc.f_joint, exact.f_joint, 1e-4);
  // And therefore with the exact bivariate sampler, at 3 sigma plus the bias.
  const auto exact_mc = stochastic::mc_moments(model, 0.6, 0.8, config(200'000, 62));
  const double bias = std::abs(disc.f_joint - exact.f_joint);
  EXPECT_LE(std::abs(m.f_joint.value - exact_mc.f_joint.value),
            3.0 * std::hypot(m.f_joint.std_error, exact_mc.f_joint.std_error) + bias);
}

TEST(OuPath, DefaultStepAndCoarseStepError) {
  const ExpCorrGauss model{2.0, 0.5};
  McConfig cfg = config(10, 1);
  EXPECT_DOUBLE_EQ(stochastic::effective_path_dt(model, cfg), 0.5 / 50.0);
  cfg.path_dt = 0.2;
  try {
    stochastic::ou_path_reference(model, 1.0, 1.0, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::step_too_coarse);
  }
}

TEST(StaticModels, CpfIsUnchangedUnderTimeSwap) {
  // Static frequencies give a symmetric joint moment.
  for (const NoiseModel& m : {NoiseModel{StaticGauss{0.7}}, NoiseModel{StaticLorentz{0.4, 1.0}}})
    EXPECT_NEAR(analytic::cpf(m, 0.4, 1.9), analytic::cpf(m, 1.9, 0.4), 1e-15);
}
