#include <gtest/gtest.h>
#include <omp.h>

#include <cmath>
#include <random>

#include "cpf/error.hpp"
#include "cpf/mc.hpp"
#include "cpf/spinbath.hpp"
#include "cpf/stochastic.hpp"

using namespace cpf;

TEST(MomentAccumulator, MatchesTwoPassStatistics) {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> normal;
  std::vector<std::array<double, 2>> data(1000);
  for (auto& v : data) {
    v[0] = 3.0 + normal(gen);
    v[1] = 0.5 * v[0] + normal(gen);
  }
  MomentAccumulator<2> left, right, all;
  for (std::size_t i = 0; i < data.size(); ++i) {
    all.push(data[i]);
    (i < 377 ? left : right).push(data[i]);
  }
  left.merge(right);
  double m0 = 0, m1 = 0;
  for (const auto& v : data) m0 += v[0], m1 += v[1];
  m0 /= data.size(), m1 /= data.size();
  double c01 = 0;
  for (const auto& v : data) c01 += (v[0] - m0) * (v[1] - m1);
  c01 /= data.size() - 1;
  for (const auto* acc : {&left, &all}) {
    EXPECT_NEAR(acc->mean[0], m0, 1e-12);
    EXPECT_NEAR(acc->mean[1], m1, 1e-12);
    EXPECT_NEAR(acc->covariance(0, 1), c01, 1e-12);
  }
  EXPECT_NEAR(all.estimate_mean(0).std_error, std::sqrt(all.covariance(0, 0) / 1000.0), 1e-15);
}

TEST(MomentAccumulator, TinySamples) {
  MomentAccumulator<1> acc;
  acc.merge(MomentAccumulator<1>{});
  EXPECT_EQ(acc.count, 0u);
  acc.push({2.0});
  EXPECT_TRUE(std::isinf(acc.estimate_mean(0).std_error));
}

TEST(McConfig, Validation) {
  McConfig cfg;
  cfg.n_trajectories = 0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg.n_trajectories = 10;
  cfg.chunk_size = 0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg.chunk_size = 3;
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_EQ(cfg.n_chunks(), 4u);
}

class WorkerCount : public ::testing::TestWithParam<int> {
 protected:
  void SetUp() override { saved_ = omp_get_max_threads(); }
  void TearDown() override { omp_set_num_threads(saved_); }
  int saved_ = 1;
};

TEST_P(WorkerCount, ParallelReductionIsBitIdenticalToSerial) {
  McConfig cfg;
  cfg.n_trajectories = 50'003;  // ragged last chunk
  cfg.chunk_size = 997;
  cfg.seed = 77;
  const NoiseModel model = ExpCorrGauss{1.0, 0.5};

  cfg.execution = Execution::serial;
  const auto m_serial = stochastic::mc_moments(model, 0.8, 1.1, cfg);
  const auto counts_serial = stochastic::sample_triples(model, 0.8, 1.1, cfg);
  const Estimate sampled_serial = stochastic::mc_cpf_sampling(model, 0.8, 1.1, Outcome::minus(), cfg);
  LorentzCouplingSpec lorentz;
  lorentz.gamma = 1.0;
  lorentz.n_spins = 7;
  const auto ens_serial = spinbath::lorentz_ensemble(lorentz, 0.6, 0.9, cfg);

  omp_set_num_threads(GetParam());
  cfg.execution = Execution::parallel;
  const auto m_par = stochastic::mc_moments(model, 0.8, 1.1, cfg);
  EXPECT_EQ(m_par.f_t.value, m_serial.f_t.value);
  EXPECT_EQ(m_par.f_joint.value, m_serial.f_joint.value);
  EXPECT_EQ(m_par.f_joint.std_error, m_serial.f_joint.std_error);
  EXPECT_EQ(stochastic::sample_triples(model, 0.8, 1.1, cfg).counts, counts_serial.counts);
  const Estimate sampled_par = stochastic::mc_cpf_sampling(model, 0.8, 1.1, Outcome::minus(), cfg);
  EXPECT_EQ(sampled_par.value, sampled_serial.value);
  EXPECT_EQ(sampled_par.std_error, sampled_serial.std_error);
  const auto ens_par = spinbath::lorentz_ensemble(lorentz, 0.6, 0.9, cfg);
  EXPECT_EQ(ens_par.cpf.value, ens_serial.cpf.value);
  EXPECT_EQ(ens_par.cpf.std_error, ens_serial.cpf.std_error);
}

INSTANTIATE_TEST_SUITE_P(Threads, WorkerCount, ::testing::Values(1, 2, 3, 4, 8));

TEST(McScaling, StandardErrorFallsAsInverseRootN) {
  const NoiseModel model = StaticGauss{0.8};
  std::vector<double> errors;
  for (std::uint64_t n : {10'000ull, 40'000ull, 160'000ull}) {
    McConfig cfg;
    cfg.n_trajectories = n;
    cfg.seed = 3;
    errors.push_back(stochastic::mc_cpf_semianalytic(model, 1.0, 1.0, cfg).std_error);
  }
  EXPECT_NEAR(errors[0] / errors[1], 2.0, 0.1);
  EXPECT_NEAR(errors[1] / errors[2], 2.0, 0.1);
}
