#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "cpf/core.hpp"
#include "cpf/error.hpp"

using namespace cpf;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no cpf::Error thrown";
  return ErrorCode::invalid_argument;
}

}  // namespace

TEST(Outcome, AcceptsOnlyPlusMinusOne) {
  EXPECT_EQ(Outcome(1), Outcome::plus());
  EXPECT_EQ(Outcome(-1), Outcome::minus());
  EXPECT_EQ(code_of([] { Outcome(0); }), ErrorCode::invalid_argument);
  EXPECT_EQ(code_of([] { Outcome(2); }), ErrorCode::invalid_argument);
  EXPECT_EQ(-Outcome::plus(), Outcome::minus());
  EXPECT_EQ(Outcome::minus() * Outcome::minus(), Outcome::plus());
}

TEST(TimePair, RejectsNegativeAndNonFinite) {
  EXPECT_NO_THROW(TimePair::make(0.0, 0.0));
  EXPECT_EQ(code_of([] { TimePair::make(-1e-9, 1.0); }), ErrorCode::invalid_argument);
  EXPECT_EQ(code_of([] { TimePair::make(1.0, std::numeric_limits<double>::quiet_NaN()); }), ErrorCode::invalid_argument);
  EXPECT_EQ(code_of([] { TimePair::make(std::numeric_limits<double>::infinity(), 1.0); }), ErrorCode::invalid_argument);
}

TEST(MomentSet, ValidationBounds) {
  EXPECT_NO_THROW((MomentSet{1.0, -1.0, 1.0 + 1e-13}.validate()));
  EXPECT_EQ(code_of([] { MomentSet{1.1, 0.0, 0.0}.validate(); }), ErrorCode::invalid_moment_set);
  EXPECT_EQ(code_of([] { MomentSet{0.0, std::nan(""), 0.0}.validate(); }), ErrorCode::invalid_moment_set);
}

TEST(ProbabilityTable, EntriesFromMoments) {
  const MomentSet m{0.3, -0.2, 0.1};
  const auto table = cpf_probability_table(m, Outcome::plus());
  EXPECT_DOUBLE_EQ(table.joint(Outcome::plus(), Outcome::plus()), 0.25 * (1 + 0.3 - 0.2 + 0.1));
  EXPECT_DOUBLE_EQ(table.joint(Outcome::minus(), Outcome::plus()), 0.25 * (1 + 0.3 + 0.2 - 0.1));
  EXPECT_DOUBLE_EQ(table.marginal_x(Outcome::minus()), 0.5 * (1 - 0.3));
  EXPECT_DOUBLE_EQ(table.marginal_z(Outcome::plus()), 0.5 * (1 - 0.2));
  EXPECT_NEAR(cpf_from_table(table), cpf_from_moments(m), 1e-15);
  EXPECT_NEAR(cpf_from_moments(m), 0.1 + 0.06, 1e-15);
}

TEST(ProbabilityTable, CpfFromTableMatchesMomentsOnRandomSets) {
  for (int i = 0; i < 200; ++i) {
    // Moments of a mixture of two phase pairs, so every table is realisable.
    const double a1 = 0.37 * i, a2 = 1.1 * i + 0.2, w = (i % 7) / 6.0;
    const double b1 = 0.71 * i + 0.4, b2 = 0.13 * i;
    const MomentSet m{w * std::cos(a1) + (1 - w) * std::cos(a2), w * std::cos(b1) + (1 - w) * std::cos(b2),
                      w * std::cos(a1) * std::cos(b1) + (1 - w) * std::cos(a2) * std::cos(b2)};
    for (Outcome y : kOutcomes) {
      const auto table = cpf_probability_table(m, y);
      double sum = 0.0;
      for (double p : table.joint_entries()) {
        EXPECT_GE(p, -1e-15);
        sum += p;
      }
      EXPECT_NEAR(sum, 1.0, 1e-14);
      EXPECT_NEAR(cpf_from_table(table), cpf_from_moments(m), 1e-14);
    }
  }
}

TEST(ProbabilityTable, FromJointRejectsInvalidEntries) {
  EXPECT_EQ(code_of([] { CpfProbabilityTable::from_joint(Outcome::plus(), {0.5, 0.5, 0.5, -0.5}); }),
            ErrorCode::invalid_moment_set);
  EXPECT_EQ(code_of([] { CpfProbabilityTable::from_joint(Outcome::plus(), {0.25, 0.25, 0.25, 0.2}); }),
            ErrorCode::invalid_moment_set);
  EXPECT_NO_THROW(CpfProbabilityTable::from_joint(Outcome::minus(), {1.0, 0.0, 0.0, 0.0}));
}

TEST(ProbabilityTable, UnrealisableMomentsAreRejected) {
  // 1 + xy f_t + zy f_tau + zx f_joint < 0 for (z, x) = (+, -).
  EXPECT_EQ(code_of([] { cpf_probability_table(MomentSet{-1.0, -1.0, -1.0}, Outcome::plus()); }),
            ErrorCode::invalid_moment_set);
}

TEST(ProbabilityTable, IndexOrder) {
  EXPECT_EQ(CpfProbabilityTable::index(Outcome::plus(), Outcome::plus()), 0u);
  EXPECT_EQ(CpfProbabilityTable::index(Outcome::plus(), Outcome::minus()), 1u);
  EXPECT_EQ(CpfProbabilityTable::index(Outcome::minus(), Outcome::plus()), 2u);
  EXPECT_EQ(CpfProbabilityTable::index(Outcome::minus(), Outcome::minus()), 3u);
}

TEST(CpfSurface, Validate) {
  CpfSurface s{{0.0, 1.0}, {0.0, 1.0, 2.0}, std::vector<double>(6, 0.0), {}, "white(gamma_w=1)", Method::analytic};
  EXPECT_NO_THROW(s.validate());
  EXPECT_DOUBLE_EQ(s.at(1, 2), 0.0);
  s.values.pop_back();
  EXPECT_THROW(s.validate(), Error);
}

TEST(ErrorText, CarriesCodeName) {
  try {
    fail(ErrorCode::zero_probability_postselection, "detail");
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "zero-probability postselection: detail");
  }
  EXPECT_STREQ(to_string(ErrorCode::bath_too_large), "bath too large");
  EXPECT_STREQ(to_string(ErrorCode::empty_postselection), "empty postselection");
  EXPECT_STREQ(to_string(Method::sampling), "sampling");
}
