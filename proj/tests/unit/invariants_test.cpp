#include "fnls/invariants.hpp"

#include <gtest/gtest.h>

#include <random>

#include "fnls/schemes.hpp"
#include "oracles.hpp"

using namespace fnls;

TEST(CompensatedSum, RecoversCancelledTerms) {
  CompensatedSum s;
  s.add(1.0);
  s.add(1e100);
  s.add(1.0);
  s.add(-1e100);
  EXPECT_EQ(s.value(), 2.0);
}

TEST(Mass, ConstantField) {
  const Grid g(20.0, 11);
  const StateVector u(11, Complex(0.0, 2.0));
  EXPECT_DOUBLE_EQ(discrete_mass(u, g), 20.0 * 4.0);
}

TEST(Mass, ZeroAndNonNegative) {
  const Grid g(20.0, 31);
  EXPECT_EQ(discrete_mass(StateVector(31), g), 0.0);
  std::mt19937_64 rng(1);
  EXPECT_GT(discrete_mass(StateVector(oracle::random_vector(rng, 31)), g), 0.0);
}

TEST(Mass, SechProfileMatchesIntegral) {
  // Integral of |2 sech(sqrt2 (x-10))|^2 over R is 4 * 2 / sqrt2; the tails beyond [0, 20) are ~1e-11.
  const Grid g(20.0, 101);
  const auto u = ModulatedSech{}.sample(g);
  EXPECT_NEAR(discrete_mass(u, g), 8.0 / std::sqrt(2.0), 1e-9);
}

TEST(Energy, MatchesDirectSummation) {
  std::mt19937_64 rng(2);
  for (double alpha : {2.0, 1.6, 1.2}) {
    const Grid g(20.0, 15);
    const auto u = oracle::random_vector(rng, 15);
    const auto v = oracle::random_vector(rng, 15);
    const double expected = oracle::energy_two_step(u, v, 20.0, alpha);
    EXPECT_NEAR(discrete_energy_two_step(StateVector(u), StateVector(v), g, alpha), expected,
                1e-12 * std::abs(expected))
        << alpha;
    const double single = oracle::energy_two_step(u, u, 20.0, alpha);
    EXPECT_NEAR(discrete_energy_single(StateVector(u), g, alpha), single, 1e-12 * std::abs(single));
  }
}

TEST(Energy, SymmetricInArguments) {
  std::mt19937_64 rng(3);
  const Grid g(20.0, 31);
  const StateVector u(oracle::random_vector(rng, 31));
  const StateVector v(oracle::random_vector(rng, 31));
  EXPECT_DOUBLE_EQ(discrete_energy_two_step(u, v, g, 1.6), discrete_energy_two_step(v, u, g, 1.6));
}

TEST(Energy, ZeroFieldAndConstantField) {
  const Grid g(20.0, 21);
  EXPECT_EQ(discrete_energy_single(StateVector(21), g, 1.6), 0.0);
  // Constants are in the kernel of the fractional part, leaving dx * sum |c|^4 / 2.
  const StateVector c(21, Complex(1.0, 1.0));
  EXPECT_NEAR(discrete_energy_single(c, g, 1.6), 20.0 * 4.0 / 2.0, 1e-12);
}

TEST(Energy, SechRegressionValue) {
  // Reference value for the default soliton at L=20, N=101, alpha=1.6, from the dense oracle.
  const Grid g(20.0, 101);
  const auto u = ModulatedSech{}.sample(g);
  const double expected = oracle::energy_two_step(u.values(), u.values(), 20.0, 1.6);
  EXPECT_NEAR(discrete_energy_single(u, g, 1.6), expected, 1e-11);
  EXPECT_NEAR(expected, 2.931737554500588, 1e-9);
}

TEST(Energy, RhoOneEqualsTwoStep) {
  std::mt19937_64 rng(4);
  const Grid g(20.0, 15);
  const StateVector u(oracle::random_vector(rng, 15));
  const StateVector v(oracle::random_vector(rng, 15));
  const std::vector<StateVector> hist{u, v};
  EXPECT_NEAR(discrete_energy_rho(hist, g, 1.6, 1), discrete_energy_two_step(u, v, g, 1.6), 1e-12);
}

TEST(Energy, RhoLevelsMatchDirectSummation) {
  std::mt19937_64 rng(5);
  const Grid g(20.0, 15);
  std::vector<std::vector<Complex>> raw;
  std::vector<StateVector> hist;
  for (int j = 0; j < 3; ++j) {
    raw.push_back(oracle::random_vector(rng, 15));
    hist.emplace_back(raw.back());
  }
  const double expected = oracle::energy_rho(raw, 20.0, 1.4);
  EXPECT_NEAR(discrete_energy_rho(hist, g, 1.4, 2), expected, 1e-12 * std::abs(expected));
}

TEST(Energy, RejectsBadInputs) {
  const Grid g(20.0, 15);
  const StateVector u(15);
  EXPECT_THROW(discrete_energy_single(u, g, 1.0), DomainError);
  EXPECT_THROW(discrete_energy_single(u, g, 2.5), DomainError);
  EXPECT_THROW(discrete_energy_single(StateVector(13), g, 1.6), DimensionError);
  EXPECT_THROW(discrete_mass(StateVector(13), g), DimensionError);
  const std::vector<StateVector> two{u, u};
  EXPECT_THROW(discrete_energy_rho(two, g, 1.6, 2), DimensionError);
  EXPECT_THROW(discrete_energy_rho(two, g, 1.6, 0), DomainError);
}

TEST(LevyIndex, Range) {
  EXPECT_NO_THROW(require_levy_index(2.0));
  EXPECT_NO_THROW(require_levy_index(1.0001));
  EXPECT_THROW(require_levy_index(1.0), DomainError);
  EXPECT_THROW(require_levy_index(2.0001), DomainError);
}

TEST(EnergyFunctional, AgreesWithFreeFunctions) {
  std::mt19937_64 rng(6);
  const Grid g(20.0, 31);
  const EnergyFunctional e(g, 1.2);
  const StateVector u(oracle::random_vector(rng, 31));
  const StateVector v(oracle::random_vector(rng, 31));
  EXPECT_EQ(e.mass(u), discrete_mass(u, g));
  EXPECT_EQ(e.two_step(u, v), discrete_energy_two_step(u, v, g, 1.2));
  EXPECT_EQ(e.single(u), discrete_energy_single(u, g, 1.2));
}
