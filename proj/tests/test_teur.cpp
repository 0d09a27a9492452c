#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace qtec;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::ParseError;
}

PureState plus() { return PureState::normalized({1.0, 1.0}); }

}  // namespace

TEST(CostEnergyProduct, Examples) {
  EXPECT_DOUBLE_EQ(cost_energy_product(0.7, -0.7, 1.0), 0.7);
  EXPECT_NEAR(cost_energy_product(kPi / 2.0, -kPi / 2.0, 1.0), kPi / 2.0, 1e-15);
  EXPECT_EQ(cost_energy_product(1.0, 1.0, 3.0, 2.0), 0.0);
  EXPECT_DOUBLE_EQ(cost_energy_product(3.0, 1.0, 2.0, 4.0), 0.5);
}

TEST(CostEnergyProduct, MatchesBitFlipChannelCost) {
  const ComplexMatrix u = oracle::evolution(pauli::x(), kPi / 2.0);
  EXPECT_NEAR(cost_energy_product(kPi / 2.0, -kPi / 2.0, 1.0), channel_cost(unitary_channel(u)).angle, 1e-8);
}

TEST(CostEnergyProduct, Errors) {
  EXPECT_EQ(kind_of([] { cost_energy_product(0.0, 1.0, 1.0); }), ErrorKind::BadInterval);
  EXPECT_EQ(kind_of([] { cost_energy_product(1.0, 0.0, -1.0); }), ErrorKind::NonPositiveTime);
}

TEST(FastestStateTime, Examples) {
  EXPECT_EQ(fastest_state_time(1.0, 2.0, -1.0), 0.0);
  EXPECT_NEAR(fastest_state_time(0.0, 2.0, -1.0), kPi / 3.0, 1e-15);
  EXPECT_NEAR(fastest_state_time(std::cos(kPi / 4.0), kPi / 4.0, -kPi / 4.0), 1.0, 1e-12);
  EXPECT_NEAR(fastest_state_time(0.0, 1.0, 0.0, 2.0), orthogonalization_time(1.0, 0.0, 2.0), 1e-15);
}

TEST(FastestStateTime, EqualSuperpositionReachesFidelity) {
  // (|e_min> + |e_max>)/sqrt 2 has |<psi|psi(t)>| = |cos((e_max - e_min) t / 2 hbar)|.
  for (double f : {0.1, 0.5, 0.9}) {
    const double t = fastest_state_time(f, 1.5, -0.5, 1.3);
    EXPECT_NEAR(std::abs(std::cos(2.0 * t / (2.0 * 1.3))), f, 1e-12);
  }
}

TEST(FastestStateTime, Errors) {
  EXPECT_EQ(kind_of([] { fastest_state_time(1.2, 1.0, 0.0); }), ErrorKind::FOutOfRange);
  EXPECT_EQ(kind_of([] { fastest_state_time(-0.1, 1.0, 0.0); }), ErrorKind::FOutOfRange);
  EXPECT_EQ(kind_of([] { fastest_state_time(0.5, 1.0, 1.0); }), ErrorKind::BadInterval);
}

TEST(OrthogonalizationTime, Examples) {
  EXPECT_NEAR(orthogonalization_time(kPi, 0.0), 1.0, 1e-15);
  for (double eps : {0.5, 1.0, 3.0}) EXPECT_NEAR(orthogonalization_time(eps, -eps), kPi / (2.0 * eps), 1e-15);
  EXPECT_EQ(kind_of([] { orthogonalization_time(0.0, 0.0); }), ErrorKind::BadInterval);
}

TEST(ChauComparison, ReferenceValues) {
  const ChauComparison c = chau_comparison(1.0);
  EXPECT_NEAR(c.chau_time, 1.380049, 1e-5);
  EXPECT_NEAR(c.fastest_time, 1.570796, 1e-5);
  EXPECT_TRUE(c.fastest_exceeds_chau);
  EXPECT_GT(c.fastest_time, c.chau_time);
}

TEST(ChauComparison, RatioAndScaling) {
  for (double eps : {0.25, 1.0, 7.0}) {
    const ChauComparison c = chau_comparison(eps, 1.7);
    EXPECT_NEAR(c.fastest_time / c.chau_time, kPi * kChauConstant / 2.0, 1e-12);
    EXPECT_TRUE(c.fastest_exceeds_chau);
  }
  const ChauComparison one = chau_comparison(1.0), two = chau_comparison(2.0);
  EXPECT_NEAR(two.chau_time, one.chau_time / 2.0, 1e-15);
  EXPECT_NEAR(two.fastest_time, one.fastest_time / 2.0, 1e-15);
  EXPECT_EQ(kind_of([] { chau_comparison(0.0); }), ErrorKind::BadInterval);
}

TEST(EnergySpread, Examples) {
  const DensityMatrix zero = DensityMatrix::pure(PureState::basis(2, 0));
  EXPECT_NEAR(energy_spread(pauli::z(), zero), 0.0, 1e-15);
  EXPECT_NEAR(energy_spread(pauli::z() * complex{0.8}, DensityMatrix::pure(plus())), 0.8, 1e-15);
  EXPECT_NEAR(energy_spread(ComplexMatrix::identity(3), random_density(3, 2, 4)), 0.0, 1e-7);
  EXPECT_EQ(kind_of([] { energy_spread(ComplexMatrix{{0.0, 1.0}, {0.0, 0.0}}, DensityMatrix::maximally_mixed(2)); }),
            ErrorKind::NotHermitian);
}

TEST(EnergySpread, MatchesEigenVariance) {
  Rng rng(12);
  for (int i = 0; i < 50; ++i) {
    const ComplexMatrix h = oracle::random_hermitian(3, rng);
    const DensityMatrix rho = random_density(3, 1 + i % 3, rng);
    const Eigen::MatrixXcd eh = oracle::to_eigen(h), er = oracle::to_eigen(rho.matrix());
    const double mean = (eh * er).trace().real();
    const double second = (eh * eh * er).trace().real();
    EXPECT_NEAR(energy_spread(h, rho), std::sqrt(std::max(0.0, second - mean * mean)), 1e-10);
  }
}

TEST(TeurBoundCheck, EigenstateIsStationary) {
  const TeurReport r = teur_bound_check(pauli::z(), PureState::basis(2, 1), 2.0);
  EXPECT_NEAR(r.fidelity, 1.0, 1e-15);
  EXPECT_NEAR(r.delta_e, 0.0, 1e-15);
  EXPECT_TRUE(r.bound_satisfied);
}

TEST(TeurBoundCheck, EqualSuperpositionSaturates) {
  for (double eps : {0.5, 1.0, 2.0}) {
    for (double hbar : {1.0, 0.3}) {
      const double t = kPi * hbar / (2.0 * eps);
      const TeurReport r = teur_bound_check(pauli::z() * complex{eps}, plus(), t, hbar);
      EXPECT_NEAR(r.fidelity, 0.0, 1e-9);
      EXPECT_NEAR(r.lhs, kPi * hbar / 2.0, 1e-12);
      EXPECT_NEAR(r.lhs, r.rhs, 1e-9);
      EXPECT_TRUE(r.bound_satisfied);
      EXPECT_EQ(r.cost, (r.e_max - r.e_min) * r.time / (2.0 * r.hbar));
    }
  }
}

TEST(TeurBoundCheck, HoldsForRandomEvolutions) {
  Rng rng(99);
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 2 + i % 3;
    const ComplexMatrix h = oracle::random_hermitian(n, rng);
    const PureState psi = random_pure_state(n, rng);
    const double t = 0.05 + 3.0 * rng.uniform();
    const TeurReport r = teur_bound_check(h, psi, t);
    EXPECT_TRUE(r.bound_satisfied) << "trial " << i;
    // fidelity against an independent propagator
    const ComplexVector evolved = oracle::evolution(h, t) * psi.amplitudes();
    EXPECT_NEAR(r.fidelity, std::min(1.0, std::abs(inner(psi.amplitudes(), evolved))), 1e-10);
  }
}

TEST(TeurBoundCheck, Errors) {
  EXPECT_EQ(kind_of([] { teur_bound_check(pauli::z(), PureState::basis(2, 0), 0.0); }), ErrorKind::NonPositiveTime);
  EXPECT_EQ(kind_of([] { teur_bound_check(ComplexMatrix{{0.0, 1.0}, {0.0, 0.0}}, PureState::basis(2, 0), 1.0); }),
            ErrorKind::NotHermitian);
}

TEST(BuresAngle, Examples) {
  const PureState a = random_pure_state(3, 1);
  EXPECT_NEAR(bures_angle(a, a), 0.0, 1e-7);
  EXPECT_NEAR(bures_angle(PureState::basis(2, 0), PureState::basis(2, 1)), kPi / 2.0, 1e-15);
  EXPECT_NEAR(bures_angle(PureState::basis(2, 0), plus()), kPi / 4.0, 1e-15);
  EXPECT_EQ(kind_of([] { bures_angle(PureState::basis(2, 0), PureState::basis(3, 0)); }),
            ErrorKind::DimensionMismatch);
}
