#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace qtec;

namespace {

ComplexMatrix xrot(double omega) {
  return ComplexMatrix::identity(2) * complex{std::cos(omega)} + pauli::x() * complex{0.0, -std::sin(omega)};
}

void expect_angles(const AngleList& got, std::vector<double> want, double tol) {
  std::sort(want.begin(), want.end());
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(got[i], want[i], tol) << "index " << i;
}

}  // namespace

TEST(ComplexMatrix, RejectsNonFiniteEntries) {
  ComplexMatrix m(2, 2);
  EXPECT_THROW((ComplexMatrix{{1.0, std::nan("")}, {0.0, 1.0}}), Error);
  EXPECT_EQ(m.rows(), 2u);
}

TEST(ComplexMatrix, ProductMatchesEigen) {
  Rng rng(11);
  const ComplexMatrix a = gaussian_matrix(3, 4, rng), b = gaussian_matrix(4, 2, rng);
  const Eigen::MatrixXcd ref = oracle::to_eigen(a) * oracle::to_eigen(b);
  const ComplexMatrix c = a * b;
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t k = 0; k < 2; ++k) EXPECT_LT(std::abs(c(r, k) - ref(r, k)), 1e-12);
}

TEST(HermitianEigen, Identity) {
  const auto e = hermitian_eigen(ComplexMatrix::identity(3));
  for (double v : e.values) EXPECT_NEAR(v, 1.0, 1e-14);
}

TEST(HermitianEigen, DiagonalSortedAscending) {
  const auto e = hermitian_eigen(ComplexMatrix{{2.0, 0.0}, {0.0, -1.0}});
  EXPECT_NEAR(e.values[0], -1.0, 1e-14);
  EXPECT_NEAR(e.values[1], 2.0, 1e-14);
}

TEST(HermitianEigen, PauliX) {
  const auto e = hermitian_eigen(pauli::x());
  EXPECT_NEAR(e.values[0], -1.0, 1e-14);
  EXPECT_NEAR(e.values[1], 1.0, 1e-14);
}

TEST(HermitianEigen, RejectsNonHermitian) {
  try {
    hermitian_eigen(ComplexMatrix{{0.0, 1.0}, {0.0, 0.0}});
    FAIL() << "expected NotHermitian";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotHermitian);
  }
}

TEST(HermitianEigen, MatchesEigenOracleAndReconstructs) {
  Rng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 7;
    const ComplexMatrix a = oracle::random_hermitian(n, rng);
    const auto e = hermitian_eigen(a);
    const auto ref = oracle::eigenvalues(a);
    const double scale = max_abs(a);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(e.values[i], ref[i], 1e-10 * scale);
    EXPECT_TRUE(std::is_sorted(e.values.begin(), e.values.end()));

    // V diag(lambda) V^dagger
    std::vector<complex> lam(e.values.begin(), e.values.end());
    const ComplexMatrix rec = e.vectors * ComplexMatrix::diagonal(lam) * e.vectors.adjoint();
    EXPECT_LE(max_abs_diff(rec, a), 1e-9 * scale);
    EXPECT_LE(max_abs_diff(e.vectors.adjoint() * e.vectors, ComplexMatrix::identity(n)), 1e-10 * n);
    for (std::size_t i = 0; i < n; ++i) {
      const ComplexVector v = e.vectors.column(i);
      const ComplexVector av = a * v;
      for (std::size_t r = 0; r < n; ++r) EXPECT_LE(std::abs(av[r] - e.values[i] * v[r]), 1e-9 * scale);
    }
  }
}

TEST(HermitianEigen, DeterministicForFixedInput) {
  Rng rng(5);
  const ComplexMatrix a = oracle::random_hermitian(5, rng);
  const auto e1 = hermitian_eigen(a), e2 = hermitian_eigen(a);
  EXPECT_EQ(e1.values, e2.values);
  EXPECT_TRUE(e1.vectors == e2.vectors);
}

TEST(MinEigenpair, Diagonal) {
  const auto [lam, psi] = min_eigenpair(ComplexMatrix{{0.3, 0.0}, {0.0, 0.7}});
  EXPECT_NEAR(lam, 0.3, 1e-14);
  EXPECT_NEAR(std::abs(psi[0]), 1.0, 1e-12);
}

TEST(MinEigenpair, PauliZ) {
  const auto [lam, psi] = min_eigenpair(pauli::z());
  EXPECT_NEAR(lam, -1.0, 1e-14);
  EXPECT_NEAR(std::abs(psi[1]), 1.0, 1e-12);
}

TEST(MinEigenpair, PauliXPlusZ) {
  ComplexMatrix a = pauli::x() + pauli::z();
  a *= 1.0 / std::sqrt(2.0);
  const auto [lam, psi] = min_eigenpair(a);
  EXPECT_NEAR(lam, -1.0, 1e-13);
  const ComplexVector av = a * psi.amplitudes();
  for (std::size_t r = 0; r < 2; ++r) EXPECT_LE(std::abs(av[r] + psi[r]), 1e-9);
}

TEST(MinEigenpair, AgreesWithFullDecomposition) {
  Rng rng(77);
  for (int t = 0; t < 100; ++t) {
    const ComplexMatrix a = oracle::random_hermitian(2 + t % 5, rng);
    const auto e = hermitian_eigen(a);
    const auto [lam, psi] = min_eigenpair(a);
    EXPECT_EQ(lam, e.values.front());
    EXPECT_NEAR(std::abs(inner(psi.amplitudes(), e.vectors.column(0))), 1.0, 1e-12);
  }
}

TEST(UnitaryEigenangles, Identity) { expect_angles(unitary_eigenangles(ComplexMatrix::identity(2)), {0.0, 0.0}, 1e-14); }

TEST(UnitaryEigenangles, DiagonalPhase) {
  const ComplexMatrix u{{1.0, 0.0}, {0.0, std::polar(1.0, -kPi / 2.0)}};
  expect_angles(unitary_eigenangles(u), {0.0, kPi / 2.0}, 1e-12);
}

TEST(UnitaryEigenangles, BitFlip) { expect_angles(unitary_eigenangles(xrot(kPi / 2.0)), {-kPi / 2.0, kPi / 2.0}, 1e-12); }

TEST(UnitaryEigenangles, MinusIdentityMapsToPi) {
  const AngleList a = unitary_eigenangles(ComplexMatrix::identity(2) * complex{-1.0});
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a[0], kPi);
  EXPECT_EQ(a[1], kPi);
}

TEST(UnitaryEigenangles, RejectsNonUnitary) {
  try {
    unitary_eigenangles(ComplexMatrix{{1.0, 0.0}, {0.0, 2.0}});
    FAIL() << "expected NotUnitary";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotUnitary);
  }
}

TEST(UnitaryEigenangles, ScalarGridIncludingPi) {
  for (int k = -11; k <= 12; ++k) {
    const double theta = kPi * k / 12.0;
    const ComplexMatrix u = ComplexMatrix::identity(3) * std::polar(1.0, -theta);
    const double want = (k == -12) ? kPi : theta;
    for (double a : unitary_eigenangles(u)) EXPECT_NEAR(a, want, 1e-12) << "theta " << theta;
  }
}

TEST(UnitaryEigenangles, MatchesEigenOracle) {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const ComplexMatrix u = random_unitary(2 + s % 5, s);
    const auto got = unitary_eigenangles(u);
    const auto ref = oracle::unitary_angles(u);
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], ref[i], 1e-9);
  }
}

TEST(UnitaryEigenangles, ConjugationInvariant) {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const std::size_t n = 2 + s % 4;
    const ComplexMatrix u = random_unitary(n, 1000 + s), v = random_unitary(n, 5000 + s);
    const auto a = unitary_eigenangles(u), b = unitary_eigenangles(v * u * v.adjoint());
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(a[i], b[i], 1e-9);
  }
}

TEST(UnitaryEigenangles, DegenerateSpectrumResolved) {
  // Eigenvalues e^{-i 0.4} (twice) and e^{+i 0.4}: Re parts all coincide.
  const ComplexMatrix v = random_unitary(3, 99);
  const std::vector<complex> d = {std::polar(1.0, -0.4), std::polar(1.0, -0.4), std::polar(1.0, 0.4)};
  const ComplexMatrix u = v * ComplexMatrix::diagonal(d) * v.adjoint();
  expect_angles(unitary_eigenangles(u), {-0.4, 0.4, 0.4}, 1e-9);
}

TEST(Validate, Density) {
  ComplexMatrix half = ComplexMatrix::identity(2);
  half *= 0.5;
  EXPECT_TRUE(validate_density(half));
  EXPECT_FALSE(validate_psd(ComplexMatrix{{1.5, 0.0}, {0.0, -0.5}}));
  EXPECT_TRUE(validate_density(ComplexMatrix{{1.0, 0.0}, {0.0, 0.0}}));
  EXPECT_FALSE(validate_density(ComplexMatrix::identity(2)));  // trace 2
}

TEST(Validate, UnitaryReportsDeviation) {
  const Check c = validate_unitary(ComplexMatrix{{1.0, 0.0}, {0.0, 1.1}});
  EXPECT_FALSE(c);
  EXPECT_NEAR(c.deviation, 0.21, 1e-12);
}

TEST(Random, UnitaryPassesValidation) {
  for (std::uint64_t s = 0; s < 20; ++s) EXPECT_TRUE(validate_unitary(random_unitary(4, s), 1e-10));
}

TEST(Random, DensityRankBound) {
  const DensityMatrix rho = random_density(3, 2, 42);
  const auto ev = oracle::eigenvalues(rho.matrix());
  EXPECT_LE(std::abs(ev[0]), 1e-12);
  EXPECT_TRUE(validate_density(rho.matrix(), 1e-10));
}

TEST(Random, SeedDeterminism) {
  EXPECT_TRUE(random_unitary(4, 7) == random_unitary(4, 7));
  EXPECT_FALSE(random_unitary(4, 7) == random_unitary(4, 8));
  const PureState a = random_pure_state(5, 3), b = random_pure_state(5, 3);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(a[i], b[i]);
  EXPECT_TRUE(random_density(3, 2, 9).matrix() == random_density(3, 2, 9).matrix());
}

TEST(Random, StreamsDiffer) {
  Rng a(1, 0), b(1, 1), c(1, 0);
  const double x = a.normal(), y = b.normal(), z = c.normal();
  EXPECT_NE(x, y);
  EXPECT_EQ(x, z);
}

TEST(Random, HaarFirstMomentVanishes) {
  // E[U] = 0 and E[|U_00|^2] = 1/n under the Haar measure.
  const std::size_t n = 3;
  const int samples = 4000;
  complex mean{};
  double second = 0.0;
  Rng rng(314);
  for (int s = 0; s < samples; ++s) {
    const ComplexMatrix u = random_unitary(n, rng);
    mean += u(0, 0);
    second += std::norm(u(0, 0));
  }
  EXPECT_LT(std::abs(mean / double(samples)), 0.05);
  EXPECT_NEAR(second / samples, 1.0 / n, 0.02);
}

TEST(PureState, RejectsNonUnit) {
  try {
    PureState({1.0, 1.0});
    FAIL() << "expected NotUnitVector";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotUnitVector);
  }
}

TEST(PureState, GaugeFixMakesFirstAmplitudePositive) {
  const PureState psi = PureState::normalized({complex{0.0, 1e-13}, complex{0.0, -2.0}, complex{1.0, 1.0}});
  const PureState g = psi.gauge_fixed();
  EXPECT_NEAR(g[1].imag(), 0.0, 1e-15);
  EXPECT_GT(g[1].real(), 0.0);
  EXPECT_NEAR(std::abs(inner(psi.amplitudes(), g.amplitudes())), 1.0, 1e-14);
}
