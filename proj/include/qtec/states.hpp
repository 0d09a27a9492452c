#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "qtec/eigen.hpp"
#include "qtec/matrix.hpp"
#include "qtec/pure_state.hpp"
#include "qtec/random.hpp"

namespace qtec {

/// Hermitian, positive semidefinite, unit-trace matrix.
class DensityMatrix {
 public:
  static constexpr double kTol = 1e-9;

  explicit DensityMatrix(ComplexMatrix m, double tol = kTol) : m_(std::move(m)) {
    if (!m_.is_square()) throw Error(ErrorKind::DimensionMismatch, "density matrix must be square");
    const Check c = validate_density(m_, tol);
    if (!c) throw Error(ErrorKind::NotDensity, "deviation " + std::to_string(c.deviation));
  }

  static DensityMatrix maximally_mixed(std::size_t n) {
    ComplexMatrix m = ComplexMatrix::identity(n);
    m *= 1.0 / static_cast<double>(n);
    return DensityMatrix(std::move(m));
  }

  static DensityMatrix pure(const PureState& psi) { return DensityMatrix(psi.projector()); }

  std::size_t dim() const noexcept { return m_.rows(); }
  const ComplexMatrix& matrix() const noexcept { return m_; }

 private:
  ComplexMatrix m_;
};

/// Unit vector on C^{dimA} (x) C^{dimB}; amplitude index is a * dimB + b.
class JointPureState {
 public:
  JointPureState(std::size_t dim_a, std::size_t dim_b, ComplexVector amplitudes,
                 double tol = PureState::kNormTol)
      : dim_a_(dim_a), dim_b_(dim_b), amp_(std::move(amplitudes)) {
    if (dim_a == 0 || dim_b == 0 || amp_.size() != dim_a * dim_b) {
      throw Error(ErrorKind::DimensionMismatch, "joint state length must be dimA * dimB");
    }
    const double nrm = norm(amp_);
    if (std::abs(nrm - 1.0) > tol) {
      throw Error(ErrorKind::NotUnitVector, "joint state norm is " + std::to_string(nrm));
    }
  }

  /// Reads |Psi> = sum_{a,b} F(b, a) |a>|b> off a dimB x dimA factor,
  /// normalizing it first. Tr_A |Psi><Psi| is then F F^dagger.
  static JointPureState from_factor(const ComplexMatrix& factor) {
    const std::size_t db = factor.rows(), da = factor.cols();
    const double nrm = frobenius_norm(factor);
    if (!(nrm > 0.0)) throw Error(ErrorKind::NotUnitVector, "zero factor");
    ComplexVector amp(da * db);
    for (std::size_t a = 0; a < da; ++a)
      for (std::size_t b = 0; b < db; ++b) amp[a * db + b] = factor(b, a) / nrm;
    return JointPureState(da, db, std::move(amp));
  }

  std::size_t dim_a() const noexcept { return dim_a_; }
  std::size_t dim_b() const noexcept { return dim_b_; }
  std::span<const complex> amplitudes() const noexcept { return amp_; }
  const complex& amplitude(std::size_t a, std::size_t b) const { return amp_[a * dim_b_ + b]; }

  /// Tr_A |Psi><Psi|
  ComplexMatrix reduced_b_matrix() const {
    ComplexMatrix rho(dim_b_, dim_b_);
    for (std::size_t a = 0; a < dim_a_; ++a)
      for (std::size_t b = 0; b < dim_b_; ++b)
        for (std::size_t bp = 0; bp < dim_b_; ++bp)
          rho(b, bp) += amplitude(a, b) * std::conj(amplitude(a, bp));
    return rho;
  }

  DensityMatrix reduced_b() const { return DensityMatrix(reduced_b_matrix()); }

  /// Tr_B |Psi><Psi|
  DensityMatrix reduced_a() const {
    ComplexMatrix rho(dim_a_, dim_a_);
    for (std::size_t a = 0; a < dim_a_; ++a)
      for (std::size_t ap = 0; ap < dim_a_; ++ap)
        for (std::size_t b = 0; b < dim_b_; ++b)
          rho(a, ap) += amplitude(a, b) * std::conj(amplitude(ap, b));
    return DensityMatrix(std::move(rho));
  }

  JointPureState gauge_fixed(double floor = 1e-12) const {
    ComplexVector v = amp_;
    for (const auto& z : v) {
      if (std::abs(z) > floor) {
        const complex phase = std::conj(z) / std::abs(z);
        for (auto& w : v) w *= phase;
        break;
      }
    }
    return JointPureState(dim_a_, dim_b_, std::move(v));
  }

 private:
  std::size_t dim_a_;
  std::size_t dim_b_;
  ComplexVector amp_;
};

/// rho = G G^dagger / Tr(G G^dagger) with G an n x rank complex Gaussian.
inline DensityMatrix random_density(std::size_t n, std::size_t rank, Rng& rng) {
  if (n == 0 || rank == 0 || rank > n) {
    throw Error(ErrorKind::OutOfRange, "rank must lie in [1, n]");
  }
  const ComplexMatrix g = gaussian_matrix(n, rank, rng);
  ComplexMatrix rho = g * g.adjoint();
  rho *= 1.0 / trace(rho).real();
  return DensityMatrix(hermitian_part(rho));
}

inline DensityMatrix random_density(std::size_t n, std::size_t rank, std::uint64_t seed) {
  Rng rng(seed);
  return random_density(n, rank, rng);
}

}  // namespace qtec
