#pragma once

#include <cmath>
#include <span>
#include <string>

#include "qtec/matrix.hpp"

namespace qtec {

/// Unit vector in C^dim.
class PureState {
 public:
  static constexpr double kNormTol = 1e-10;

  explicit PureState(ComplexVector amplitudes, double tol = kNormTol)
      : amp_(std::move(amplitudes)) {
    if (amp_.empty()) throw Error(ErrorKind::DimensionMismatch, "empty state");
    const double nrm = norm(amp_);
    if (!std::isfinite(nrm) || std::abs(nrm - 1.0) > tol) {
      throw Error(ErrorKind::NotUnitVector, "state norm is " + std::to_string(nrm));
    }
  }

  static PureState normalized(ComplexVector amplitudes) {
    const double nrm = norm(amplitudes);
    if (!(nrm > 0.0) || !std::isfinite(nrm)) {
      throw Error(ErrorKind::NotUnitVector, "cannot normalize a zero vector");
    }
    for (auto& z : amplitudes) z /= nrm;
    return PureState(std::move(amplitudes));
  }

  static PureState basis(std::size_t dim, std::size_t k) {
    ComplexVector v(dim);
    v.at(k) = 1.0;
    return PureState(std::move(v));
  }

  std::size_t dim() const noexcept { return amp_.size(); }
  std::span<const complex> amplitudes() const noexcept { return amp_; }
  const complex& operator[](std::size_t i) const { return amp_[i]; }

  ComplexMatrix projector() const { return ComplexMatrix::outer(amp_, amp_); }

  /// Multiplies by a global phase so the first amplitude with modulus
  /// above `floor` is positive real.
  PureState gauge_fixed(double floor = 1e-12) const {
    ComplexVector v = amp_;
    for (const auto& z : v) {
      if (std::abs(z) > floor) {
        const complex phase = std::conj(z) / std::abs(z);
        for (auto& w : v) w *= phase;
        break;
      }
    }
    return PureState(std::move(v));
  }

 private:
  ComplexVector amp_;
};

}  // namespace qtec
