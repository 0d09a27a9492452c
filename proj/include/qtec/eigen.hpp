#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qtec/matrix.hpp"
#include "qtec/pure_state.hpp"

namespace qtec {

/// Eigenvalues ascending; column i of `vectors` belongs to `values[i]`.
struct EigenDecomposition {
  std::vector<double> values;
  ComplexMatrix vectors;
  int sweeps = 0;
};

struct JacobiOptions {
  double off_tol = 1e-12;  // relative to the Frobenius norm of the input
  int max_sweeps = 100;
};

namespace detail {

inline double off_diagonal_norm(const ComplexMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

// One complex Jacobi rotation annihilating a(p, q). The unitary acting on
// columns (p, q) is G = diag(1, e^{-i phi}) * [[c, s], [-s, c]] where
// a(p, q) = |a(p, q)| e^{i phi}.
inline void jacobi_rotate(ComplexMatrix& a, ComplexMatrix& v, std::size_t p, std::size_t q) {
  const complex apq = a(p, q);
  const double b = std::abs(apq);
  if (b == 0.0) return;
  const complex phase_conj = std::conj(apq) / b;
  const double app = a(p, p).real();
  const double aqq = a(q, q).real();
  const double theta = (aqq - app) / (2.0 * b);
  double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  if (theta < 0.0) t = -t;
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;

  const complex g00 = c, g01 = s, g10 = -s * phase_conj, g11 = c * phase_conj;
  const std::size_t n = a.rows();
  for (std::size_t k = 0; k < n; ++k) {
    const complex akp = a(k, p), akq = a(k, q);
    a(k, p) = akp * g00 + akq * g10;
    a(k, q) = akp * g01 + akq * g11;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const complex apk = a(p, k), aqk = a(q, k);
    a(p, k) = std::conj(g00) * apk + std::conj(g10) * aqk;
    a(q, k) = std::conj(g01) * apk + std::conj(g11) * aqk;
  }
  for (std::size_t k = 0; k < v.rows(); ++k) {
    const complex vkp = v(k, p), vkq = v(k, q);
    v(k, p) = vkp * g00 + vkq * g10;
    v(k, q) = vkp * g01 + vkq * g11;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = a(p, p).real();
  a(q, q) = a(q, q).real();
}

}  // namespace detail

/// Full spectrum of a Hermitian matrix by cyclic complex Jacobi rotations.
/// Throws NotHermitian when max|A - A^dagger| exceeds `tol`, and
/// NoConvergence when the sweep cap is hit.
inline EigenDecomposition hermitian_eigen(const ComplexMatrix& input, double tol = kDefaultTol,
                                          JacobiOptions opts = {}) {
  const double dev = hermitian_deviation(input);
  if (dev > tol) {
    throw Error(ErrorKind::NotHermitian, "deviation " + std::to_string(dev));
  }
  const std::size_t n = input.rows();
  ComplexMatrix a = hermitian_part(input);
  ComplexMatrix v = ComplexMatrix::identity(n);
  const double scale = frobenius_norm(a);

  int sweeps = 0;
  bool converged = false;
  for (; sweeps <= opts.max_sweeps; ++sweeps) {
    if (detail::off_diagonal_norm(a) <= opts.off_tol * scale) {
      converged = true;
      break;
    }
    if (sweeps == opts.max_sweeps) break;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) detail::jacobi_rotate(a, v, p, q);
  }
  if (!converged) {
    throw Error(ErrorKind::NoConvergence,
                "Jacobi did not converge in " + std::to_string(opts.max_sweeps) + " sweeps");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a(i, i).real() < a(j, j).real();
  });

  EigenDecomposition out{std::vector<double>(n), ComplexMatrix(n, n), sweeps};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
  }
  return out;
}

inline std::pair<double, PureState> min_eigenpair(const ComplexMatrix& a, double tol = kDefaultTol) {
  EigenDecomposition e = hermitian_eigen(a, tol);
  return {e.values.front(), PureState::normalized(e.vectors.column(0))};
}

/// Angles theta_j in (-pi, pi] with eigenvalues of U equal to exp(-i theta_j).
using AngleList = std::vector<double>;

/// Maps -arg(z) into (-pi, pi]; values within 1e-12 of -pi become pi.
inline double phase_to_angle(complex z) {
  double theta = -std::atan2(z.imag(), z.real());
  if (theta <= -kPi + 1e-12) theta = kPi;
  return theta;
}

struct Check {
  bool ok = false;
  double deviation = 0.0;
  explicit operator bool() const noexcept { return ok; }
};

inline Check validate_unitary(const ComplexMatrix& u, double tol = kDefaultTol) {
  if (!u.is_square()) return {false, std::numeric_limits<double>::infinity()};
  const double dev = max_abs_diff(u.adjoint() * u, ComplexMatrix::identity(u.rows()));
  return {dev <= tol, dev};
}

/// Deviation reports the most negative eigenvalue (or the Hermitian
/// deviation when that check fails first).
inline Check validate_psd(const ComplexMatrix& a, double tol = kDefaultTol) {
  if (!a.is_square()) return {false, std::numeric_limits<double>::infinity()};
  const double herm = hermitian_deviation(a);
  if (herm > tol) return {false, herm};
  const double lmin = hermitian_eigen(a, tol).values.front();
  const double dev = std::max(0.0, -lmin);
  return {lmin >= -tol, dev};
}

inline Check validate_density(const ComplexMatrix& rho, double tol = kDefaultTol) {
  Check psd = validate_psd(rho, tol);
  if (!psd) return psd;
  const double tr_dev = std::abs(trace(rho) - 1.0);
  return {tr_dev <= tol, std::max(psd.deviation, tr_dev)};
}

/// Eigen-angles of a unitary. Diagonalizes (U + U^dagger)/2 and resolves
/// each degenerate eigenspace with (U - U^dagger)/(2i) compressed to it;
/// the angle is read off <v|U|v>.
inline AngleList unitary_eigenangles(const ComplexMatrix& u, double tol = kDefaultTol) {
  const Check uni = validate_unitary(u, tol);
  if (!uni) throw Error(ErrorKind::NotUnitary, "deviation " + std::to_string(uni.deviation));
  const std::size_t n = u.rows();
  const ComplexMatrix h1 = hermitian_part(u);
  ComplexMatrix s = u - u.adjoint();
  s *= complex{0.0, -0.5};

  EigenDecomposition e = hermitian_eigen(h1, 1e-8);
  ComplexMatrix basis = e.vectors;

  constexpr double kGroupTol = 1e-8;
  std::size_t start = 0;
  while (start < n) {
    std::size_t stop = start + 1;
    while (stop < n && e.values[stop] - e.values[stop - 1] <= kGroupTol) ++stop;
    const std::size_t k = stop - start;
    if (k > 1) {
      ComplexMatrix vg(n, k);
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < k; ++c) vg(r, c) = basis(r, start + c);
      const ComplexMatrix block = hermitian_part(vg.adjoint() * s * vg);
      const ComplexMatrix rotated = vg * hermitian_eigen(block, 1e-8).vectors;
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < k; ++c) basis(r, start + c) = rotated(r, c);
    }
    start = stop;
  }

  AngleList angles(n);
  for (std::size_t j = 0; j < n; ++j) {
    const ComplexVector vj = basis.column(j);
    angles[j] = phase_to_angle(sandwich(vj, u, vj));
  }
  std::sort(angles.begin(), angles.end());
  return angles;
}

/// Lower Cholesky factor of a Hermitian positive-definite matrix, or
/// nullopt when a pivot is not strictly positive.
inline std::optional<ComplexMatrix> cholesky(const ComplexMatrix& a) {
  const std::size_t n = a.rows();
  ComplexMatrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j).real();
    for (std::size_t k = 0; k < j; ++k) d -= std::norm(l(j, k));
    if (!(d > 0.0)) return std::nullopt;
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      complex acc = a(i, j);
      for (std::size_t k = 0; k < j; ++k) acc -= l(i, k) * std::conj(l(j, k));
      l(i, j) = acc / ljj;
    }
  }
  return l;
}

/// A^{-1} from its Cholesky factor.
inline ComplexMatrix cholesky_inverse(const ComplexMatrix& l) {
  const std::size_t n = l.rows();
  // Solve L Y = I, then A^{-1} = Y^dagger Y.
  ComplexMatrix y(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      complex acc = (i == c) ? complex{1.0} : complex{};
      for (std::size_t k = 0; k < i; ++k) acc -= l(i, k) * y(k, c);
      y(i, c) = acc / l(i, i).real();
    }
  }
  return y.adjoint() * y;
}

}  // namespace qtec
