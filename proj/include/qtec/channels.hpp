#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "qtec/eigen.hpp"
#include "qtec/matrix.hpp"
#include "qtec/random.hpp"
#include "qtec/states.hpp"

namespace qtec {

/// d Kraus operators on an n-dimensional system, n >= 2, d >= 1.
/// Trace preservation (sum_j K_j^dagger K_j = I) is enforced at 1e-9 * n
/// unless a different tolerance is passed.
class KrausChannel {
 public:
  explicit KrausChannel(std::vector<ComplexMatrix> kraus, double tol = -1.0)
      : ops_(std::move(kraus)) {
    if (ops_.empty()) throw Error(ErrorKind::InvalidChannel, "at least one Kraus operator required");
    n_ = ops_.front().rows();
    if (n_ < 2) throw Error(ErrorKind::InvalidChannel, "system dimension must be at least 2");
    for (const auto& k : ops_) {
      if (k.rows() != n_ || k.cols() != n_) {
        throw Error(ErrorKind::DimensionMismatch, "every Kraus operator must be n x n");
      }
    }
    residual_ = compute_residual();
    const double limit = tol < 0.0 ? 1e-9 * static_cast<double>(n_) : tol;
    if (!(residual_ <= limit)) {
      throw Error(ErrorKind::InvalidChannel,
                  "completeness residual " + std::to_string(residual_) + " exceeds " +
                      std::to_string(limit));
    }
  }

  /// Skips the completeness check (shape checks still apply).
  static KrausChannel unchecked(std::vector<ComplexMatrix> kraus) {
    return KrausChannel(std::move(kraus), std::numeric_limits<double>::infinity());
  }

  std::size_t n() const noexcept { return n_; }
  std::size_t d() const noexcept { return ops_.size(); }
  const std::vector<ComplexMatrix>& kraus() const noexcept { return ops_; }
  const ComplexMatrix& operator[](std::size_t j) const { return ops_[j]; }

  /// max |sum_j K_j^dagger K_j - I| entrywise.
  double completeness_residual() const noexcept { return residual_; }

 private:
  double compute_residual() const {
    ComplexMatrix acc(n_, n_);
    for (const auto& k : ops_) acc += k.adjoint() * k;
    return max_abs_diff(acc, ComplexMatrix::identity(n_));
  }

  std::size_t n_ = 0;
  std::vector<ComplexMatrix> ops_;
  double residual_ = 0.0;
};

inline DensityMatrix apply(const KrausChannel& ch, const DensityMatrix& rho) {
  if (rho.dim() != ch.n()) throw Error(ErrorKind::DimensionMismatch, "state and channel dimensions differ");
  ComplexMatrix out(ch.n(), ch.n());
  for (const auto& k : ch.kraus()) out += k * rho.matrix() * k.adjoint();
  const double tol = std::max(DensityMatrix::kTol, 10.0 * ch.completeness_residual());
  return DensityMatrix(hermitian_part(out), tol);
}

inline KrausChannel identity_channel(std::size_t n) {
  return KrausChannel({ComplexMatrix::identity(n)});
}

inline KrausChannel unitary_channel(const ComplexMatrix& u) {
  const Check c = validate_unitary(u, kDefaultTol);
  if (!c) throw Error(ErrorKind::NotUnitary, "deviation " + std::to_string(c.deviation));
  return KrausChannel({u});
}

/// K_j = |j><j|
inline KrausChannel dephasing(std::size_t n) {
  std::vector<ComplexMatrix> ops;
  for (std::size_t j = 0; j < n; ++j) {
    ComplexMatrix k(n, n);
    k(j, j) = 1.0;
    ops.push_back(std::move(k));
  }
  return KrausChannel(std::move(ops));
}

/// Kraus operators are the n x n blocks of a Haar-random isometry C^n -> C^{n d}.
inline KrausChannel random_channel(std::size_t n, std::size_t d, Rng& rng) {
  if (d == 0) throw Error(ErrorKind::OutOfRange, "d must be at least 1");
  const ComplexMatrix v = random_isometry(n * d, n, rng);
  std::vector<ComplexMatrix> ops;
  for (std::size_t j = 0; j < d; ++j) {
    ComplexMatrix k(n, n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) k(r, c) = v(j * n + r, c);
    ops.push_back(std::move(k));
  }
  return KrausChannel(std::move(ops));
}

inline KrausChannel random_channel(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  return random_channel(n, d, rng);
}

/// Weyl operator X^j Z^k with X|m> = |m+1 mod n>, Z|m> = e^{2 pi i m / n}|m>.
inline ComplexMatrix weyl_operator(std::size_t n, std::size_t j, std::size_t k) {
  ComplexMatrix w(n, n);
  for (std::size_t m = 0; m < n; ++m) {
    const double phase = 2.0 * kPi * static_cast<double>(k * m % n) / static_cast<double>(n);
    w((m + j) % n, m) = std::polar(1.0, phase);
  }
  return w;
}

inline double depolarizing_lower_bound(std::size_t n) {
  return -1.0 / (static_cast<double>(n) * static_cast<double>(n) - 1.0);
}

inline void require_depolarizing_range(std::size_t n, double q) {
  if (n < 2) throw Error(ErrorKind::OutOfRange, "n must be at least 2");
  const double lo = depolarizing_lower_bound(n);
  if (!std::isfinite(q) || q < lo - 1e-12 || q > 1.0 + 1e-12) {
    throw Error(ErrorKind::OutOfRange,
                "q = " + std::to_string(q) + " outside [" + std::to_string(lo) + ", 1]");
  }
}

namespace detail {

// Kraus operators from a Choi matrix J = (I (x) K)(|Omega><Omega|): an
// eigenvector c with eigenvalue lambda gives K(b, i) = sqrt(n lambda) c[i n + b].
inline std::vector<ComplexMatrix> kraus_from_choi(const ComplexMatrix& choi, std::size_t n,
                                                  double cutoff = 1e-14) {
  const EigenDecomposition e = hermitian_eigen(choi, 1e-9);
  std::vector<ComplexMatrix> ops;
  for (std::size_t idx = e.values.size(); idx-- > 0;) {
    const double lambda = e.values[idx];
    if (lambda <= cutoff) continue;
    const double scale = std::sqrt(static_cast<double>(n) * lambda);
    ComplexMatrix k(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t b = 0; b < n; ++b) k(b, i) = scale * e.vectors(i * n + b, idx);
    ops.push_back(std::move(k));
  }
  return ops;
}

}  // namespace detail

/// rho -> q rho + (1 - q) I / n for -1/(n^2 - 1) <= q <= 1.
/// For q >= 0 the Kraus set is the scaled identity plus scaled Weyl
/// operators; for q < 0 it is read off the spectral decomposition of the
/// Choi matrix q |Omega><Omega| + (1 - q) I / n^2. Zero-weight operators
/// are dropped.
inline KrausChannel depolarizing(std::size_t n, double q) {
  require_depolarizing_range(n, q);
  q = std::clamp(q, depolarizing_lower_bound(n), 1.0);
  const double n2 = static_cast<double>(n * n);
  std::vector<ComplexMatrix> ops;
  if (q >= 0.0) {
    const double w0 = std::sqrt(q + (1.0 - q) / n2);
    const double w = std::sqrt((1.0 - q) / n2);
    ops.push_back(ComplexMatrix::identity(n) * complex{w0});
    if (w > 0.0) {
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
          if (j != 0 || k != 0) ops.push_back(weyl_operator(n, j, k) * complex{w});
    }
  } else {
    ComplexMatrix choi = ComplexMatrix::identity(n * n);
    choi *= (1.0 - q) / n2;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) choi(i * n + i, j * n + j) += q / static_cast<double>(n);
    ops = detail::kraus_from_choi(choi, n);
  }
  return KrausChannel(std::move(ops));
}

/// (I (x) K)(|Omega><Omega|) with |Omega> = sum_i |ii> / sqrt(n); row
/// index is a * n + b with the channel acting on b.
inline DensityMatrix choi_matrix(const KrausChannel& ch) {
  const std::size_t n = ch.n();
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  ComplexMatrix choi(n * n, n * n);
  ComplexVector col(n * n);
  for (const auto& k : ch.kraus()) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t b = 0; b < n; ++b) col[i * n + b] = k(b, i) * inv_sqrt_n;
    choi += ComplexMatrix::outer(col, col);
  }
  const double tol = std::max(DensityMatrix::kTol, 10.0 * ch.completeness_residual());
  return DensityMatrix(hermitian_part(choi), tol);
}

/// Channel equality measure: max entrywise difference of Choi matrices.
inline double choi_distance(const KrausChannel& a, const KrausChannel& b) {
  if (a.n() != b.n()) throw Error(ErrorKind::DimensionMismatch, "channel dimensions differ");
  return max_abs_diff(choi_matrix(a).matrix(), choi_matrix(b).matrix());
}

/// Spectral purification with ancilla dimension rank(rho); eigenvalues
/// below 1e-12 count as zero.
inline JointPureState purify(const DensityMatrix& rho, double rank_cutoff = 1e-12) {
  const EigenDecomposition e = hermitian_eigen(rho.matrix(), 1e-9);
  const std::size_t n = rho.dim();
  std::vector<std::size_t> kept;
  for (std::size_t k = n; k-- > 0;)
    if (e.values[k] > rank_cutoff) kept.push_back(k);
  const std::size_t r = kept.size();
  ComplexVector amp(r * n);
  double total = 0.0;
  for (std::size_t a = 0; a < r; ++a) {
    const double w = std::sqrt(e.values[kept[a]]);
    total += e.values[kept[a]];
    for (std::size_t b = 0; b < n; ++b) amp[a * n + b] = w * e.vectors(b, kept[a]);
  }
  for (auto& z : amp) z /= std::sqrt(total);
  return JointPureState(r, n, std::move(amp));
}

inline JointPureState maximally_entangled(std::size_t n) {
  if (n < 2) throw Error(ErrorKind::OutOfRange, "n must be at least 2");
  ComplexVector amp(n * n);
  const double w = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) amp[i * n + i] = w;
  return JointPureState(n, n, std::move(amp));
}

/// sum_j v_j K_j for any coefficient vector of length d.
inline ComplexMatrix kraus_linear_combination(const KrausChannel& ch, std::span<const complex> v) {
  if (v.size() != ch.d()) throw Error(ErrorKind::DimensionMismatch, "coefficient vector must have length d");
  ComplexMatrix out(ch.n(), ch.n());
  for (std::size_t j = 0; j < ch.d(); ++j) {
    if (v[j] == complex{}) continue;
    const auto src = ch[j].data();
    auto dst = out.data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += v[j] * src[i];
  }
  return out;
}

/// K_v = sum_j v_j K_j for a unit vector v.
inline ComplexMatrix kraus_combination(const KrausChannel& ch, std::span<const complex> v) {
  if (v.size() != ch.d()) throw Error(ErrorKind::DimensionMismatch, "coefficient vector must have length d");
  const double nrm = norm(v);
  if (std::abs(nrm - 1.0) > 1e-10) {
    throw Error(ErrorKind::NotUnitVector, "coefficient norm is " + std::to_string(nrm));
  }
  return kraus_linear_combination(ch, v);
}

}  // namespace qtec
