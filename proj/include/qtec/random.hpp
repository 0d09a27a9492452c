#pragma once

#include <cstdint>
#include <random>

#include "qtec/matrix.hpp"
#include "qtec/pure_state.hpp"

namespace qtec {

/// Seeded 64-bit generator (std::mt19937_64). Independent streams for
/// parallel restarts are derived with `stream_seed`, a SplitMix64 hash of
/// (seed, stream index); stream k of seed s is Rng(s, k).
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) : engine_(stream_seed(seed, stream)) {}

  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

  static std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
  }

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  complex complex_normal() { return {normal(), normal()}; }

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

inline ComplexMatrix gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  ComplexMatrix m(rows, cols);
  for (auto& z : m.data()) z = rng.complex_normal();
  return m;
}

/// Orthonormalizes the columns of `m` (rows >= cols) by twice-iterated
/// modified Gram-Schmidt. The implied triangular factor has a positive
/// real diagonal, which makes the result Haar distributed for Gaussian input.
inline ComplexMatrix orthonormalize_columns(ComplexMatrix m) {
  const std::size_t rows = m.rows(), cols = m.cols();
  if (cols > rows) throw Error(ErrorKind::DimensionMismatch, "more columns than rows");
  for (std::size_t j = 0; j < cols; ++j) {
    ComplexVector vj = m.column(j);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        const ComplexVector qk = m.column(k);
        const complex proj = inner(qk, vj);
        for (std::size_t r = 0; r < rows; ++r) vj[r] -= proj * qk[r];
      }
    }
    const double nrm = norm(vj);
    if (!(nrm > 0.0)) throw Error(ErrorKind::NoConvergence, "rank-deficient sample");
    for (auto& z : vj) z /= nrm;
    m.set_column(j, vj);
  }
  return m;
}

inline ComplexMatrix random_isometry(std::size_t rows, std::size_t cols, Rng& rng) {
  return orthonormalize_columns(gaussian_matrix(rows, cols, rng));
}

inline ComplexMatrix random_unitary(std::size_t n, Rng& rng) { return random_isometry(n, n, rng); }

inline ComplexMatrix random_unitary(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  return random_unitary(n, rng);
}

inline PureState random_pure_state(std::size_t n, Rng& rng) {
  ComplexVector v(n);
  for (auto& z : v) z = rng.complex_normal();
  return PureState::normalized(std::move(v));
}

inline PureState random_pure_state(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  return random_pure_state(n, rng);
}

}  // namespace qtec
