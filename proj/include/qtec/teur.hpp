#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "qtec/eigen.hpp"
#include "qtec/matrix.hpp"
#include "qtec/pure_state.hpp"
#include "qtec/states.hpp"

namespace qtec {

// Time-energy uncertainty relation calculators. hbar defaults to 1.

/// Orthogonalization-time constant of the Chau relation.
inline constexpr double kChauConstant = 0.724611;

/// E_j = hbar theta_j / t for the principal-branch eigen-angles of U, ascending.
inline std::vector<double> hamiltonian_energies_from_unitary(const ComplexMatrix& u, double t,
                                                             double hbar = 1.0) {
  if (!(t > 0.0)) throw Error(ErrorKind::NonPositiveTime, "t must be positive");
  std::vector<double> e = unitary_eigenangles(u);
  for (auto& x : e) x *= hbar / t;
  return e;
}

/// (E_max - E_min) t / (2 hbar)
inline double cost_energy_product(double e_max, double e_min, double t, double hbar = 1.0) {
  if (!(e_max >= e_min)) throw Error(ErrorKind::BadInterval, "e_max must be >= e_min");
  if (!(t > 0.0)) throw Error(ErrorKind::NonPositiveTime, "t must be positive");
  return (e_max - e_min) * t / (2.0 * hbar);
}

/// Time for the fastest state of a Hamiltonian with spectral extremes
/// (e_max, e_min) to reach entanglement fidelity F: 2 hbar arccos(F) / (e_max - e_min).
inline double fastest_state_time(double fidelity, double e_max, double e_min, double hbar = 1.0) {
  if (!(fidelity >= 0.0 && fidelity <= 1.0)) throw Error(ErrorKind::FOutOfRange, "F must lie in [0, 1]");
  if (!(e_max > e_min)) throw Error(ErrorKind::BadInterval, "e_max must exceed e_min");
  return 2.0 * hbar * std::acos(fidelity) / (e_max - e_min);
}

/// pi hbar / (e_max - e_min)
inline double orthogonalization_time(double e_max, double e_min, double hbar = 1.0) {
  if (!(e_max > e_min)) throw Error(ErrorKind::BadInterval, "e_max must exceed e_min");
  return kPi * hbar / (e_max - e_min);
}

struct ChauComparison {
  double chau_time = 0.0;     // hbar / (A eps)
  double fastest_time = 0.0;  // pi hbar / (2 eps)
  bool fastest_exceeds_chau = false;
};

/// Orthogonalization times of (|-eps> + |eps>)/sqrt(2) under the Chau
/// relation and the fastest-state relation.
inline ChauComparison chau_comparison(double epsilon, double hbar = 1.0) {
  if (!(epsilon > 0.0)) throw Error(ErrorKind::BadInterval, "epsilon must be positive");
  ChauComparison c;
  c.chau_time = hbar / (kChauConstant * epsilon);
  c.fastest_time = orthogonalization_time(epsilon, -epsilon, hbar);
  c.fastest_exceeds_chau = c.fastest_time > c.chau_time;
  return c;
}

/// sqrt(Tr(H^2 rho) - Tr(H rho)^2); radicands down to -1e-12 clamp to 0.
inline double energy_spread(const ComplexMatrix& h, const ComplexMatrix& rho) {
  const double dev = hermitian_deviation(h);
  if (dev > kDefaultTol) throw Error(ErrorKind::NotHermitian, "deviation " + std::to_string(dev));
  if (h.rows() != rho.rows()) throw Error(ErrorKind::DimensionMismatch, "H and rho dimensions differ");
  const ComplexMatrix hrho = h * rho;
  const double mean = trace(hrho).real();
  const double second = trace_product(h, hrho).real();
  double var = second - mean * mean;
  if (var < 0.0 && var >= -1e-12) var = 0.0;
  return std::sqrt(var);
}

inline double energy_spread(const ComplexMatrix& h, const DensityMatrix& rho) {
  return energy_spread(h, rho.matrix());
}

struct TeurReport {
  double e_max = 0.0;
  double e_min = 0.0;
  double time = 0.0;
  double hbar = 1.0;
  double cost = 0.0;       // (e_max - e_min) time / (2 hbar)
  double fidelity = 0.0;   // |<psi|exp(-i H t / hbar)|psi>|
  double delta_e = 0.0;
  double lhs = 0.0;        // t * delta_e
  double rhs = 0.0;        // hbar * arccos(fidelity)
  bool bound_satisfied = false;
};

/// Evolves psi under H for time t and checks t dE >= hbar arccos(F) - 1e-9.
inline TeurReport teur_bound_check(const ComplexMatrix& h, const PureState& psi, double t, double hbar = 1.0) {
  if (!(t > 0.0)) throw Error(ErrorKind::NonPositiveTime, "t must be positive");
  if (h.rows() != psi.dim()) throw Error(ErrorKind::DimensionMismatch, "H and state dimensions differ");
  const EigenDecomposition e = hermitian_eigen(h);
  const std::size_t n = h.rows();
  // exp(-i H t / hbar) psi in the eigenbasis of H.
  ComplexVector evolved(n);
  for (std::size_t k = 0; k < n; ++k) {
    const ComplexVector vk = e.vectors.column(k);
    const complex coeff = inner(vk, psi.amplitudes()) * std::polar(1.0, -e.values[k] * t / hbar);
    for (std::size_t r = 0; r < n; ++r) evolved[r] += coeff * vk[r];
  }
  TeurReport rep;
  rep.e_max = e.values.back();
  rep.e_min = e.values.front();
  rep.time = t;
  rep.hbar = hbar;
  rep.cost = (rep.e_max - rep.e_min) * t / (2.0 * hbar);
  rep.fidelity = std::min(1.0, std::abs(inner(psi.amplitudes(), evolved)));
  rep.delta_e = energy_spread(h, psi.projector());
  rep.lhs = t * rep.delta_e;
  rep.rhs = hbar * std::acos(rep.fidelity);
  rep.bound_satisfied = rep.lhs >= rep.rhs - 1e-9;
  return rep;
}

/// arccos |<psi1|psi2>| in [0, pi/2].
inline double bures_angle(const PureState& a, const PureState& b) {
  if (a.dim() != b.dim()) throw Error(ErrorKind::DimensionMismatch, "state dimensions differ");
  return std::acos(std::min(1.0, std::abs(inner(a.amplitudes(), b.amplitudes()))));
}

}  // namespace qtec
