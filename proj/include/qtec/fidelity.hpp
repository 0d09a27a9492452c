#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qtec/channels.hpp"
#include "qtec/eigen.hpp"
#include "qtec/random.hpp"
#include "qtec/states.hpp"

namespace qtec {

namespace detail {

inline double clamp_fidelity(double f) {
  if (f > 1.0 && f <= 1.0 + 1e-12) return 1.0;
  return f;
}

inline ComplexVector kraus_traces(const KrausChannel& ch, const ComplexMatrix& rho) {
  ComplexVector c(ch.d());
  for (std::size_t i = 0; i < ch.d(); ++i) c[i] = trace_product(ch[i], rho);
  return c;
}

}  // namespace detail

/// F_e(rho, K) = sqrt(sum_i |Tr(rho K_i)|^2).
inline double entanglement_fidelity(const DensityMatrix& rho, const KrausChannel& ch) {
  if (rho.dim() != ch.n()) throw Error(ErrorKind::DimensionMismatch, "state and channel dimensions differ");
  return detail::clamp_fidelity(norm(detail::kraus_traces(ch, rho.matrix())));
}

/// F(|Psi><Psi|, (I (x) K)(|Psi><Psi|)) evaluated on the joint state,
/// i.e. sqrt(sum_i |<Psi|(I (x) K_i)|Psi>|^2).
inline double entanglement_fidelity_direct(const JointPureState& psi, const KrausChannel& ch) {
  if (psi.dim_b() != ch.n()) throw Error(ErrorKind::DimensionMismatch, "joint state and channel dimensions differ");
  const std::size_t da = psi.dim_a(), db = psi.dim_b();
  double total = 0.0;
  for (const auto& k : ch.kraus()) {
    complex overlap{};
    for (std::size_t a = 0; a < da; ++a)
      for (std::size_t b = 0; b < db; ++b) {
        complex kpsi{};
        for (std::size_t bp = 0; bp < db; ++bp) kpsi += k(b, bp) * psi.amplitude(a, bp);
        overlap += std::conj(psi.amplitude(a, b)) * kpsi;
      }
    total += std::norm(overlap);
  }
  return detail::clamp_fidelity(std::sqrt(total));
}

/// Unit w maximizing |sum_i w_i Tr(rho K_i)|: w_i = conj(Tr(rho K_i)) / F_e.
inline ComplexVector optimal_w(const DensityMatrix& rho, const KrausChannel& ch) {
  if (rho.dim() != ch.n()) throw Error(ErrorKind::DimensionMismatch, "state and channel dimensions differ");
  ComplexVector c = detail::kraus_traces(ch, rho.matrix());
  const double nrm = norm(c);
  if (nrm < 1e-14) throw Error(ErrorKind::ZeroFidelity, "entanglement fidelity vanishes");
  for (auto& z : c) z = std::conj(z) / nrm;
  return c;
}

struct FidelityOptions {
  int restarts = 32;
  int max_iters = 10000;
  double grad_tol = 1e-10;
  std::uint64_t seed = 0;
  double armijo = 1e-4;
  double initial_step = 1.0;
  double zero_threshold = 1e-7;
  bool bb_steps = true;       // Barzilai-Borwein trial step after the first iteration
  int stall_window = 200;     // stop when f drops by <= stall_rtol * f over this many iterations
  double stall_rtol = 1e-15;
};

/// Minimum entanglement fidelity with its witness. `minimizer` is the
/// joint input |Psi>_AB (ancilla dimension n); `reduced` is its reduction
/// rho_B. `optimal_w` is empty when `possibly_zero` is set.
struct FidelityResult {
  double value = 0.0;
  JointPureState minimizer;
  DensityMatrix reduced;
  ComplexVector optimal_w;
  int iterations = 0;
  int restarts_used = 0;
  bool converged = false;
  double gradient_norm = 0.0;
  bool possibly_zero = false;
  int best_restart = 0;
};

/// f(A) = sum_i |Tr(A^dagger K_i A)|^2 on the unit sphere of n x n factors
/// A (A A^dagger = rho_B), and its gradient with respect to conj(A):
/// sum_i [conj(c_i) K_i + c_i K_i^dagger] A with c_i = Tr(A^dagger K_i A).
struct JointObjective {
  double value = 0.0;
  ComplexMatrix gradient;
};

inline double joint_objective_value(const KrausChannel& ch, const ComplexMatrix& factor) {
  const ComplexMatrix rho = factor * factor.adjoint();
  double f = 0.0;
  for (const auto& k : ch.kraus()) f += std::norm(trace_product(k, rho));
  return f;
}

inline JointObjective joint_objective(const KrausChannel& ch, const ComplexMatrix& factor) {
  const ComplexMatrix rho = factor * factor.adjoint();
  ComplexMatrix m(ch.n(), ch.n());
  double f = 0.0;
  for (const auto& k : ch.kraus()) {
    const complex c = trace_product(k, rho);
    f += std::norm(c);
    const complex cc = std::conj(c);
    for (std::size_t r = 0; r < ch.n(); ++r)
      for (std::size_t s = 0; s < ch.n(); ++s) m(r, s) += cc * k(r, s) + c * std::conj(k(s, r));
  }
  return {f, m * factor};
}

namespace detail {

struct DescentRun {
  ComplexMatrix factor;
  double value = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

inline void normalize_factor(ComplexMatrix& a) { a *= 1.0 / frobenius_norm(a); }

// Riemannian steepest descent on the unit sphere with Armijo backtracking.
inline DescentRun descend(const KrausChannel& ch, ComplexMatrix a, const FidelityOptions& opts) {
  normalize_factor(a);
  JointObjective obj = joint_objective(ch, a);
  DescentRun run{a, obj.value, 0.0, 0, false};
  ComplexMatrix prev_a, prev_xi;
  double window_start = obj.value;
  for (int it = 0;; ++it) {
    // Tangent projection: remove the radial component Re<A, G> A.
    const double radial = inner(a.data(), obj.gradient.data()).real();
    ComplexMatrix xi = obj.gradient - a * complex{radial};
    const double gnorm = frobenius_norm(xi);
    run.gradient_norm = gnorm;
    run.iterations = it;
    if (gnorm <= opts.grad_tol) {
      run.converged = true;
      break;
    }
    if (it >= opts.max_iters) break;

    if (opts.stall_window > 0 && it > 0 && it % opts.stall_window == 0) {
      if (window_start - obj.value <= opts.stall_rtol * obj.value) {
        run.converged = true;
        break;
      }
      window_start = obj.value;
    }

    const double slope = 2.0 * gnorm * gnorm;
    double step = opts.initial_step;
    if (opts.bb_steps && it > 0) {
      // sy / yy with s = A_k - A_{k-1}, y = xi_k - xi_{k-1}.
      const ComplexMatrix sdiff = a - prev_a;
      const ComplexMatrix ydiff = xi - prev_xi;
      const double sy = inner(sdiff.data(), ydiff.data()).real();
      const double yy = inner(ydiff.data(), ydiff.data()).real();
      if (sy > 0.0 && yy > 0.0) step = std::clamp(sy / yy, 1e-6, 1e6);
    }
    bool accepted = false;
    ComplexMatrix trial;
    double trial_value = 0.0;
    while (step >= 1e-20) {
      trial = a - xi * complex{step};
      normalize_factor(trial);
      trial_value = joint_objective_value(ch, trial);
      if (trial_value <= obj.value - opts.armijo * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // No representable descent left: the iterate is stationary to
      // working precision.
      run.converged = gnorm <= 1e-7;
      break;
    }
    prev_a = std::move(a);
    prev_xi = std::move(xi);
    a = std::move(trial);
    obj = joint_objective(ch, a);
  }
  run.factor = std::move(a);
  run.value = obj.value;
  return run;
}

inline ComplexMatrix random_factor(std::size_t n, Rng& rng) {
  ComplexMatrix a = gaussian_matrix(n, n, rng);
  normalize_factor(a);
  return a;
}

}  // namespace detail

/// F_min(K) = min over joint inputs |Psi>_AB of the entanglement fidelity,
/// by multi-start projected gradient descent over unit n x n factors.
/// Restart r draws its start from stream r of `opts.seed`; the lowest
/// value wins, ties within 1e-12 going to the lowest restart index.
inline FidelityResult fmin_descent(const KrausChannel& ch, const FidelityOptions& opts = {}) {
  const int restarts = std::max(1, opts.restarts);
  std::optional<detail::DescentRun> best;
  int best_index = 0;
  for (int r = 0; r < restarts; ++r) {
    Rng rng(opts.seed, static_cast<std::uint64_t>(r));
    detail::DescentRun run = detail::descend(ch, detail::random_factor(ch.n(), rng), opts);
    if (!best || run.value < best->value - 1e-12) {
      best = std::move(run);
      best_index = r;
    }
  }

  JointPureState psi = JointPureState::from_factor(best->factor).gauge_fixed();
  DensityMatrix rho_b = psi.reduced_b();
  const double value = entanglement_fidelity(rho_b, ch);
  const bool possibly_zero = value <= opts.zero_threshold;
  ComplexVector w;
  if (!possibly_zero) w = optimal_w(rho_b, ch);
  return FidelityResult{value,
                        std::move(psi),
                        std::move(rho_b),
                        std::move(w),
                        best->iterations,
                        restarts,
                        best->converged,
                        best->gradient_norm,
                        possibly_zero,
                        best_index};
}

struct BruteForceOptions {
  int grid = 400;         // polar x azimuthal resolution of the Bloch ball (n = 2)
  int radial = 101;       // radial grid points in [0, 1] (n = 2)
  int samples = 100000;   // random mixed states (n = 3, 4)
  std::uint64_t seed = 0;
};

/// Sampled upper bound on F_min. For n = 2 the Bloch ball is gridded in
/// (radius, polar, azimuth); for n = 3, 4 seeded random density matrices of
/// every rank are drawn. Other dimensions raise UnsupportedDimension.
inline double fmin_bruteforce(const KrausChannel& ch, const BruteForceOptions& opts = {}) {
  const std::size_t n = ch.n();
  double best = std::numeric_limits<double>::infinity();
  if (n == 2) {
    const int grid = std::max(2, opts.grid);
    const int radial = std::max(2, opts.radial);
    for (int ir = 0; ir < radial; ++ir) {
      const double r = static_cast<double>(ir) / (radial - 1);
      for (int ip = 0; ip <= grid; ++ip) {
        const double polar = kPi * ip / grid;
        const double z = r * std::cos(polar), rs = r * std::sin(polar);
        const int n_az = (ir == 0 || ip == 0 || ip == grid) ? 1 : grid;
        for (int ia = 0; ia < n_az; ++ia) {
          const double az = 2.0 * kPi * ia / grid;
          const double x = rs * std::cos(az), y = rs * std::sin(az);
          const complex r00 = 0.5 * (1.0 + z), r11 = 0.5 * (1.0 - z);
          const complex r01{0.5 * x, -0.5 * y}, r10{0.5 * x, 0.5 * y};
          double f = 0.0;
          for (const auto& k : ch.kraus()) {
            const complex t = r00 * k(0, 0) + r01 * k(1, 0) + r10 * k(0, 1) + r11 * k(1, 1);
            f += std::norm(t);
          }
          best = std::min(best, f);
        }
      }
    }
    return detail::clamp_fidelity(std::sqrt(best));
  }
  if (n == 3 || n == 4) {
    Rng rng(opts.seed);
    const int samples = std::max(1, opts.samples);
    for (int s = 0; s < samples; ++s) {
      const std::size_t rank = 1 + static_cast<std::size_t>(s) % n;
      const ComplexMatrix g = gaussian_matrix(n, rank, rng);
      ComplexMatrix rho = g * g.adjoint();
      rho *= 1.0 / trace(rho).real();
      best = std::min(best, norm(detail::kraus_traces(ch, rho)));
    }
    return detail::clamp_fidelity(best);
  }
  throw Error(ErrorKind::UnsupportedDimension, "brute force supports n in {2, 3, 4}, got " + std::to_string(n));
}

/// Points of the numerical range W(A) = {<psi|A|psi>}: m values at seeded
/// random states, then for each of m angles phi_k = 2 pi k / m the points
/// of the extreme eigenvectors of Herm(e^{i phi} A). When an extreme
/// eigenvalue is degenerate the eigenspace is resolved along the tangent
/// direction, so both endpoints of a flat edge are reported.
inline std::vector<complex> numerical_range_sample(const ComplexMatrix& a, int m, std::uint64_t seed) {
  if (!a.is_square()) throw Error(ErrorKind::DimensionMismatch, "numerical range needs a square matrix");
  const std::size_t n = a.rows();
  std::vector<complex> points;
  Rng rng(seed);
  for (int i = 0; i < m; ++i) {
    const PureState psi = random_pure_state(n, rng);
    points.push_back(sandwich(psi.amplitudes(), a, psi.amplitudes()));
  }
  const double scale = std::max(1.0, max_abs(a));
  for (int k = 0; k < m; ++k) {
    const double phi = 2.0 * kPi * k / m;
    const complex rot = std::polar(1.0, phi);
    const ComplexMatrix h = hermitian_part(a * rot);
    ComplexMatrix tangent = a * (rot * complex{0.0, -1.0});
    tangent = hermitian_part(tangent);
    const EigenDecomposition e = hermitian_eigen(h, 1e-8);
    const auto extreme_group = [&](std::size_t lo, std::size_t hi) {
      ComplexMatrix vg(n, hi - lo);
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = lo; c < hi; ++c) vg(r, c - lo) = e.vectors(r, c);
      if (hi - lo == 1) {
        const ComplexVector v = vg.column(0);
        points.push_back(sandwich(v, a, v));
        return;
      }
      const EigenDecomposition t = hermitian_eigen(hermitian_part(vg.adjoint() * tangent * vg), 1e-8);
      for (std::size_t c : {std::size_t{0}, hi - lo - 1}) {
        const ComplexVector v = vg * t.vectors.column(c);
        points.push_back(sandwich(v, a, v));
      }
    };
    const double group_tol = 1e-5 * scale;
    std::size_t lo_end = 1;
    while (lo_end < n && e.values[lo_end] - e.values[0] <= group_tol) ++lo_end;
    std::size_t hi_begin = n - 1;
    while (hi_begin > 0 && e.values[n - 1] - e.values[hi_begin - 1] <= group_tol) --hi_begin;
    extreme_group(0, lo_end);
    extreme_group(hi_begin, n);
  }
  return points;
}

}  // namespace qtec
