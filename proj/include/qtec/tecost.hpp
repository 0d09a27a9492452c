#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qtec/channels.hpp"
#include "qtec/eigen.hpp"
#include "qtec/random.hpp"

namespace qtec {

enum class CostRegime { Positive, Boundary, NonPositive };

inline std::string_view to_string(CostRegime r) {
  switch (r) {
    case CostRegime::Positive: return "Positive";
    case CostRegime::Boundary: return "Boundary";
    case CostRegime::NonPositive: return "NonPositive";
  }
  return "Unknown";
}

struct CostOptions {
  int iters = 20000;         // supergradient ascent iterations
  int restarts = 64;         // sphere multistart runs when the ball optimum is ~0
  double step_c = 1.0;       // step size c / sqrt(k)
  double tol = 1e-10;        // interior-point duality-gap target
  std::uint64_t seed = 0;
  double hbar = 1.0;
  double regime_tol = 1e-9;
  int sphere_iters = 200;    // ascent steps per sphere restart
  int polish_iters = 50;     // alternating steps per sphere restart
  int slice_candidates = 4;  // best sphere starts refined by slice steps
  int slice_steps = 20;
  double slice_radius = 10.0;
};

/// Time-energy cost of a channel: angle = arccos(cos_value) where
/// cos_value = max over unit v of lambda_min((K_v + K_v^dagger) / 2).
/// `certificate_gap` bounds how far max(cos_value, 0) may sit below the
/// ball optimum (interior-point upper estimate minus the clamped value).
struct TECostResult {
  double cos_value = 0.0;
  double angle = 0.0;
  ComplexVector optimal_v;
  PureState witness;
  bool converged = false;
  CostRegime regime = CostRegime::Positive;
  double certificate_gap = 0.0;
  double ascent_value = 0.0;
  int newton_steps = 0;
  double time_energy = 0.0;  // angle * hbar
};

/// (lambda_min, eigenvector) of Herm(K_v) for any coefficient vector v.
inline std::pair<double, PureState> combination_min_eigenpair(const KrausChannel& ch,
                                                              std::span<const complex> v) {
  return min_eigenpair(hermitian_part(kraus_linear_combination(ch, v)), 1e-8);
}

/// g(v) = lambda_min(Herm(K_v)); concave and positively homogeneous in v.
inline double combination_lambda_min(const KrausChannel& ch, std::span<const complex> v) {
  return hermitian_eigen(hermitian_part(kraus_linear_combination(ch, v)), 1e-8).values.front();
}

/// Supergradient of g at v: conj(<psi|K_j|psi>) for a minimizing eigenvector psi.
inline ComplexVector cost_supergradient(const KrausChannel& ch, const PureState& psi) {
  ComplexVector s(ch.d());
  for (std::size_t j = 0; j < ch.d(); ++j)
    s[j] = std::conj(sandwich(psi.amplitudes(), ch[j], psi.amplitudes()));
  return s;
}

namespace detail {

struct Candidate {
  ComplexVector v;
  double value = -std::numeric_limits<double>::infinity();
};

inline void keep_better(Candidate& best, std::span<const complex> v, double value) {
  if (value > best.value + 1e-12 || best.v.empty()) {
    best.v.assign(v.begin(), v.end());
    best.value = value;
  }
}

// Projected supergradient ascent on the unit ball, step c / sqrt(k); the
// best of the iterates and their running average is returned.
inline Candidate supergradient_ascent(const KrausChannel& ch, const CostOptions& opts) {
  const std::size_t d = ch.d();
  ComplexVector v(d), avg(d);
  Candidate best;
  keep_better(best, v, 0.0);
  const int iters = std::max(0, opts.iters);
  for (int k = 1; k <= iters; ++k) {
    auto [g, psi] = combination_min_eigenpair(ch, v);
    keep_better(best, v, g);
    const ComplexVector s = cost_supergradient(ch, psi);
    const double step = opts.step_c / std::sqrt(static_cast<double>(k));
    for (std::size_t j = 0; j < d; ++j) v[j] += step * s[j];
    const double nrm = norm(v);
    if (nrm > 1.0)
      for (auto& z : v) z /= nrm;
    for (std::size_t j = 0; j < d; ++j) avg[j] += v[j];
  }
  if (iters > 0) {
    for (auto& z : avg) z /= static_cast<double>(iters);
    keep_better(best, avg, combination_lambda_min(ch, avg));
  }
  return best;
}

// Dense solve by Gaussian elimination with partial pivoting.
inline std::vector<double> solve_linear(std::vector<double> a, std::vector<double> b) {
  const std::size_t m = b.size();
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < m; ++r)
      if (std::abs(a[r * m + col]) > std::abs(a[piv * m + col])) piv = r;
    if (a[piv * m + col] == 0.0) throw Error(ErrorKind::NoConvergence, "singular Newton system");
    if (piv != col) {
      for (std::size_t c = 0; c < m; ++c) std::swap(a[col * m + c], a[piv * m + c]);
      std::swap(b[col], b[piv]);
    }
    for (std::size_t r = col + 1; r < m; ++r) {
      const double f = a[r * m + col] / a[col * m + col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < m; ++c) a[r * m + c] -= f * a[col * m + c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(m);
  for (std::size_t r = m; r-- > 0;) {
    double acc = b[r];
    for (std::size_t c = r + 1; c < m; ++c) acc -= a[r * m + c] * x[c];
    x[r] = acc / a[r * m + r];
  }
  return x;
}

// max t  s.t.  offset + sum_k y_k basis_k - t I > 0,  |y| < radius.
struct LmiProblem {
  ComplexMatrix offset;
  std::vector<ComplexMatrix> basis;
  double radius = 1.0;
};

struct LmiSolution {
  std::vector<double> y;
  double lower = 0.0;  // t at exit; t < lambda_min(F(y))
  double upper = 0.0;  // t + (n + 1) / s, the central-path gap estimate
  int newton_steps = 0;
  bool converged = false;
};

// Directions of y that leave F unchanged only feel the ball term, so their
// optimal component is zero; returns an orthonormal basis (as columns) of
// the complement of the null space of y -> sum_k y_k basis_k.
inline std::vector<std::vector<double>> effective_directions(const std::vector<ComplexMatrix>& basis) {
  const std::size_t nv = basis.size();
  ComplexMatrix gram(nv, nv);
  for (std::size_t k = 0; k < nv; ++k)
    for (std::size_t q = 0; q <= k; ++q) gram(k, q) = gram(q, k) = trace_product(basis[k], basis[q]).real();
  const EigenDecomposition e = hermitian_eigen(gram, 1e-8);
  const double top = e.values.empty() ? 0.0 : std::max(0.0, e.values.back());
  std::vector<std::vector<double>> dirs;
  for (std::size_t i = 0; i < nv; ++i) {
    if (!(e.values[i] > 1e-12 * top)) continue;
    std::vector<double> col(nv);
    // Real symmetric input: a real eigenvector up to a global phase.
    std::size_t piv = 0;
    for (std::size_t k = 0; k < nv; ++k)
      if (std::abs(e.vectors(k, i)) > std::abs(e.vectors(piv, i))) piv = k;
    const complex phase = std::conj(e.vectors(piv, i)) / std::abs(e.vectors(piv, i));
    double nrm = 0.0;
    for (std::size_t k = 0; k < nv; ++k) {
      col[k] = (e.vectors(k, i) * phase).real();
      nrm += col[k] * col[k];
    }
    for (auto& z : col) z /= std::sqrt(nrm);
    dirs.push_back(std::move(col));
  }
  return dirs;
}

// Log-barrier interior-point method with damped Newton centering.
inline LmiSolution maximize_min_eigenvalue(const LmiProblem& raw, double gap_tol) {
  const std::vector<std::vector<double>> dirs = effective_directions(raw.basis);
  LmiProblem prob{raw.offset, {}, raw.radius};
  for (const auto& dir : dirs) {
    ComplexMatrix b(raw.offset.rows(), raw.offset.cols());
    for (std::size_t k = 0; k < dir.size(); ++k) b += raw.basis[k] * complex{dir[k]};
    prob.basis.push_back(std::move(b));
  }
  const std::size_t n = prob.offset.rows(), nv = prob.basis.size(), m = nv + 1;
  const double r2max = prob.radius * prob.radius;
  const auto assemble = [&](const std::vector<double>& x) {
    ComplexMatrix f = prob.offset;
    for (std::size_t i = 0; i < n; ++i) f(i, i) -= x[nv];
    for (std::size_t k = 0; k < nv; ++k) {
      if (x[k] == 0.0) continue;
      const auto src = prob.basis[k].data();
      auto dst = f.data();
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += x[k] * src[i];
    }
    return f;
  };
  const auto radius2 = [&](const std::vector<double>& x) {
    double r2 = 0.0;
    for (std::size_t k = 0; k < nv; ++k) r2 += x[k] * x[k];
    return r2;
  };
  const auto objective = [&](const std::vector<double>& x, double s) -> std::optional<double> {
    const double slack = r2max - radius2(x);
    if (!(slack > 0.0)) return std::nullopt;
    const auto l = cholesky(assemble(x));
    if (!l) return std::nullopt;
    double logdet = 0.0;
    for (std::size_t i = 0; i < n; ++i) logdet += 2.0 * std::log((*l)(i, i).real());
    return -s * x[nv] - logdet - std::log(slack);
  };

  std::vector<double> x(m, 0.0);
  x[nv] = hermitian_eigen(prob.offset, 1e-8).values.front() - 1.0;
  const double barrier_weight = static_cast<double>(n + 1);
  double s = 1.0;
  LmiSolution out;
  for (int outer = 0; outer < 60; ++outer) {
    for (int inner_it = 0; inner_it < 200; ++inner_it) {
      const auto l = cholesky(assemble(x));
      if (!l) break;
      const ComplexMatrix finv = cholesky_inverse(*l);
      std::vector<ComplexMatrix> p;
      p.reserve(nv);
      for (std::size_t k = 0; k < nv; ++k) p.push_back(finv * prob.basis[k]);
      const double slack = r2max - radius2(x);

      // Gradient and Hessian of -s t - log det F - log(r^2 - |y|^2).
      std::vector<double> grad(m, 0.0), hess(m * m, 0.0);
      for (std::size_t k = 0; k < nv; ++k) {
        grad[k] = -trace(p[k]).real() + 2.0 * x[k] / slack;
        for (std::size_t q = 0; q <= k; ++q) {
          double h = trace_product(p[k], p[q]).real();
          h += 4.0 * x[k] * x[q] / (slack * slack);
          if (q == k) h += 2.0 / slack;
          hess[k * m + q] = hess[q * m + k] = h;
        }
        const double ht = -trace_product(p[k], finv).real();  // dF/dt = -I
        hess[k * m + nv] = hess[nv * m + k] = ht;
      }
      grad[nv] = -s + trace(finv).real();
      hess[nv * m + nv] = trace_product(finv, finv).real();

      std::vector<double> rhs(m);
      for (std::size_t k = 0; k < m; ++k) rhs[k] = -grad[k];
      const std::vector<double> dx = solve_linear(hess, rhs);
      double decrement = 0.0;
      for (std::size_t k = 0; k < m; ++k) decrement -= grad[k] * dx[k];
      ++out.newton_steps;
      if (decrement / 2.0 <= 1e-14) break;

      const double f0 = *objective(x, s);
      double step = 1.0;
      bool moved = false;
      while (step > 1e-16) {
        std::vector<double> trial(m);
        for (std::size_t k = 0; k < m; ++k) trial[k] = x[k] + step * dx[k];
        const auto f1 = objective(trial, s);
        if (f1 && *f1 <= f0 - 0.25 * step * decrement) {
          x = std::move(trial);
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
    if (barrier_weight / s <= gap_tol) {
      out.converged = true;
      break;
    }
    s *= 10.0;
  }
  out.lower = x[nv];
  out.upper = x[nv] + barrier_weight / s;
  out.y.assign(raw.basis.size(), 0.0);
  for (std::size_t i = 0; i < nv; ++i)
    for (std::size_t k = 0; k < out.y.size(); ++k) out.y[k] += x[i] * dirs[i][k];
  return out;
}

// Herm(K_j) and Herm(i K_j): g is linear in (Re v_j, Im v_j) through these.
inline std::vector<ComplexMatrix> real_coordinate_basis(const KrausChannel& ch) {
  std::vector<ComplexMatrix> basis;
  basis.reserve(2 * ch.d());
  for (std::size_t j = 0; j < ch.d(); ++j) {
    basis.push_back(hermitian_part(ch[j]));
    basis.push_back(hermitian_part(ch[j] * complex{0.0, 1.0}));
  }
  return basis;
}

inline ComplexVector to_complex(std::span<const double> x) {
  ComplexVector v(x.size() / 2);
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = {x[2 * j], x[2 * j + 1]};
  return v;
}

struct BallOutcome {
  ComplexVector v;
  LmiSolution lmi;
};

// The ball problem max_{|v| <= 1} g(v) as an LMI in the real coordinates of v.
inline BallOutcome barrier_refine(const KrausChannel& ch, const CostOptions& opts) {
  LmiProblem prob{ComplexMatrix(ch.n(), ch.n()), real_coordinate_basis(ch), 1.0};
  LmiSolution sol = maximize_min_eigenvalue(prob, opts.tol);
  ComplexVector v = to_complex(sol.y);
  return {std::move(v), std::move(sol)};
}

inline ComplexVector normalized(ComplexVector v) {
  const double nrm = norm(v);
  if (nrm > 0.0)
    for (auto& z : v) z /= nrm;
  return v;
}

// One slice step from a unit v0: maximize g over the affine slice
// Re<v0, v> = 1 (within |v| <= radius) and renormalize. Since |v| >= 1 on
// the slice, g never decreases when the slice optimum is non-positive.
inline ComplexVector slice_step(const KrausChannel& ch, const std::vector<ComplexMatrix>& coord_basis,
                                std::span<const complex> v0, double radius, double gap_tol) {
  const std::size_t m = 2 * v0.size();
  std::vector<double> x0(m);
  for (std::size_t j = 0; j < v0.size(); ++j) {
    x0[2 * j] = v0[j].real();
    x0[2 * j + 1] = v0[j].imag();
  }
  // Orthonormal basis of the real complement of x0.
  std::vector<std::vector<double>> comp;
  for (std::size_t e = 0; e < m && comp.size() + 1 < m; ++e) {
    std::vector<double> u(m, 0.0);
    u[e] = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      double dot = 0.0;
      for (std::size_t k = 0; k < m; ++k) dot += u[k] * x0[k];
      for (std::size_t k = 0; k < m; ++k) u[k] -= dot * x0[k];
      for (const auto& c : comp) {
        double dc = 0.0;
        for (std::size_t k = 0; k < m; ++k) dc += u[k] * c[k];
        for (std::size_t k = 0; k < m; ++k) u[k] -= dc * c[k];
      }
    }
    double nrm = 0.0;
    for (double z : u) nrm += z * z;
    nrm = std::sqrt(nrm);
    if (nrm < 1e-6) continue;
    for (auto& z : u) z /= nrm;
    comp.push_back(std::move(u));
  }
  const auto combine = [&](const std::vector<double>& coeff) {
    ComplexMatrix out(ch.n(), ch.n());
    for (std::size_t k = 0; k < m; ++k) {
      if (coeff[k] == 0.0) continue;
      const auto src = coord_basis[k].data();
      auto dst = out.data();
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += coeff[k] * src[i];
    }
    return out;
  };
  LmiProblem prob{combine(x0), {}, std::sqrt(radius * radius - 1.0)};
  for (const auto& c : comp) prob.basis.push_back(combine(c));
  const LmiSolution sol = maximize_min_eigenvalue(prob, gap_tol);
  std::vector<double> x = x0;
  for (std::size_t k = 0; k < comp.size(); ++k)
    for (std::size_t i = 0; i < m; ++i) x[i] += sol.y[k] * comp[k][i];
  return normalized(to_complex(x));
}

// Best-effort maximization of g on the unit sphere (nonconvex when the
// optimum is not positive). Seeded starts run projected supergradient
// steps and an alternating polish (psi -> v = conj(c)/|c| -> psi_min); the
// best few are then refined by repeated slice steps.
inline Candidate sphere_multistart(const KrausChannel& ch, const CostOptions& opts) {
  const std::size_t d = ch.d();
  std::vector<Candidate> starts;
  for (int r = 0; r < std::max(1, opts.restarts); ++r) {
    Rng rng(opts.seed ^ 0x5EEDC057ULL, static_cast<std::uint64_t>(r));
    ComplexVector v(d);
    for (auto& z : v) z = rng.complex_normal();
    v = normalized(std::move(v));
    Candidate local;
    for (int k = 1; k <= opts.sphere_iters; ++k) {
      auto [g, psi] = combination_min_eigenpair(ch, v);
      keep_better(local, v, g);
      ComplexVector s = cost_supergradient(ch, psi);
      const double radial = inner(v, s).real();
      for (std::size_t j = 0; j < d; ++j) s[j] -= radial * v[j];
      const double step = opts.step_c / std::sqrt(static_cast<double>(k));
      for (std::size_t j = 0; j < d; ++j) v[j] += step * s[j];
      v = normalized(std::move(v));
    }
    v = local.v;
    for (int k = 0; k < opts.polish_iters; ++k) {
      auto [g, psi] = combination_min_eigenpair(ch, v);
      keep_better(local, v, g);
      ComplexVector c = cost_supergradient(ch, psi);
      if (norm(c) < 1e-14) break;
      v = normalized(std::move(c));
    }
    keep_better(local, v, combination_lambda_min(ch, v));
    starts.push_back(std::move(local));
  }
  // Stable so equal values keep restart order.
  std::stable_sort(starts.begin(), starts.end(),
                   [](const Candidate& a, const Candidate& b) { return a.value > b.value + 1e-12; });

  const std::vector<ComplexMatrix> coord_basis = real_coordinate_basis(ch);
  Candidate best = starts.front();
  const std::size_t refine =
      std::min(starts.size(), static_cast<std::size_t>(std::max(0, opts.slice_candidates)));
  for (std::size_t i = 0; i < refine; ++i) {
    Candidate cur = starts[i];
    for (int step = 0; step < opts.slice_steps; ++step) {
      ComplexVector next = slice_step(ch, coord_basis, cur.v, opts.slice_radius, opts.tol);
      const double g = combination_lambda_min(ch, next);
      if (!(g > cur.value + 1e-13)) break;
      cur.v = std::move(next);
      cur.value = g;
    }
    if (cur.value > best.value + 1e-12) best = std::move(cur);
  }
  return best;
}

}  // namespace detail

/// Solves max over |v| <= 1 of g(v) = lambda_min(Herm(sum_j v_j K_j)).
/// Supergradient ascent and an interior-point refinement both run on the
/// ball; by homogeneity a positive optimum sits on the sphere. When the
/// ball optimum is ~0 the sphere problem is searched by multistart and the
/// result is best-effort (only max(cos_value, 0) = 0 is then exact).
inline TECostResult channel_cost(const KrausChannel& ch, const CostOptions& opts = {}) {
  const detail::Candidate ascent = detail::supergradient_ascent(ch, opts);
  const detail::BallOutcome barrier = detail::barrier_refine(ch, opts);

  detail::Candidate best;
  for (const ComplexVector* v : {&barrier.v, &ascent.v}) {
    if (norm(*v) == 0.0) continue;
    const ComplexVector unit = detail::normalized(*v);
    detail::keep_better(best, unit, combination_lambda_min(ch, unit));
  }

  CostRegime regime = CostRegime::Positive;
  if (best.v.empty() || best.value <= opts.regime_tol) {
    const detail::Candidate sphere = detail::sphere_multistart(ch, opts);
    if (best.v.empty() || sphere.value > best.value) best = sphere;
    if (best.value > opts.regime_tol)
      regime = CostRegime::Positive;
    else if (best.value >= -opts.regime_tol)
      regime = CostRegime::Boundary;
    else
      regime = CostRegime::NonPositive;
  }

  auto [lambda, witness] = combination_min_eigenpair(ch, best.v);
  const double cos_value = std::clamp(lambda, -1.0, 1.0);
  const double angle = std::acos(cos_value);
  return TECostResult{cos_value,
                      angle,
                      best.v,
                      witness.gauge_fixed(),
                      barrier.lmi.converged,
                      regime,
                      std::max(0.0, barrier.lmi.upper - std::max(cos_value, 0.0)),
                      ascent.value,
                      barrier.lmi.newton_steps,
                      angle * opts.hbar};
}

/// max_j |theta_j| over the eigen-angles of U.
inline double unitary_cost(const ComplexMatrix& u, double tol = kDefaultTol) {
  const AngleList angles = unitary_eigenangles(u, tol);
  double best = 0.0;
  for (double a : angles) best = std::max(best, std::abs(a));
  return best;
}

/// (theta_max - theta_min) / 2 when every |theta_j| <= pi/2; otherwise the
/// general solver on the unitary channel.
inline double unitary_channel_cost(const ComplexMatrix& u, const CostOptions& opts = {},
                                   double tol = kDefaultTol) {
  const AngleList angles = unitary_eigenangles(u, tol);
  const bool inside = std::all_of(angles.begin(), angles.end(),
                                  [](double a) { return std::abs(a) <= kPi / 2.0 + 1e-12; });
  if (inside) return (angles.back() - angles.front()) / 2.0;
  return channel_cost(unitary_channel(u), opts).angle;
}

inline double depolarizing_fmin_closed_form(std::size_t n, double q) {
  require_depolarizing_range(n, q);
  const double n2 = static_cast<double>(n * n);
  return std::sqrt(std::max(0.0, q + (1.0 - q) / n2));
}

/// arccos sqrt(q + (1 - q) / n^2)
inline double depolarizing_cost_closed_form(std::size_t n, double q) {
  return std::acos(std::min(1.0, depolarizing_fmin_closed_form(n, q)));
}

}  // namespace qtec
