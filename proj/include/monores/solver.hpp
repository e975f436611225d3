#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "monores/core.hpp"

namespace monores {

/// Tolerances and iteration limits for the two-pole solvers.
///
/// flux_tol is the absolute convergence threshold on interior node fluxes;
/// when zero it is derived as flux_tol_factor times a reference current
/// scale (the current the smallest-mu edge would carry at the full pole
/// voltage), which keeps behaviour invariant under the scaling lemma.
/// bisect_tol bounds the inner root-finding interval; zero derives it as
/// 1e-12 times the pole voltage span.
struct SolveConfig {
  double flux_tol = 0.0;
  double flux_tol_factor = 1e-10;
  double bisect_tol = 0.0;
  long max_sweeps = 100000;
  std::vector<int> sweep_order;  // empty = interior nodes in ascending index
};

/// A solved (or best-effort) two-pole problem. y, y_star and x_star are
/// always the exact images of x under the circuit operations.
struct Solution {
  PotentialVector x;
  std::vector<double> y;
  FlowVector y_star;
  std::vector<double> x_star;
  double pole_current = 0.0;  // y*_{a,b} = x*_a
  double residual = 0.0;      // max interior |flux| at termination
  long sweeps_used = 0;
  double flux_tol_used = 0.0;
  double bisect_tol_used = 0.0;
  // Per-sweep monotonicity diagnostics, cheap enough to always record:
  // interior potentials never decrease, the source flux never increases.
  bool potentials_monotone = true;
  bool pole_flux_monotone = true;
};

class NotConverged : public Error {
 public:
  NotConverged(const std::string& msg, Solution best)
      : Error(msg), best_(std::move(best)) {}
  const Solution& best() const { return best_; }

 private:
  Solution best_;
};

/// Current the minimum-resistance edge would carry at voltage `span`; the
/// natural current unit of a solve with pole gap `span`.
inline double reference_current(const Circuit& c, double span) {
  if (c.edge_count() == 0 || span <= 0.0) return 1.0;
  return conductance_law(span, c.min_mu(), c.r(), c.s());
}

/// Net outgoing current at node v for potentials x. Only edges incident to
/// v are touched.
inline double node_flux(const Circuit& c, const PotentialVector& x, int v) {
  double f = 0.0;
  for (int eid : c.out(v)) {
    const Edge& e = c.edge(eid);
    f += edge_current(c, e, x[static_cast<std::size_t>(v)] - x[static_cast<std::size_t>(e.head)]);
  }
  for (int eid : c.in(v)) {
    const Edge& e = c.edge(eid);
    f -= edge_current(c, e, x[static_cast<std::size_t>(e.tail)] - x[static_cast<std::size_t>(v)]);
  }
  return f;
}

/// Smallest x_v in [x[v], upper] with zero node flux, located by bisection.
/// The flux is continuous and monotone non-decreasing in x_v, so the
/// bracket [flux < 0, flux >= 0] converges to the first zero crossing; if
/// the zero set is an interval this returns its left endpoint to within
/// bisect_tol. The returned point sits on the non-positive-flux side, which
/// keeps the solver iterates sub-solutions; when flux_stop > 0 the bracket
/// is refined further until the returned flux is within flux_stop of zero
/// (the width criterion alone does not bound the flux when the conductance
/// curve is steep, i.e. r < 1 near zero voltage).
inline double node_flux_root(const Circuit& c, const PotentialVector& x, int v,
                             double upper, double bisect_tol, double flux_stop = 0.0) {
  PotentialVector probe = x;
  auto flux_at = [&](double xv) {
    probe[static_cast<std::size_t>(v)] = xv;
    return node_flux(c, probe, v);
  };
  double lo = x[static_cast<std::size_t>(v)];
  double hi = upper;
  if (flux_at(hi) < 0.0)
    throw Error("node_flux_root: flux still negative at the upper bound; "
                "monotone invariant violated");
  double flux_lo = flux_at(lo);
  for (int iter = 0; iter < 200; ++iter) {
    if (hi - lo <= bisect_tol && (flux_stop <= 0.0 || flux_lo >= -flux_stop)) break;
    double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;  // interval at floating-point floor
    double fm = flux_at(mid);
    if (fm < 0.0) {
      lo = mid;
      flux_lo = fm;
    } else {
      hi = mid;
    }
  }
  return lo;
}

namespace detail {

inline Solution assemble_solution(const Circuit& c, PotentialVector x, int a,
                                  int b, long sweeps, double flux_tol,
                                  double bisect_tol) {
  Solution sol;
  sol.y = voltages(c, x);
  sol.y_star = currents(c, sol.y);
  sol.x_star = fluxes(c, sol.y_star);
  sol.x = std::move(x);
  sol.pole_current = sol.x_star[static_cast<std::size_t>(a)];
  sol.sweeps_used = sweeps;
  sol.flux_tol_used = flux_tol;
  sol.bisect_tol_used = bisect_tol;
  double res = 0.0;
  for (int v = 0; v < c.node_count(); ++v) {
    if (v == a || v == b) continue;
    res = std::max(res, std::abs(sol.x_star[static_cast<std::size_t>(v)]));
  }
  sol.residual = res;
  return sol;
}

/// Zero-current convention for xa0 <= xb0 (or a == b): the two-pole law
/// outputs no current for non-positive pole voltage. One representative
/// potential vector is returned: the raw initialisation.
inline Solution convention_solution(const Circuit& c, int a, int, double xa0,
                                    double xb0) {
  PotentialVector x(static_cast<std::size_t>(c.node_count()), xb0);
  x[static_cast<std::size_t>(a)] = xa0;
  Solution sol;
  sol.x = std::move(x);
  sol.y = voltages(c, sol.x);
  sol.y_star.assign(static_cast<std::size_t>(c.edge_count()), 0.0);
  sol.x_star.assign(static_cast<std::size_t>(c.node_count()), 0.0);
  return sol;
}

inline std::vector<int> interior_order(const Circuit& c, int a, int b,
                                       const std::vector<int>& requested) {
  std::vector<int> order;
  if (requested.empty()) {
    for (int v = 0; v < c.node_count(); ++v)
      if (v != a && v != b) order.push_back(v);
    return order;
  }
  std::vector<char> seen(static_cast<std::size_t>(c.node_count()), 0);
  for (int v : requested) {
    if (v < 0 || v >= c.node_count()) throw Error("sweep_order: node index out of range");
    if (v == a || v == b) throw Error("sweep_order: must not contain a pole");
    if (seen[static_cast<std::size_t>(v)]) throw Error("sweep_order: duplicate node");
    seen[static_cast<std::size_t>(v)] = 1;
    order.push_back(v);
  }
  for (int v = 0; v < c.node_count(); ++v)
    if (v != a && v != b && !seen[static_cast<std::size_t>(v)])
      throw Error("sweep_order: missing interior node " + std::to_string(v));
  return order;
}

}  // namespace detail

namespace detail {

/// Largest edge current under the given potentials; the natural absolute
/// scale of a partially solved circuit.
inline double solved_current_scale(const Circuit& c, const PotentialVector& x) {
  double scale = 0.0;
  for (const Edge& e : c.edges())
    scale = std::max(scale, edge_current(c, e, x[static_cast<std::size_t>(e.tail)] -
                                                   x[static_cast<std::size_t>(e.head)]));
  return scale;
}

}  // namespace detail

/// Method of successive approximation: starting from x_a = xa0 and
/// everything else at xb0, cyclically raise each flux-deficient interior
/// node to its zero-flux root until a full sweep moves nothing. Interior
/// potentials are monotone non-decreasing and bounded by xa0, so the
/// iteration converges to a solution of the two-pole problem.
///
/// Two refinements on top of the plain sweep, both preserving the monotone
/// sub-solution invariant (interior fluxes stay non-positive, potentials
/// only rise):
///  - after each sweep the iterate may jump along the direction the sweep
///    just moved, by the largest factor that keeps every interior flux
///    non-positive. The plain sweep advances additively when r is small
///    (each node is anchored to its neighbours' gaps), and the validated
///    jump crosses such plateaus in a few rounds instead of ~1/gap sweeps.
///  - with flux_tol = 0 (auto), the threshold is re-anchored to the current
///    scale actually present in the circuit once a sweep goes clean, and
///    sweeping continues if that tightens it. The a-priori reference (the
///    min-mu edge) overshoots the true current scale exponentially for
///    large s, where the pole current is governed by the weakest edge, not
///    the strongest.
inline Solution msa_solve(const Circuit& c, int a, int b, double xa0,
                          double xb0, const SolveConfig& cfg = {}) {
  if (a < 0 || a >= c.node_count() || b < 0 || b >= c.node_count())
    throw Error("pole index out of range");
  if (a == b) throw Error("poles must be distinct");
  if (xa0 <= xb0) return detail::convention_solution(c, a, b, xa0, xb0);

  const double span = xa0 - xb0;
  const bool adaptive = !(cfg.flux_tol > 0.0);
  double flux_tol =
      cfg.flux_tol > 0.0 ? cfg.flux_tol : cfg.flux_tol_factor * reference_current(c, span);
  const double bisect_tol = cfg.bisect_tol > 0.0 ? cfg.bisect_tol : 1e-12 * span;
  const std::vector<int> order = detail::interior_order(c, a, b, cfg.sweep_order);

  PotentialVector x(static_cast<std::size_t>(c.node_count()), xb0);
  x[static_cast<std::size_t>(a)] = xa0;
  PotentialVector before = x, trial = x;

  bool pole_monotone = true;
  double prev_pole_flux = node_flux(c, x, a);
  long sweeps = 0;
  int phases = 0;
  bool converged = order.empty();
  while (sweeps < cfg.max_sweeps && !converged) {
    ++sweeps;
    before = x;
    bool moved = false;
    for (int v : order) {
      double f = node_flux(c, x, v);
      if (f < -flux_tol) {
        double nx = node_flux_root(c, x, v, xa0, bisect_tol, 0.25 * flux_tol);
        if (nx > x[static_cast<std::size_t>(v)]) {
          x[static_cast<std::size_t>(v)] = nx;
          moved = true;
        }
      }
    }
    double pole_flux = node_flux(c, x, a);
    if (pole_flux > prev_pole_flux + flux_tol) pole_monotone = false;
    prev_pole_flux = pole_flux;

    if (!moved) {
      if (adaptive) {
        double scale = detail::solved_current_scale(c, x);
        double tightened = cfg.flux_tol_factor * scale;
        if (scale > 0.0 && tightened < 0.5 * flux_tol && phases < 8) {
          flux_tol = tightened;
          ++phases;
          continue;
        }
      }
      converged = true;
      break;
    }

    // Plateau jump: scale up this sweep's displacement while the iterate
    // stays a sub-solution. Tiny positive slack covers evaluation noise.
    double cap = std::numeric_limits<double>::infinity();
    bool any = false;
    for (int v : order) {
      auto i = static_cast<std::size_t>(v);
      double dv = x[i] - before[i];
      if (dv > 0.0) {
        any = true;
        cap = std::min(cap, (xa0 - x[i]) / dv);
      }
    }
    if (!any || !(cap > 1.0)) continue;
    cap *= 1.0 - 1e-12;
    const double slack = 1e-4 * flux_tol;
    auto subsolution_at = [&](double theta) {
      trial = x;
      for (int v : order) {
        auto i = static_cast<std::size_t>(v);
        trial[i] = x[i] + theta * (x[i] - before[i]);
      }
      for (int v : order)
        if (node_flux(c, trial, v) > slack) return false;
      return true;
    };
    double best = 0.0;
    for (double theta = 1.0; theta < 1e12; theta *= 2.0) {
      double t = std::min(theta, cap);
      if (!subsolution_at(t)) break;
      best = t;
      if (t >= cap) break;
    }
    if (best > 0.0) {
      for (int v : order) {
        auto i = static_cast<std::size_t>(v);
        x[i] += best * (x[i] - before[i]);
      }
    }
  }

  Solution sol = detail::assemble_solution(c, std::move(x), a, b, sweeps, flux_tol, bisect_tol);
  sol.pole_flux_monotone = pole_monotone;
  // Potentials only ever move upward by construction.
  sol.potentials_monotone = true;
  if (!converged)
    throw NotConverged("msa_solve: " + std::to_string(cfg.max_sweeps) +
                           " sweeps exhausted, residual " + std::to_string(sol.residual),
                       sol);
  return sol;
}

/// Scaling lemma check: (c x, c y, c^r y*, c^r x*) must satisfy the voltage,
/// law and flux equations whenever (x, y, y*, x*) does.
inline bool scaling_check(const Circuit& circ, const Solution& sol, double factor,
                          double tol = 1e-9) {
  if (!(factor > 0.0)) throw Error("scaling factor must be positive");
  const double cr = std::pow(factor, circ.r());
  PotentialVector xs(sol.x.size());
  for (std::size_t i = 0; i < sol.x.size(); ++i) xs[i] = factor * sol.x[i];
  std::vector<double> ys = voltages(circ, xs);
  FlowVector ys_star(sol.y_star.size());
  for (std::size_t i = 0; i < sol.y_star.size(); ++i) ys_star[i] = cr * sol.y_star[i];
  std::vector<double> xs_star = fluxes(circ, ys_star);

  auto rel_ok = [tol](double got, double want, double scale) {
    return std::abs(got - want) <= tol * std::max({std::abs(want), scale, 1e-300});
  };
  double vscale = 0.0, iscale = 0.0, fscale = 0.0;
  for (double v : ys) vscale = std::max(vscale, std::abs(v));
  for (double v : ys_star) iscale = std::max(iscale, std::abs(v));
  for (double v : xs_star) fscale = std::max(fscale, std::abs(v));

  for (const Edge& e : circ.edges()) {
    auto i = static_cast<std::size_t>(e.id);
    if (!rel_ok(ys[i], factor * sol.y[i], vscale)) return false;
    if (!rel_ok(edge_current(circ, e, ys[i]), ys_star[i], iscale)) return false;
  }
  for (int v = 0; v < circ.node_count(); ++v) {
    auto i = static_cast<std::size_t>(v);
    if (!rel_ok(xs_star[i], cr * sol.x_star[i], fscale)) return false;
  }
  return true;
}

}  // namespace monores
