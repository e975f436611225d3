#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "monores/core.hpp"
#include "monores/solver.hpp"

namespace monores {

/// Joule-Lenz heat of one edge as a function of its current:
///   mu^{s/r} / (1 + 1/r) * current^{1 + 1/r},
/// the integral of the inverse conductance law. Strictly convex on
/// current >= 0.
inline double edge_heat(const Circuit& c, const Edge& e, double current) {
  if (current < 0.0) throw Error("edge_heat: negative current");
  if (current == 0.0) return 0.0;
  const double expo = 1.0 + 1.0 / c.r();
  return std::pow(e.mu, c.s() / c.r()) / expo * std::pow(current, expo);
}

/// Total heat dissipated by a flow.
inline double total_heat(const Circuit& c, const FlowVector& y_star) {
  if (static_cast<int>(y_star.size()) != c.edge_count())
    throw Error("flow vector has wrong dimension");
  double h = 0.0;
  for (const Edge& e : c.edges()) h += edge_heat(c, e, y_star[static_cast<std::size_t>(e.id)]);
  return h;
}

struct EnergyReport {
  double total_heat = 0.0;
  std::vector<double> per_edge_heat;
  double gradient_norm = 0.0;  // max interior |flux| at termination
};

inline EnergyReport energy_report(const Circuit& c, const Solution& sol) {
  EnergyReport rep;
  rep.per_edge_heat.reserve(sol.y_star.size());
  for (const Edge& e : c.edges())
    rep.per_edge_heat.push_back(edge_heat(c, e, sol.y_star[static_cast<std::size_t>(e.id)]));
  for (double h : rep.per_edge_heat) rep.total_heat += h;
  rep.gradient_norm = sol.residual;
  return rep;
}

/// Potential-side energy (co-content)
///   E(x) = sum_e (x_tail - x_head)_+^{r+1} / ((r+1) mu_e^s).
/// Its partial derivative at node v is exactly the flux x*_v, so
/// stationarity over interior potentials is the first Kirchhoff law. The
/// exponent r+1 keeps E differentiable for every r > 0; the current-side
/// functional has unbounded curvature at zero when r < 1, which is why all
/// optimisation happens on this side.
inline double co_content(const Circuit& c, const PotentialVector& x) {
  if (static_cast<int>(x.size()) != c.node_count())
    throw Error("potential vector has wrong dimension");
  const double expo = c.r() + 1.0;
  double total = 0.0;
  for (const Edge& e : c.edges()) {
    double y = x[static_cast<std::size_t>(e.tail)] - x[static_cast<std::size_t>(e.head)];
    if (y <= 0.0) continue;
    total += std::pow(y, expo) / (expo * std::pow(e.mu, c.s()));
  }
  return total;
}

/// Convex-minimisation counterpart of msa_solve: descent on the co-content
/// over interior potentials. Each iteration backtracks along the negative
/// gradient (halving from step 1, Armijo constant 1e-4); once energy
/// differences fall below what doubles can resolve the step comes from
/// bisecting the directional derivative instead, which is a pure sign test
/// on fluxes and has no such floor. Same Solution contract as msa_solve;
/// used to cross-validate currents, which are unique even when potentials
/// are not. The auto flux tolerance re-anchors to the solved current scale
/// exactly as in msa_solve.
inline Solution energy_solve(const Circuit& c, int a, int b, double xa0,
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

  std::vector<int> interior;
  for (int v = 0; v < c.node_count(); ++v)
    if (v != a && v != b) interior.push_back(v);

  PotentialVector x(static_cast<std::size_t>(c.node_count()), xb0);
  x[static_cast<std::size_t>(a)] = xa0;

  const long max_iters = cfg.max_sweeps;
  double energy = co_content(c, x);
  long iter = 0;
  int phases = 0;
  bool converged = interior.empty();
  PotentialVector trial = x;
  std::vector<double> grad(interior.size());

  auto move_to = [&](double step) {
    trial = x;
    for (std::size_t k = 0; k < interior.size(); ++k)
      trial[static_cast<std::size_t>(interior[k])] =
          x[static_cast<std::size_t>(interior[k])] - step * grad[k];
  };
  // phi'(step) = d/dstep E(x - step g) = -<flux(x - step g), g> on the
  // interior block; convex in step, so non-decreasing.
  auto directional = [&](double step) {
    move_to(step);
    double d = 0.0;
    for (std::size_t k = 0; k < interior.size(); ++k)
      d -= node_flux(c, trial, interior[k]) * grad[k];
    return d;
  };

  while (iter < max_iters && !converged) {
    ++iter;
    double grad_sq = 0.0;
    double grad_max = 0.0;
    for (std::size_t k = 0; k < interior.size(); ++k) {
      grad[k] = node_flux(c, x, interior[k]);
      grad_sq += grad[k] * grad[k];
      grad_max = std::max(grad_max, std::abs(grad[k]));
    }
    if (grad_max <= flux_tol) {
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

    double step = 1.0;
    bool accepted = false;
    while (step > 1e-30) {
      move_to(step);
      double trial_energy = co_content(c, trial);
      if (trial_energy <= energy - 1e-4 * step * grad_sq) {
        x = trial;
        energy = trial_energy;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // Exact line search by sign bisection of phi'.
      double hi = 1.0;
      int grow = 0;
      while (directional(hi) < 0.0 && ++grow < 60) hi *= 2.0;
      double lo = 0.0;
      for (int i = 0; i < 120 && hi - lo > 0.0; ++i) {
        double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) break;
        if (directional(mid) < 0.0)
          lo = mid;
        else
          hi = mid;
      }
      if (lo <= 0.0) break;  // no representable progress along the gradient
      move_to(lo);
      x = trial;
      energy = co_content(c, x);
    }
  }

  Solution sol = detail::assemble_solution(c, std::move(x), a, b, iter, flux_tol, bisect_tol);
  if (!converged && sol.residual > flux_tol)
    throw NotConverged("energy_solve: stalled at residual " + std::to_string(sol.residual), sol);
  return sol;
}

/// Minimum-dissipation certificate: `optimal` must not dissipate more than
/// any feasible competitor. Both flows must satisfy the prescribed node
/// fluxes; a conservation-violating candidate is an error that names the
/// offending nodes.
inline bool dissipation_certificate(const Circuit& c, const FlowVector& candidate,
                                    const FlowVector& optimal,
                                    const std::vector<double>& boundary,
                                    double flux_tol = 1e-9) {
  if (static_cast<int>(boundary.size()) != c.node_count())
    throw Error("boundary vector has wrong dimension");
  auto check_feasible = [&](const FlowVector& flow, const char* which) {
    std::vector<double> f = fluxes(c, flow);
    std::string bad;
    for (int v = 0; v < c.node_count(); ++v) {
      double gap = f[static_cast<std::size_t>(v)] - boundary[static_cast<std::size_t>(v)];
      if (std::abs(gap) > flux_tol)
        bad += (bad.empty() ? "" : ", ") + c.label(v) + " (" + std::to_string(gap) + ")";
    }
    if (!bad.empty())
      throw Error(std::string(which) + " flow violates conservation at: " + bad);
  };
  check_feasible(candidate, "candidate");
  check_feasible(optimal, "optimal");
  double fc = total_heat(c, candidate);
  double fo = total_heat(c, optimal);
  return fo <= fc + 1e-9 * fc;
}

}  // namespace monores
