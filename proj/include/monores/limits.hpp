#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "monores/core.hpp"
#include "monores/oracles.hpp"
#include "monores/resistance.hpp"
#include "monores/rng.hpp"
#include "monores/solver.hpp"

namespace monores {

/// Parameter curves (r(t), s(t)): the fixed Ohm point plus the three arrows
/// toward the classical limit regimes.
enum class LimitMode {
  Ohm,           // r = s = 1 for all t
  ShortestPath,  // r = s = t
  Bottleneck,    // r = 1, s = t
  MaxFlow,       // r = 1/t, s = 1
};

inline const char* limit_mode_name(LimitMode m) {
  switch (m) {
    case LimitMode::Ohm: return "ohm";
    case LimitMode::ShortestPath: return "shortest";
    case LimitMode::Bottleneck: return "bottleneck";
    case LimitMode::MaxFlow: return "maxflow";
  }
  return "?";
}

inline LimitMode limit_mode_from_name(const std::string& name) {
  if (name == "ohm") return LimitMode::Ohm;
  if (name == "shortest") return LimitMode::ShortestPath;
  if (name == "bottleneck") return LimitMode::Bottleneck;
  if (name == "maxflow") return LimitMode::MaxFlow;
  throw Error("unknown limit mode '" + name + "'");
}

inline std::pair<double, double> limit_mode_exponents(LimitMode m, double t) {
  switch (m) {
    case LimitMode::Ohm: return {1.0, 1.0};
    case LimitMode::ShortestPath: return {t, t};
    case LimitMode::Bottleneck: return {1.0, t};
    case LimitMode::MaxFlow: return {1.0 / t, 1.0};
  }
  throw Error("bad limit mode");
}

/// The classical distance a mode's trajectory converges to.
inline ExtResistance limit_oracle(const Circuit& c, int a, int b, LimitMode mode,
                                  const SolveConfig& cfg = {}) {
  if (a == b) return ExtResistance::zero();
  switch (mode) {
    case LimitMode::Ohm:
      return effective_resistance(c.with_exponents(1.0, 1.0), a, b, cfg);
    case LimitMode::ShortestPath:
      return shortest_path_length(c, a, b);
    case LimitMode::Bottleneck:
      return widest_bottleneck(c, a, b);
    case LimitMode::MaxFlow: {
      if (!reachable(c, a, b)) return ExtResistance::infinite();
      return ExtResistance::finite(1.0 / max_flow(c, a, b).value);
    }
  }
  throw Error("bad limit mode");
}

struct SweepRow {
  double t = 0.0, r = 0.0, s = 0.0;
  bool converged = false;
  ExtResistance mu;          // valid when converged
  double rel_error = -1.0;   // vs oracle; < 0 when not comparable
  long sweeps = 0;
  double residual = 0.0;
};

struct SweepReport {
  LimitMode mode = LimitMode::Ohm;
  int a = 0, b = 0;
  ExtResistance oracle;
  bool mu_clamped = false;
  std::vector<SweepRow> rows;
};

/// mu values outside [1/4, 4] are clamped before a large-exponent sweep:
/// at s = 64 a mu of 4 already spans 4^64 ~ 1e38, the edge of double
/// range, and anything wider overflows intermediates.
inline Circuit clamp_for_sweep(const Circuit& c, bool* any_clamped = nullptr) {
  std::vector<Edge> es = c.edges();
  bool clamped = false;
  for (Edge& e : es) {
    double m = std::clamp(e.mu, 0.25, 4.0);
    clamped = clamped || m != e.mu;
    e.mu = m;
  }
  if (any_clamped) *any_clamped = clamped;
  return Circuit(c.labels(), std::move(es), c.r(), c.s());
}

/// Resistance trajectory mu_{a,b}(t) for a parameter curve, with the
/// matching classical oracle and per-t diagnostics. A non-converged t is
/// recorded and the sweep continues.
inline SweepReport sweep(const Circuit& circuit, int a, int b, LimitMode mode,
                         const std::vector<double>& t_values, const SolveConfig& cfg = {}) {
  for (std::size_t i = 0; i < t_values.size(); ++i) {
    if (t_values[i] < 1.0) throw Error("t values must be >= 1");
    if (i > 0 && t_values[i] <= t_values[i - 1]) throw Error("t values must be ascending");
  }
  SweepReport rep;
  rep.mode = mode;
  rep.a = a;
  rep.b = b;
  Circuit base = mode == LimitMode::Ohm ? circuit : clamp_for_sweep(circuit, &rep.mu_clamped);
  rep.oracle = limit_oracle(base, a, b, mode, cfg);

  for (double t : t_values) {
    auto [r, s] = limit_mode_exponents(mode, t);
    Circuit ct = base.with_exponents(r, s);
    SweepRow row;
    row.t = t;
    row.r = r;
    row.s = s;
    try {
      Solution sol;
      if (a != b && reachable(ct, a, b)) {
        sol = msa_solve(ct, a, b, 1.0, 0.0, cfg);
        row.mu = ExtResistance::finite(std::pow(sol.pole_current, -1.0 / s));
        row.sweeps = sol.sweeps_used;
        row.residual = sol.residual;
      } else {
        row.mu = a == b ? ExtResistance::zero() : ExtResistance::infinite();
      }
      row.converged = true;
      if (row.mu.is_finite() && rep.oracle.is_finite())
        row.rel_error = std::abs(row.mu.value() - rep.oracle.value()) / rep.oracle.value();
    } catch (const NotConverged& err) {
      row.converged = false;
      row.sweeps = err.best().sweeps_used;
      row.residual = err.best().residual;
    }
    rep.rows.push_back(row);
  }
  return rep;
}

inline std::string sweep_to_csv(const SweepReport& rep) {
  std::ostringstream out;
  auto num = [](double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::string(buf);
  };
  out << "t,r,s,mu,oracle,rel_error,sweeps,residual\n";
  for (const SweepRow& row : rep.rows) {
    out << num(row.t) << ',' << num(row.r) << ',' << num(row.s) << ',';
    out << (row.converged ? row.mu.str() : "nan") << ',';
    out << rep.oracle.str() << ',';
    out << (row.rel_error >= 0.0 ? num(row.rel_error) : "") << ',';
    out << row.sweeps << ',' << num(row.residual) << '\n';
  }
  return out.str();
}

/// Multiplicative jitter mu_e *= 1 + u_e * magnitude with u_e uniform in
/// (-1, 1), deterministic in the seed. Small magnitudes make all path
/// lengths/widths distinct with probability 1, which is what the limit
/// theorems' uniqueness arguments need.
inline Circuit perturb(const Circuit& c, double magnitude, std::uint64_t seed) {
  if (magnitude < 0.0 || magnitude >= 1.0) throw Error("perturb magnitude must be in [0, 1)");
  Rng rng(seed);
  std::vector<Edge> es = c.edges();
  for (Edge& e : es) e.mu *= 1.0 + magnitude * rng.uniform(-1.0, 1.0);
  return Circuit(c.labels(), std::move(es), c.r(), c.s());
}

/// Largest off-support current as a fraction of the pole current; tends to
/// zero as the sweep parameter grows and the current concentrates on the
/// classical optimal path.
inline double current_concentration(const Solution& sol, const Circuit& c,
                                    const std::vector<int>& support_edges) {
  if (support_edges.empty()) throw Error("current_concentration: empty support");
  if (sol.pole_current <= 0.0) throw Error("current_concentration: no pole current");
  std::vector<char> on(static_cast<std::size_t>(c.edge_count()), 0);
  for (int eid : support_edges) {
    if (eid < 0 || eid >= c.edge_count()) throw Error("invalid support edge id");
    on[static_cast<std::size_t>(eid)] = 1;
  }
  double worst = 0.0;
  for (const Edge& e : c.edges())
    if (!on[static_cast<std::size_t>(e.id)])
      worst = std::max(worst, sol.y_star[static_cast<std::size_t>(e.id)]);
  return worst / sol.pole_current;
}

}  // namespace monores
