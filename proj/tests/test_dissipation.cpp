#include <catch2/catch_amalgamated.hpp>

#include "monores/dissipation.hpp"
#include "monores/generate.hpp"
#include "testutil.hpp"

using namespace monores;
using testutil::close;

namespace {

Circuit triangle() {
  return Circuit({"a", "b", "c"}, {{0, 0, 1, 3.0}, {1, 0, 2, 1.0}, {2, 2, 1, 1.0}}, 1, 1);
}

}  // namespace

TEST_CASE("edge heat", "[dissipation]") {
  Circuit unit = Circuit::from_edges(2, {{0, 1, 1.0}});
  CHECK(edge_heat(unit, unit.edge(0), 0.0) == 0.0);
  CHECK(edge_heat(unit, unit.edge(0), 1.0) == 0.5);  // exponent 2, factor 1/2

  Circuit two = Circuit::from_edges(2, {{0, 1, 2.0}});
  CHECK(edge_heat(two, two.edge(0), 3.0) == 9.0);  // 2 * 3^2 / 2

  CHECK_THROWS_AS(edge_heat(unit, unit.edge(0), -0.1), Error);
}

TEST_CASE("energy solve agrees with msa on the unit path", "[dissipation]") {
  Circuit path = Circuit::from_edges(3, {{0, 1, 1.0}, {1, 2, 1.0}});
  Solution e = energy_solve(path, 0, 2, 1.0, 0.0);
  Solution m = msa_solve(path, 0, 2, 1.0, 0.0);
  CHECK(close(e.x[1], 0.5, 1e-8));
  CHECK(close(e.pole_current, m.pole_current, 1e-8));
}

TEST_CASE("energy solve agrees with msa on the paper triangle", "[dissipation]") {
  Solution e = energy_solve(triangle(), 0, 1, 1.0, 0.0);
  CHECK(close(e.pole_current, 5.0 / 6.0, 1e-8));
}

TEST_CASE("gradient of the co-content is the flux vector", "[dissipation]") {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    GenSpec spec;
    spec.family = Family::RandomDigraph;
    spec.seed = 2100 + static_cast<std::uint64_t>(trial);
    spec.n = 5;
    spec.p = 0.5;
    spec.r = trial % 2 == 0 ? 1.0 : 2.0;  // keep E twice differentiable for FD
    spec.s = trial % 3 == 0 ? 2.0 : 1.0;
    Circuit c = generate(spec);
    if (c.edge_count() == 0) continue;
    PotentialVector x;
    for (int v = 0; v < c.node_count(); ++v) x.push_back(rng.uniform(-1.0, 1.0));
    const double h = 1e-6;
    std::vector<double> flux = fluxes(c, currents(c, voltages(c, x)));
    for (int v = 0; v < c.node_count(); ++v) {
      PotentialVector xp = x, xm = x;
      xp[static_cast<std::size_t>(v)] += h;
      xm[static_cast<std::size_t>(v)] -= h;
      double fd = (co_content(c, xp) - co_content(c, xm)) / (2 * h);
      CHECK(close(fd, flux[static_cast<std::size_t>(v)], 1e-5, 1e-7));
    }
  }
}

TEST_CASE("duality at the optimum", "[dissipation]") {
  for (int which = 0; which < 2; ++which) {
    Solution sol = which == 0 ? msa_solve(triangle(), 0, 1, 1.0, 0.0)
                              : energy_solve(triangle(), 0, 1, 1.0, 0.0);
    double lhs = testutil::inner(sol.y, sol.y_star);
    CHECK(close(lhs, (1.0 - 0.0) * sol.pole_current, 1e-9));
  }
}

TEST_CASE("solver cross-agreement on random circuits", "[dissipation]") {
  int solved = 0;
  for (int trial = 0; trial < 12; ++trial) {
    GenSpec spec;
    spec.family = Family::RandomDigraph;
    spec.seed = 3000 + static_cast<std::uint64_t>(trial);
    spec.n = 5;
    spec.p = 0.5;
    spec.mu_min = 0.5;
    spec.mu_max = 2.0;
    switch (trial % 3) {
      case 0: spec.r = 1.0; spec.s = 1.0; break;
      case 1: spec.r = 0.5; spec.s = 1.0; break;
      default: spec.r = 2.0; spec.s = 3.0; break;
    }
    Circuit c = generate(spec);
    if (!reachable(c, 0, 4)) continue;
    Solution m = msa_solve(c, 0, 4, 1.0, 0.0);
    Solution e = energy_solve(c, 0, 4, 1.0, 0.0);
    for (int eid = 0; eid < c.edge_count(); ++eid)
      CHECK(close(m.y_star[static_cast<std::size_t>(eid)],
                  e.y_star[static_cast<std::size_t>(eid)], 0.0, 10 * m.flux_tol_used));
    ++solved;
  }
  CHECK(solved >= 6);
}

TEST_CASE("interior slack potentials may differ, currents may not", "[dissipation]") {
  // Circuit with an induced reverse path: its potentials are free, its
  // current is pinned at zero.
  GenSpec spec;
  spec.family = Family::InducedPath;
  spec.k = 3;
  Circuit c = generate(spec);
  Solution m = msa_solve(c, 0, 1, 1.0, 0.0);
  Solution e = energy_solve(c, 0, 1, 1.0, 0.0);
  for (int eid = 0; eid < c.edge_count(); ++eid)
    CHECK(close(m.y_star[static_cast<std::size_t>(eid)],
                e.y_star[static_cast<std::size_t>(eid)], 0.0, 10 * m.flux_tol_used));
  CHECK(close(m.pole_current, 1.0, 1e-8));  // only the direct unit edge conducts
}

TEST_CASE("dissipation certificate", "[dissipation]") {
  // two parallel unit edges, one unit of current
  Circuit par = Circuit::from_edges(2, {{0, 1, 1.0}, {0, 1, 1.0}});
  std::vector<double> boundary{1.0, -1.0};
  FlowVector balanced{0.5, 0.5};
  FlowVector lopsided{1.0, 0.0};

  CHECK(dissipation_certificate(par, balanced, balanced, boundary));
  CHECK(dissipation_certificate(par, lopsided, balanced, boundary));
  // the lopsided split strictly dominates the balanced one: 0.5 vs 0.25
  CHECK(total_heat(par, lopsided) > total_heat(par, balanced) * 1.9);
  // a better-than-optimal candidate would flip the verdict
  CHECK_FALSE(dissipation_certificate(par, balanced, lopsided, boundary));

  FlowVector nonconserving{0.7, 0.0};
  CHECK_THROWS_WITH(dissipation_certificate(par, nonconserving, balanced, boundary),
                    Catch::Matchers::ContainsSubstring("conservation"));
}

TEST_CASE("solver flow beats feasible competitors", "[dissipation]") {
  // Perturb the optimal flow along the two a->b routes of the triangle:
  // any conservative, nonnegative deviation dissipates at least as much.
  Circuit c = triangle();
  Solution sol = msa_solve(c, 0, 1, 1.0, 0.0);
  std::vector<double> boundary = sol.x_star;
  for (double delta : {1e-4, -1e-4, 0.05, -0.05}) {
    FlowVector competitor = sol.y_star;
    competitor[0] += delta;   // direct edge
    competitor[1] -= delta;   // both edges of the series branch
    competitor[2] -= delta;
    bool nonneg = true;
    for (double f : competitor) nonneg = nonneg && f >= 0.0;
    if (!nonneg) continue;
    CHECK(dissipation_certificate(c, competitor, sol.y_star, boundary, 1e-6));
  }
}
