#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "monores/generate.hpp"
#include "monores/solver.hpp"
#include "testutil.hpp"

using namespace monores;
using testutil::close;

namespace {

Circuit triangle() {
  // (a,b) mu=3, (a,c) mu=1, (c,b) mu=1
  return Circuit({"a", "b", "c"}, {{0, 0, 1, 3.0}, {1, 0, 2, 1.0}, {2, 2, 1, 1.0}}, 1, 1);
}

}  // namespace

TEST_CASE("node flux root on a two-edge path", "[solver]") {
  // a -> v -> b, equal resistances: by symmetry the root is 1/2.
  Circuit eq = Circuit::from_edges(3, {{0, 1, 1.0}, {1, 2, 1.0}});
  PotentialVector x{1.0, 0.0, 0.0};
  CHECK(close(node_flux_root(eq, x, 1, 1.0, 1e-14), 0.5, 1e-12));

  // mu_av = 1, mu_vb = 2: balance (1 - x)/1 = x/2 gives x = 2/3.
  Circuit uneq = Circuit::from_edges(3, {{0, 1, 1.0}, {1, 2, 2.0}});
  CHECK(close(node_flux_root(uneq, x, 1, 1.0, 1e-14), 2.0 / 3.0, 1e-12));

  // flux still negative at the upper bound is an internal invariant breach
  PotentialVector bad{2.0, 0.0, 0.0};
  CHECK_THROWS_AS(node_flux_root(eq, bad, 1, 0.5, 1e-14), Error);
}

TEST_CASE("msa solves the paper triangle", "[solver]") {
  Solution sol = msa_solve(triangle(), 0, 1, 1.0, 0.0);
  // direct edge 1/3 plus the series branch 1/2 through x_c = 1/2
  CHECK(close(sol.pole_current, 5.0 / 6.0, 1e-9));
  CHECK(close(sol.x[2], 0.5, 1e-9));
  CHECK(sol.residual <= sol.flux_tol_used);
  CHECK(sol.potentials_monotone);
  CHECK(sol.pole_flux_monotone);
}

TEST_CASE("msa solves a unit series path", "[solver]") {
  Circuit path = Circuit::from_edges(4, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}});
  Solution sol = msa_solve(path, 0, 3, 1.0, 0.0);
  CHECK(close(sol.x[1], 2.0 / 3.0, 1e-9));
  CHECK(close(sol.x[2], 1.0 / 3.0, 1e-9));
  CHECK(close(sol.pole_current, 1.0 / 3.0, 1e-9));
  // pole fluxes mirror each other up to the interior residual
  CHECK(close(sol.x_star[0], -sol.x_star[3], 1e-9, 4 * sol.flux_tol_used));
}

TEST_CASE("solution vectors are images of the potentials", "[solver]") {
  Solution sol = msa_solve(triangle(), 0, 1, 1.0, 0.0);
  Circuit c = triangle();
  CHECK(sol.y == voltages(c, sol.x));
  CHECK(sol.y_star == currents(c, sol.y));
  CHECK(sol.x_star == fluxes(c, sol.y_star));
  CHECK(sol.pole_current == sol.x_star[0]);
}

TEST_CASE("pole bracketing: x_b <= x_v <= x_a", "[solver]") {
  for (int trial = 0; trial < 20; ++trial) {
    GenSpec spec;
    spec.family = Family::RandomDigraph;
    spec.seed = 100 + static_cast<std::uint64_t>(trial);
    spec.n = 6;
    spec.p = 0.4;
    Circuit c = generate(spec);
    Solution sol = msa_solve(c, 0, 5, 1.0, 0.0);
    for (double xv : sol.x) {
      CHECK(xv >= 0.0);
      CHECK(xv <= 1.0);
    }
  }
}

TEST_CASE("unreachable sink: zero current, reachable side pumped", "[solver]") {
  // a -> u in one component, isolated b
  Circuit c = Circuit::from_edges(3, {{0, 1, 1.0}});
  Solution sol = msa_solve(c, 0, 2, 1.0, 0.0);
  CHECK(std::abs(sol.pole_current) <= 3 * sol.flux_tol_used);
  CHECK(close(sol.x[1], 1.0, 1e-9));  // pumped to xa0
  CHECK(sol.x[2] == 0.0);
}

TEST_CASE("zero-current convention for xa0 <= xb0", "[solver]") {
  Circuit c = Circuit::from_edges(3, {{0, 1, 1.0}, {1, 2, 1.0}});
  Solution sol = msa_solve(c, 0, 2, 0.0, 1.0);
  CHECK(sol.pole_current == 0.0);
  CHECK(sol.x[0] == 0.0);
  CHECK(sol.x[1] == 1.0);
  CHECK(sol.sweeps_used == 0);
  for (double ys : sol.y_star) CHECK(ys == 0.0);
}

TEST_CASE("terminal potentials on single-edge-path circuits", "[solver]") {
  // Every a->b path is one edge; extra structure hangs off the poles.
  // Limit potentials may take only the two boundary values.
  Circuit star = Circuit::from_edges(
      5, {{0, 1, 2.0}, {0, 1, 3.0}, {0, 2, 1.0}, {3, 1, 1.0}, {3, 4, 5.0}});
  Solution sol = msa_solve(star, 0, 1, 1.0, 0.0);
  for (double xv : sol.x) CHECK((close(xv, 1.0, 1e-9, 1e-9) || close(xv, 0.0, 1e-9, 1e-9)));
}

TEST_CASE("sweep order does not change currents", "[solver]") {
  Circuit c = triangle();
  SolveConfig forward;
  SolveConfig backward;
  backward.sweep_order = {2};
  Solution s1 = msa_solve(c, 0, 1, 1.0, 0.0, forward);
  Solution s2 = msa_solve(c, 0, 1, 1.0, 0.0, backward);
  for (int e = 0; e < c.edge_count(); ++e)
    CHECK(close(s1.y_star[static_cast<std::size_t>(e)], s2.y_star[static_cast<std::size_t>(e)],
                0.0, 10 * s1.flux_tol_used));

  for (int trial = 0; trial < 10; ++trial) {
    GenSpec spec;
    spec.family = Family::RandomDigraph;
    spec.seed = 500 + static_cast<std::uint64_t>(trial);
    spec.n = 6;
    spec.p = 0.45;
    spec.mu_min = 0.5;
    spec.mu_max = 2.0;
    Circuit rc = generate(spec);
    SolveConfig shuffled;
    for (int v = 1; v < 5; ++v) shuffled.sweep_order.push_back(v);
    std::reverse(shuffled.sweep_order.begin(), shuffled.sweep_order.end());
    Solution a = msa_solve(rc, 0, 5, 1.0, 0.0);
    Solution b = msa_solve(rc, 0, 5, 1.0, 0.0, shuffled);
    for (int e = 0; e < rc.edge_count(); ++e)
      CHECK(close(a.y_star[static_cast<std::size_t>(e)], b.y_star[static_cast<std::size_t>(e)],
                  0.0, 10 * a.flux_tol_used));
  }
}

TEST_CASE("positive-current subgraph structure", "[solver]") {
  for (int trial = 0; trial < 25; ++trial) {
    GenSpec spec;
    spec.family = Family::RandomDigraph;
    spec.seed = 900 + static_cast<std::uint64_t>(trial);
    spec.n = 6;
    spec.p = 0.5;
    spec.mu_min = 0.5;
    spec.mu_max = 2.0;
    Circuit c = generate(spec);
    if (!reachable(c, 0, 5)) continue;
    Solution sol = msa_solve(c, 0, 5, 1.0, 0.0);
    std::string why;
    INFO(why);
    CHECK(testutil::gplus_ok(c, sol, 0, 5, &why));
  }
}

TEST_CASE("scaling lemma", "[solver]") {
  SECTION("identity scaling") {
    Solution sol = msa_solve(triangle(), 0, 1, 1.0, 0.0);
    CHECK(scaling_check(triangle(), sol, 1.0));
  }
  SECTION("linear case doubles") {
    Circuit path = Circuit::from_edges(4, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}});
    Solution sol = msa_solve(path, 0, 3, 1.0, 0.0);
    CHECK(scaling_check(path, sol, 2.0));
    Solution doubled = msa_solve(path, 0, 3, 2.0, 0.0);
    CHECK(close(doubled.pole_current, 2.0 * sol.pole_current, 1e-8));
    CHECK(close(doubled.x[1], 4.0 / 3.0, 1e-9));
  }
  SECTION("r = 1/2: scaling by 4 scales currents by 2") {
    Circuit c = Circuit::from_edges(3, {{0, 1, 1.0}, {1, 2, 2.0}}, 0.5, 1.0);
    Solution sol = msa_solve(c, 0, 2, 1.0, 0.0);
    CHECK(scaling_check(c, sol, 4.0));
    Solution scaled = msa_solve(c, 0, 2, 4.0, 0.0);
    CHECK(close(scaled.pole_current, 2.0 * sol.pole_current, 1e-8));
  }
}

TEST_CASE("exhausted sweep budget reports the best iterate", "[solver]") {
  Circuit path = Circuit::from_edges(5, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {3, 4, 1.0}});
  SolveConfig cfg;
  cfg.max_sweeps = 1;
  try {
    msa_solve(path, 0, 4, 1.0, 0.0, cfg);
    FAIL("expected NotConverged");
  } catch (const NotConverged& e) {
    CHECK(e.best().sweeps_used == 1);
    CHECK(e.best().residual > 0.0);
    CHECK(e.best().x[1] > 0.0);  // progress was made and surfaced
  }
}

TEST_CASE("solver argument validation", "[solver]") {
  Circuit c = triangle();
  CHECK_THROWS_AS(msa_solve(c, 0, 0, 1.0, 0.0), Error);
  CHECK_THROWS_AS(msa_solve(c, 0, 9, 1.0, 0.0), Error);
  SolveConfig bad;
  bad.sweep_order = {0};  // contains a pole
  CHECK_THROWS_AS(msa_solve(c, 0, 1, 1.0, 0.0, bad), Error);
}
