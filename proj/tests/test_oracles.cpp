#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "monores/generate.hpp"
#include "monores/limits.hpp"
#include "monores/oracles.hpp"
#include "testutil.hpp"

using namespace monores;
using testutil::close;

namespace {

Circuit random_digraph(std::uint64_t seed, int n = 8, double p = 0.35) {
  GenSpec spec;
  spec.family = Family::RandomDigraph;
  spec.seed = seed;
  spec.n = n;
  spec.p = p;
  spec.mu_min = 0.5;
  spec.mu_max = 2.0;
  return generate(spec);
}

}  // namespace

TEST_CASE("shortest path on the paper triangle", "[oracles]") {
  GenSpec spec;
  spec.family = Family::PaperTriangle;
  Circuit c = generate(spec);
  CHECK(close(shortest_path_length(c, 0, 1).value(), 2.0, 1e-12));  // min(3, 1+1)
  CHECK(shortest_path_length(c, 1, 0).is_infinite());
  CHECK(shortest_path_length(c, 0, 0).is_zero());

  Circuit single = Circuit::from_edges(2, {{0, 1, 1.7}});
  CHECK(single.edge(0).mu == shortest_path_length(single, 0, 1).value());
}

TEST_CASE("shortest path matches exhaustive enumeration", "[oracles]") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    Circuit c = random_digraph(7000 + seed);
    for (int b = 1; b < c.node_count(); b += 3) {
      ExtResistance fast = shortest_path_length(c, 0, b);
      ExtResistance brute = testutil::brute_shortest(c, 0, b);
      CHECK(fast.kind() == brute.kind());
      if (fast.is_finite()) CHECK(close(fast.value(), brute.value(), 1e-12));
    }
  }
}

TEST_CASE("widest bottleneck", "[oracles]") {
  GenSpec spec;
  spec.family = Family::PaperTriangle;
  Circuit c = generate(spec);
  // widths (1/3, 1, 1): the two-hop route has width 1, the direct edge 1/3
  CHECK(close(widest_bottleneck(c, 0, 1).value(), 1.0, 1e-12));

  Circuit single = Circuit::from_edges(2, {{0, 1, 4.0}});
  CHECK(close(widest_bottleneck(single, 0, 1).value(), 4.0, 1e-12));

  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    Circuit rc = random_digraph(7100 + seed);
    for (int b = 1; b < rc.node_count(); b += 3) {
      ExtResistance fast = widest_bottleneck(rc, 0, b);
      ExtResistance brute = testutil::brute_widest(rc, 0, b);
      CHECK(fast.kind() == brute.kind());
      if (fast.is_finite()) CHECK(close(fast.value(), brute.value(), 1e-12));
    }
  }
}

TEST_CASE("lexicographically widest path", "[oracles]") {
  SECTION("single path graph returns that path") {
    Circuit c = Circuit::from_edges(4, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}});
    Path p = lex_widest_path(c, 0, 3);
    CHECK(p.edges == std::vector<int>{0, 1, 2});
    CHECK(p.nodes == std::vector<int>{0, 1, 2, 3});
  }
  SECTION("unreachable pair") {
    Circuit c = Circuit::from_edges(2, {{1, 0, 1.0}});
    CHECK_THROWS_AS(lex_widest_path(c, 0, 1), Error);
  }
  SECTION("perturbed triangle matches brute force") {
    GenSpec spec;
    spec.family = Family::PaperTriangle;
    Circuit c = perturb(generate(spec), 1e-3, 99);
    CHECK(lex_widest_path(c, 0, 1).edges == testutil::brute_lex_widest(c, 0, 1));
  }
  SECTION("random digraphs with distinct widths match brute force") {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
      Circuit c = perturb(random_digraph(7200 + seed, 7, 0.45), 1e-4, seed);
      for (int b = 1; b < c.node_count(); b += 2) {
        if (!reachable(c, 0, b)) continue;
        Path p = lex_widest_path(c, 0, b);
        CHECK(p.edges == testutil::brute_lex_widest(c, 0, b));
      }
    }
  }
}

TEST_CASE("max flow", "[oracles]") {
  SECTION("paper 5-node example: unit capacities everywhere that matters") {
    GenSpec spec;
    spec.family = Family::Paper5Node;
    Circuit c = generate(spec);
    int a = c.index_of("a"), b = c.index_of("b"), cc = c.index_of("c");
    CHECK(close(max_flow(c, a, cc).value, 1.0, 1e-12));
    CHECK(close(max_flow(c, cc, b).value, 1.0, 1e-12));
    CHECK(close(max_flow(c, a, b).value, 1.0, 1e-12));
  }
  SECTION("two parallel unit-capacity edges") {
    Circuit c = Circuit::from_edges(2, {{0, 1, 1.0}, {0, 1, 1.0}});
    CHECK(close(max_flow(c, 0, 1).value, 2.0, 1e-12));
  }
  SECTION("value equals min cut exactly, certificate consistent") {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
      Circuit c = random_digraph(7300 + seed);
      MaxFlowResult res = max_flow(c, 0, 1);
      CHECK(close(res.value, testutil::brute_min_cut(c, 0, 1), 1e-12, 1e-12));
      CHECK(close(res.value, res.cut.capacity, 1e-12, 1e-12));
      // flow conservation away from the poles
      std::vector<double> f = fluxes(c, res.edge_flow);
      for (int v = 2; v < c.node_count(); ++v)
        CHECK(std::abs(f[static_cast<std::size_t>(v)]) < 1e-12);
    }
  }
  SECTION("flow decomposition recombines to the value") {
    Circuit c = random_digraph(7400, 8, 0.4);
    MaxFlowResult res = max_flow(c, 0, 1);
    FlowDecomposition dec = decompose_flow(c, 0, 1, res.edge_flow);
    double total = 0.0;
    for (const auto& [path, amount] : dec.paths) {
      total += amount;
      CHECK(path.nodes.front() == 0);
      CHECK(path.nodes.back() == 1);
    }
    CHECK(close(total, res.value, 1e-10, 1e-12));
  }
  SECTION("unreachable pair: zero flow, trivial cut") {
    Circuit c = Circuit::from_edges(2, {{1, 0, 1.0}});
    MaxFlowResult res = max_flow(c, 0, 1);
    CHECK(res.value == 0.0);
    CHECK(res.cut.capacity == 0.0);
  }
}

TEST_CASE("series parallel reduction", "[oracles]") {
  SECTION("two parallel unit edges at r = s = 1") {
    Circuit c = Circuit::from_edges(2, {{0, 1, 1.0}, {0, 1, 1.0}});
    CHECK(close(series_parallel_reduce(c, 0, 1).value(), 0.5, 1e-12));
  }
  SECTION("series 1 and 2 with s/r = 2 gives sqrt(5)") {
    Circuit c = Circuit::from_edges(3, {{0, 2, 1.0}, {2, 1, 2.0}}, 1.0, 2.0);
    CHECK(close(series_parallel_reduce(c, 0, 1).value(), std::sqrt(5.0), 1e-12));
  }
  SECTION("paper triangle reduces to 6/5") {
    GenSpec spec;
    spec.family = Family::PaperTriangle;
    Circuit c = generate(spec);
    CHECK(close(series_parallel_reduce(c, 0, 1).value(), 1.2, 1e-12));
  }
  SECTION("bridge graph is not series parallel") {
    // a -> u, a -> v, u -> v (the bridge), u -> b, v -> b
    Circuit c = Circuit::from_edges(
        4, {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}, {1, 3, 1.0}, {2, 3, 1.0}});
    CHECK_THROWS_AS(series_parallel_reduce(c, 0, 3), NotSeriesParallel);
  }
  SECTION("matches the solver on generated instances") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
      GenSpec spec;
      spec.family = Family::SeriesParallel;
      spec.seed = 7500 + seed;
      spec.depth = 3;
      spec.mu_min = 0.5;
      spec.mu_max = 2.0;
      Circuit c = generate(spec);
      double exact = series_parallel_reduce(c, 0, 1).value();
      double solved = effective_resistance(c, 0, 1).value();
      CHECK(close(solved, exact, 1e-8));
    }
  }
}

TEST_CASE("convolution limits of the composition rules", "[oracles]") {
  // parallel formula tends to min, series formula tends to max, both within
  // 3% at t = 64
  const double t = 64.0;
  for (auto [mu1, mu2] : std::vector<std::pair<double, double>>{
           {1.0, 3.0}, {0.5, 0.6}, {2.0, 2.0}, {0.25, 4.0}}) {
    double par = std::pow(std::pow(mu1, -t) + std::pow(mu2, -t), -1.0 / t);
    double ser = std::pow(std::pow(mu1, t) + std::pow(mu2, t), 1.0 / t);
    CHECK(close(par, std::min(mu1, mu2), 0.03));
    CHECK(close(ser, std::max(mu1, mu2), 0.03));
  }
}
