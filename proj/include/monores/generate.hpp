#pragma once

#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

#include "monores/core.hpp"
#include "monores/rng.hpp"

namespace monores {

enum class Family {
  RandomDigraph,   // n nodes, each ordered pair an edge with probability p
  Symmetric,       // antiparallel equal-mu pairs with probability p per pair
  SeriesParallel,  // random series/parallel composition tree of given depth
  PaperTriangle,   // nodes a,b,c; edges (a,b) mu=3, (a,c) mu=1, (c,b) mu=1
  Paper5Node,      // nodes a,b,c,k,l; edges (a,k),(k,c),(c,l),(l,b),(k,l), mu=1
  InducedPath,     // edge (a,b) plus a reverse chain b -> w1 -> ... -> wk -> a
};

inline Family family_from_name(const std::string& name) {
  if (name == "random-digraph") return Family::RandomDigraph;
  if (name == "symmetric") return Family::Symmetric;
  if (name == "series-parallel") return Family::SeriesParallel;
  if (name == "paper-triangle") return Family::PaperTriangle;
  if (name == "paper-5node") return Family::Paper5Node;
  if (name == "induced-path") return Family::InducedPath;
  throw Error("unknown generator family '" + name + "'");
}

inline const char* family_name(Family f) {
  switch (f) {
    case Family::RandomDigraph: return "random-digraph";
    case Family::Symmetric: return "symmetric";
    case Family::SeriesParallel: return "series-parallel";
    case Family::PaperTriangle: return "paper-triangle";
    case Family::Paper5Node: return "paper-5node";
    case Family::InducedPath: return "induced-path";
  }
  return "?";
}

struct GenSpec {
  Family family = Family::RandomDigraph;
  std::uint64_t seed = 0;
  int n = 5;              // random-digraph / symmetric
  double p = 0.4;         // edge probability
  int depth = 3;          // series-parallel composition depth
  int k = 2;              // induced-path interior length
  double mu_min = 0.25, mu_max = 4.0;
  double r = 1.0, s = 1.0;
};

namespace detail {

inline void gen_sp_tree(Rng& rng, const GenSpec& spec, int depth, int a, int b,
                        std::vector<std::string>& labels, std::vector<Edge>& edges) {
  if (depth <= 0) {
    edges.push_back(Edge{static_cast<int>(edges.size()), a, b,
                         rng.uniform(spec.mu_min, spec.mu_max)});
    return;
  }
  if (rng.bernoulli(0.5)) {
    // series: fresh middle node
    int mid = static_cast<int>(labels.size());
    labels.push_back("m" + std::to_string(mid));
    gen_sp_tree(rng, spec, depth - 1, a, mid, labels, edges);
    gen_sp_tree(rng, spec, depth - 1, mid, b, labels, edges);
  } else {
    // parallel: same terminals twice
    gen_sp_tree(rng, spec, depth - 1, a, b, labels, edges);
    gen_sp_tree(rng, spec, depth - 1, a, b, labels, edges);
  }
}

}  // namespace detail

/// Deterministic instance generation: identical spec gives an identical
/// circuit, bit for bit. Two-pole families use labels "a" (source) and "b"
/// (sink).
inline Circuit generate(const GenSpec& spec) {
  Rng rng(spec.seed);
  switch (spec.family) {
    case Family::PaperTriangle: {
      std::vector<Edge> es{{0, 0, 1, 3.0}, {1, 0, 2, 1.0}, {2, 2, 1, 1.0}};
      return Circuit({"a", "b", "c"}, std::move(es), spec.r, spec.s);
    }
    case Family::Paper5Node: {
      // a=0, b=1, c=2, k=3, l=4
      std::vector<Edge> es{{0, 0, 3, 1.0}, {1, 3, 2, 1.0}, {2, 2, 4, 1.0},
                           {3, 4, 1, 1.0}, {4, 3, 4, 1.0}};
      return Circuit({"a", "b", "c", "k", "l"}, std::move(es), spec.r, spec.s);
    }
    case Family::InducedPath: {
      if (spec.k < 1) throw Error("induced-path needs k >= 1");
      std::vector<std::string> labels{"a", "b"};
      for (int i = 1; i <= spec.k; ++i) labels.push_back("w" + std::to_string(i));
      std::vector<Edge> es;
      es.push_back(Edge{0, 0, 1, 1.0});  // the current-carrying edge
      int prev = 1;                      // chain b -> w1 -> ... -> wk -> a
      for (int i = 1; i <= spec.k; ++i) {
        es.push_back(Edge{static_cast<int>(es.size()), prev, i + 1, 1.0});
        prev = i + 1;
      }
      es.push_back(Edge{static_cast<int>(es.size()), prev, 0, 1.0});
      return Circuit(std::move(labels), std::move(es), spec.r, spec.s);
    }
    case Family::RandomDigraph: {
      if (spec.n < 1) throw Error("random-digraph needs n >= 1");
      std::vector<std::string> labels;
      for (int i = 0; i < spec.n; ++i) labels.push_back("v" + std::to_string(i));
      std::vector<Edge> es;
      for (int u = 0; u < spec.n; ++u)
        for (int v = 0; v < spec.n; ++v) {
          if (u == v) continue;
          if (rng.bernoulli(spec.p))
            es.push_back(Edge{static_cast<int>(es.size()), u, v,
                              rng.uniform(spec.mu_min, spec.mu_max)});
        }
      return Circuit(std::move(labels), std::move(es), spec.r, spec.s);
    }
    case Family::Symmetric: {
      if (spec.n < 1) throw Error("symmetric needs n >= 1");
      std::vector<std::string> labels;
      for (int i = 0; i < spec.n; ++i) labels.push_back("v" + std::to_string(i));
      std::vector<Edge> es;
      for (int u = 0; u < spec.n; ++u)
        for (int v = u + 1; v < spec.n; ++v) {
          if (!rng.bernoulli(spec.p)) continue;
          double mu = rng.uniform(spec.mu_min, spec.mu_max);
          es.push_back(Edge{static_cast<int>(es.size()), u, v, mu});
          es.push_back(Edge{static_cast<int>(es.size()), v, u, mu});
        }
      return Circuit(std::move(labels), std::move(es), spec.r, spec.s);
    }
    case Family::SeriesParallel: {
      if (spec.depth < 0 || spec.depth > 6) throw Error("series-parallel depth must be in [0, 6]");
      std::vector<std::string> labels{"a", "b"};
      std::vector<Edge> es;
      detail::gen_sp_tree(rng, spec, spec.depth, 0, 1, labels, es);
      return Circuit(std::move(labels), std::move(es), spec.r, spec.s);
    }
  }
  throw Error("bad generator family");
}

}  // namespace monores
