#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "monores/core.hpp"
#include "monores/resistance.hpp"

namespace monores {

/// Length of the mu-shortest directed a->b path (Dijkstra; weights are
/// positive by the circuit invariant).
inline ExtResistance shortest_path_length(const Circuit& c, int a, int b) {
  if (a == b) return ExtResistance::zero();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(static_cast<std::size_t>(c.node_count()), inf);
  dist[static_cast<std::size_t>(a)] = 0.0;
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  heap.push({0.0, a});
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (d > dist[static_cast<std::size_t>(v)]) continue;
    if (v == b) break;
    for (int eid : c.out(v)) {
      const Edge& e = c.edge(eid);
      double nd = d + e.mu;
      if (nd < dist[static_cast<std::size_t>(e.head)]) {
        dist[static_cast<std::size_t>(e.head)] = nd;
        heap.push({nd, e.head});
      }
    }
  }
  double d = dist[static_cast<std::size_t>(b)];
  return d == inf ? ExtResistance::infinite() : ExtResistance::finite(d);
}

/// Inverse width of the widest bottleneck a->b path. Edge widths are the
/// conductances 1/mu, so maximising the minimum width along a path is the
/// same as minimising the maximum mu; the result is that minimax mu, a
/// resistance directly comparable with mu_{a,b}.
inline ExtResistance widest_bottleneck(const Circuit& c, int a, int b) {
  if (a == b) return ExtResistance::zero();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> best(static_cast<std::size_t>(c.node_count()), inf);  // minimax mu
  best[static_cast<std::size_t>(a)] = 0.0;
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  heap.push({0.0, a});
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (d > best[static_cast<std::size_t>(v)]) continue;
    for (int eid : c.out(v)) {
      const Edge& e = c.edge(eid);
      double nd = std::max(d, e.mu);
      if (nd < best[static_cast<std::size_t>(e.head)]) {
        best[static_cast<std::size_t>(e.head)] = nd;
        heap.push({nd, e.head});
      }
    }
  }
  double d = best[static_cast<std::size_t>(b)];
  return d == inf ? ExtResistance::infinite() : ExtResistance::finite(d);
}

struct Path {
  std::vector<int> edges;  // edge ids in order
  std::vector<int> nodes;  // node sequence, edges.size() + 1 entries
};

namespace detail {

/// Widest-bottleneck width (max over walks of min edge width) restricted to
/// an edge subset; 0 when unreachable, +inf for a == b (no constraint).
inline double bottleneck_width(const Circuit& c, int a, int b,
                               const std::vector<char>& allowed) {
  if (a == b) return std::numeric_limits<double>::infinity();
  std::vector<double> best(static_cast<std::size_t>(c.node_count()), 0.0);
  best[static_cast<std::size_t>(a)] = std::numeric_limits<double>::infinity();
  std::priority_queue<std::pair<double, int>> heap;
  heap.push({best[static_cast<std::size_t>(a)], a});
  while (!heap.empty()) {
    auto [w, v] = heap.top();
    heap.pop();
    if (w < best[static_cast<std::size_t>(v)]) continue;
    for (int eid : c.out(v)) {
      if (!allowed[static_cast<std::size_t>(eid)]) continue;
      const Edge& e = c.edge(eid);
      double nw = std::min(w, 1.0 / e.mu);
      if (nw > best[static_cast<std::size_t>(e.head)]) {
        best[static_cast<std::size_t>(e.head)] = nw;
        heap.push({nw, e.head});
      }
    }
  }
  return best[static_cast<std::size_t>(b)];
}

inline bool reachable_within(const Circuit& c, int a, int b, const std::vector<char>& allowed) {
  if (a == b) return true;
  std::vector<char> seen(static_cast<std::size_t>(c.node_count()), 0);
  std::vector<int> stack{a};
  seen[static_cast<std::size_t>(a)] = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int eid : c.out(v)) {
      if (!allowed[static_cast<std::size_t>(eid)]) continue;
      int w = c.edge(eid).head;
      if (seen[static_cast<std::size_t>(w)]) continue;
      if (w == b) return true;
      seen[static_cast<std::size_t>(w)] = 1;
      stack.push_back(w);
    }
  }
  return false;
}

inline void lex_widest_rec(const Circuit& c, int a, int b, std::vector<char> allowed,
                           std::vector<int>& out_edges) {
  if (a == b) return;
  double width = bottleneck_width(c, a, b, allowed);
  if (width <= 0.0) throw Error("lex_widest_path: unreachable pair");
  // Narrower edges can appear on no widest path; edges at exactly the
  // bottleneck width stay admissible (they matter only under width ties).
  for (const Edge& e : c.edges())
    if (allowed[static_cast<std::size_t>(e.id)] && 1.0 / e.mu < width)
      allowed[static_cast<std::size_t>(e.id)] = 0;
  // Fix a bottleneck edge that some widest path actually crosses: both of
  // its segments must stay reachable without it. Under distinct widths the
  // candidate is unique; ties are broken by ascending edge id. The computed
  // `width` is an exact copy of some 1/mu, so == is safe.
  int bottleneck = -1;
  for (const Edge& e : c.edges()) {
    if (!allowed[static_cast<std::size_t>(e.id)] || 1.0 / e.mu != width) continue;
    allowed[static_cast<std::size_t>(e.id)] = 0;
    if (reachable_within(c, a, e.tail, allowed) && reachable_within(c, e.head, b, allowed)) {
      bottleneck = e.id;
      break;
    }
    allowed[static_cast<std::size_t>(e.id)] = 1;
  }
  if (bottleneck < 0)
    throw Error("lex_widest_path: no crossing bottleneck edge (internal)");
  const Edge& mid = c.edge(bottleneck);
  lex_widest_rec(c, a, mid.tail, allowed, out_edges);
  out_edges.push_back(bottleneck);
  lex_widest_rec(c, mid.head, b, allowed, out_edges);
}

}  // namespace detail

/// Lexicographically widest bottleneck path: among all widest a->b paths,
/// maximise the second-smallest width, then the third, and so on. Found by
/// repeatedly fixing the unique bottleneck edge and refining both segments
/// over the strictly wider edges. Deterministic when edge widths are
/// distinct (the perturbation regime).
inline Path lex_widest_path(const Circuit& c, int a, int b) {
  if (a == b) return Path{{}, {a}};
  if (!reachable(c, a, b)) throw Error("lex_widest_path: unreachable pair");
  std::vector<char> allowed(static_cast<std::size_t>(c.edge_count()), 1);
  Path p;
  detail::lex_widest_rec(c, a, b, std::move(allowed), p.edges);
  p.nodes.push_back(a);
  for (int eid : p.edges) p.nodes.push_back(c.edge(eid).head);
  return p;
}

struct CutCertificate {
  std::vector<int> source_side;  // contains a
  std::vector<int> sink_side;    // contains b
  double capacity = 0.0;         // sum of lambda over edges source -> sink
};

struct MaxFlowResult {
  double value = 0.0;
  CutCertificate cut;
  FlowVector edge_flow;  // per original edge
};

/// Max flow with capacities lambda_e = 1/mu_e, by shortest augmenting paths
/// (Edmonds-Karp). Returns the value, a minimum-cut certificate (residual
/// reachability), and the per-edge flow.
inline MaxFlowResult max_flow(const Circuit& c, int a, int b) {
  MaxFlowResult res;
  res.edge_flow.assign(static_cast<std::size_t>(c.edge_count()), 0.0);
  if (a == b) throw Error("max_flow: poles must be distinct");

  const int m = c.edge_count();
  std::vector<double> flow(static_cast<std::size_t>(m), 0.0);
  auto residual = [&](int eid, bool forward) {
    return forward ? c.lambda(eid) - flow[static_cast<std::size_t>(eid)]
                   : flow[static_cast<std::size_t>(eid)];
  };
  const double eps = 1e-14;

  while (true) {
    // BFS over residual edges; parent[v] = (edge id, forward?).
    std::vector<std::pair<int, bool>> parent(static_cast<std::size_t>(c.node_count()),
                                             {-1, true});
    std::vector<char> seen(static_cast<std::size_t>(c.node_count()), 0);
    std::deque<int> queue{a};
    seen[static_cast<std::size_t>(a)] = 1;
    while (!queue.empty() && !seen[static_cast<std::size_t>(b)]) {
      int v = queue.front();
      queue.pop_front();
      for (int eid : c.out(v))
        if (residual(eid, true) > eps) {
          int w = c.edge(eid).head;
          if (!seen[static_cast<std::size_t>(w)]) {
            seen[static_cast<std::size_t>(w)] = 1;
            parent[static_cast<std::size_t>(w)] = {eid, true};
            queue.push_back(w);
          }
        }
      for (int eid : c.in(v))
        if (residual(eid, false) > eps) {
          int w = c.edge(eid).tail;
          if (!seen[static_cast<std::size_t>(w)]) {
            seen[static_cast<std::size_t>(w)] = 1;
            parent[static_cast<std::size_t>(w)] = {eid, false};
            queue.push_back(w);
          }
        }
    }
    if (!seen[static_cast<std::size_t>(b)]) {
      // Min cut = residual-reachable side.
      for (int v = 0; v < c.node_count(); ++v)
        (seen[static_cast<std::size_t>(v)] ? res.cut.source_side : res.cut.sink_side)
            .push_back(v);
      for (const Edge& e : c.edges())
        if (seen[static_cast<std::size_t>(e.tail)] && !seen[static_cast<std::size_t>(e.head)])
          res.cut.capacity += c.lambda(e.id);
      break;
    }
    // Walk back, find the path bottleneck, augment.
    double push = std::numeric_limits<double>::infinity();
    for (int v = b; v != a;) {
      auto [eid, fwd] = parent[static_cast<std::size_t>(v)];
      push = std::min(push, residual(eid, fwd));
      v = fwd ? c.edge(eid).tail : c.edge(eid).head;
    }
    for (int v = b; v != a;) {
      auto [eid, fwd] = parent[static_cast<std::size_t>(v)];
      flow[static_cast<std::size_t>(eid)] += fwd ? push : -push;
      v = fwd ? c.edge(eid).tail : c.edge(eid).head;
    }
  }

  res.edge_flow = flow;
  double value = 0.0;
  for (int eid : c.out(a)) value += flow[static_cast<std::size_t>(eid)];
  for (int eid : c.in(a)) value -= flow[static_cast<std::size_t>(eid)];
  res.value = value;
  return res;
}

/// Greedy decomposition of a conservative a->b flow into path flows plus
/// whatever cycle circulations remain.
struct FlowDecomposition {
  std::vector<std::pair<Path, double>> paths;
  std::vector<std::pair<Path, double>> cycles;
};

inline FlowDecomposition decompose_flow(const Circuit& c, int a, int b, FlowVector flow,
                                        double eps = 1e-12) {
  FlowDecomposition dec;
  auto strip = [&](int start, bool to_sink) -> bool {
    Path p;
    p.nodes.push_back(start);
    std::vector<int> mark(static_cast<std::size_t>(c.node_count()), -1);
    mark[static_cast<std::size_t>(start)] = 0;
    int v = start;
    while (true) {
      int next_edge = -1;
      for (int eid : c.out(v))
        if (flow[static_cast<std::size_t>(eid)] > eps) {
          next_edge = eid;
          break;
        }
      if (next_edge < 0) return false;
      int w = c.edge(next_edge).head;
      p.edges.push_back(next_edge);
      p.nodes.push_back(w);
      if (to_sink && w == b) break;
      if (mark[static_cast<std::size_t>(w)] >= 0) {
        // Found a cycle: trim the tail before the repeat.
        int at = mark[static_cast<std::size_t>(w)];
        p.edges.erase(p.edges.begin(), p.edges.begin() + at);
        p.nodes.erase(p.nodes.begin(), p.nodes.begin() + at);
        to_sink = false;
        break;
      }
      mark[static_cast<std::size_t>(w)] = static_cast<int>(p.edges.size());
      v = w;
    }
    double amount = std::numeric_limits<double>::infinity();
    for (int eid : p.edges) amount = std::min(amount, flow[static_cast<std::size_t>(eid)]);
    for (int eid : p.edges) flow[static_cast<std::size_t>(eid)] -= amount;
    (to_sink ? dec.paths : dec.cycles).push_back({std::move(p), amount});
    return true;
  };

  // Paths first (as long as the source pushes flow), then leftover cycles.
  while (true) {
    double out = 0.0;
    for (int eid : c.out(a)) out += flow[static_cast<std::size_t>(eid)];
    if (out <= eps || !strip(a, true)) break;
  }
  for (const Edge& e : c.edges())
    while (flow[static_cast<std::size_t>(e.id)] > eps)
      if (!strip(e.tail, false)) break;
  return dec;
}

class NotSeriesParallel : public Error {
 public:
  using Error::Error;
};

/// Exact two-pole reduction by the series/parallel rules
///   parallel: mu^{-s} = sum mu_i^{-s},   series: mu^{s/r} = sum mu_i^{s/r},
/// applied to a fixpoint. Interior nodes qualify for the series rule when
/// they have exactly one incoming and one outgoing edge; a degenerate
/// series pair u->v->u is a dead two-cycle (positive current would need
/// strictly decreasing potentials around it) and is dropped. Throws
/// NotSeriesParallel when the reduction stalls before a two-node network.
inline ExtResistance series_parallel_reduce(const Circuit& c, int a, int b) {
  if (a < 0 || a >= c.node_count() || b < 0 || b >= c.node_count())
    throw Error("pole index out of range");
  if (a == b) return ExtResistance::zero();
  const double s = c.s();
  const double q = c.s() / c.r();

  struct E {
    int tail, head;
    double mu;
  };
  std::vector<E> es;
  for (const Edge& e : c.edges()) es.push_back({e.tail, e.head, e.mu});

  bool changed = true;
  while (changed) {
    changed = false;
    // Parallel rule: merge duplicate (tail, head) bundles.
    std::map<std::pair<int, int>, std::vector<std::size_t>> buckets;
    for (std::size_t i = 0; i < es.size(); ++i) buckets[{es[i].tail, es[i].head}].push_back(i);
    for (auto& [key, idxs] : buckets) {
      if (idxs.size() < 2) continue;
      double acc = 0.0;
      for (std::size_t i : idxs) acc += std::pow(es[i].mu, -s);
      es[idxs.front()].mu = std::pow(acc, -1.0 / s);
      for (std::size_t k = idxs.size(); k-- > 1;) es.erase(es.begin() + static_cast<long>(idxs[k]));
      changed = true;
      break;  // indices are stale, rescan
    }
    if (changed) continue;
    // Series rule on 1-in/1-out interior nodes.
    std::vector<int> indeg(static_cast<std::size_t>(c.node_count()), 0);
    std::vector<int> outdeg(static_cast<std::size_t>(c.node_count()), 0);
    std::vector<int> in_at(static_cast<std::size_t>(c.node_count()), -1);
    std::vector<int> out_at(static_cast<std::size_t>(c.node_count()), -1);
    for (std::size_t i = 0; i < es.size(); ++i) {
      outdeg[static_cast<std::size_t>(es[i].tail)]++;
      indeg[static_cast<std::size_t>(es[i].head)]++;
      out_at[static_cast<std::size_t>(es[i].tail)] = static_cast<int>(i);
      in_at[static_cast<std::size_t>(es[i].head)] = static_cast<int>(i);
    }
    for (int v = 0; v < c.node_count(); ++v) {
      if (v == a || v == b) continue;
      if (indeg[static_cast<std::size_t>(v)] != 1 || outdeg[static_cast<std::size_t>(v)] != 1)
        continue;
      std::size_t ein = static_cast<std::size_t>(in_at[static_cast<std::size_t>(v)]);
      std::size_t eout = static_cast<std::size_t>(out_at[static_cast<std::size_t>(v)]);
      int u = es[ein].tail, w = es[eout].head;
      if (u == w) {
        // dead two-cycle through v
        es.erase(es.begin() + static_cast<long>(std::max(ein, eout)));
        es.erase(es.begin() + static_cast<long>(std::min(ein, eout)));
      } else {
        double mu = std::pow(std::pow(es[ein].mu, q) + std::pow(es[eout].mu, q), 1.0 / q);
        es[ein] = {u, w, mu};
        es.erase(es.begin() + static_cast<long>(eout));
      }
      changed = true;
      break;
    }
  }

  // Fully reduced network: forward a->b bundle (already parallel-merged),
  // possibly a reverse b->a edge which never carries current at x_a >= x_b.
  double forward_mu = -1.0;
  for (const E& e : es) {
    if (e.tail == a && e.head == b) {
      forward_mu = e.mu;
    } else if (e.tail == b && e.head == a) {
      continue;
    } else {
      throw NotSeriesParallel("reduction stalled with " + std::to_string(es.size()) +
                              " edges remaining");
    }
  }
  if (forward_mu < 0.0) return ExtResistance::infinite();
  return ExtResistance::finite(forward_mu);
}

}  // namespace monores
