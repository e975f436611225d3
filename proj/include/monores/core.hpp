#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

namespace monores {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input file or malformed user data.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Directed edge. `mu` is the resistance; the conductance lambda = 1/mu is
/// always derived on the fly, never stored, so the two cannot drift apart.
struct Edge {
  int id = -1;
  int tail = -1;  // beginning of the edge
  int head = -1;  // end of the edge
  double mu = 1.0;
};

using PotentialVector = std::vector<double>;  // one entry per node
using FlowVector = std::vector<double>;       // one entry per edge, >= 0

/// A circuit: weighted digraph plus the two global exponents of the
/// monomial conductance law
///
///     y*_e = y_e^r / mu_e^s   for voltage y_e >= 0,   0 otherwise.
///
/// Nodes are dense 0-based indices with unique string labels. Parallel and
/// antiparallel edges are allowed; self-loops are rejected (they can never
/// carry current and only pollute positive-current subgraph reasoning).
/// Immutable after construction; safe to share across threads.
class Circuit {
 public:
  Circuit(std::vector<std::string> labels, std::vector<Edge> edges, double r,
          double s)
      : labels_(std::move(labels)), edges_(std::move(edges)), r_(r), s_(s) {
    validate();
    build_adjacency();
  }

  /// Convenience: n auto-labelled nodes ("v0", "v1", ...) and (tail, head,
  /// mu) triples.
  static Circuit from_edges(int n,
                            const std::vector<std::tuple<int, int, double>>& es,
                            double r = 1.0, double s = 1.0) {
    std::vector<std::string> labels;
    labels.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) labels.push_back("v" + std::to_string(i));
    std::vector<Edge> edges;
    edges.reserve(es.size());
    for (const auto& [t, h, m] : es)
      edges.push_back(Edge{static_cast<int>(edges.size()), t, h, m});
    return Circuit(std::move(labels), std::move(edges), r, s);
  }

  int node_count() const { return static_cast<int>(labels_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  double r() const { return r_; }
  double s() const { return s_; }

  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int id) const { return edges_.at(static_cast<std::size_t>(id)); }
  const std::string& label(int v) const { return labels_.at(static_cast<std::size_t>(v)); }
  const std::vector<std::string>& labels() const { return labels_; }

  double lambda(int edge_id) const { return 1.0 / edge(edge_id).mu; }
  double min_mu() const {
    double m = edges_.empty() ? 1.0 : edges_.front().mu;
    for (const Edge& e : edges_) m = std::min(m, e.mu);
    return m;
  }

  /// Edge ids leaving / entering a node.
  const std::vector<int>& out(int v) const { return out_.at(static_cast<std::size_t>(v)); }
  const std::vector<int>& in(int v) const { return in_.at(static_cast<std::size_t>(v)); }

  int index_of(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) throw Error("unknown node label '" + label + "'");
    return it->second;
  }
  bool has_label(const std::string& label) const { return index_.count(label) > 0; }

  Circuit with_exponents(double r, double s) const {
    return Circuit(labels_, edges_, r, s);
  }
  Circuit with_mu(int edge_id, double mu) const {
    std::vector<Edge> es = edges_;
    es.at(static_cast<std::size_t>(edge_id)).mu = mu;
    return Circuit(labels_, std::move(es), r_, s_);
  }
  Circuit without_edge(int edge_id) const {
    std::vector<Edge> es;
    es.reserve(edges_.size());
    for (const Edge& e : edges_) {
      if (e.id == edge_id) continue;
      Edge c = e;
      c.id = static_cast<int>(es.size());
      es.push_back(c);
    }
    if (es.size() == edges_.size()) throw Error("invalid edge id");
    return Circuit(labels_, std::move(es), r_, s_);
  }

 private:
  void validate() const {
    if (!(r_ > 0.0) || !std::isfinite(r_)) throw Error("exponent r must be positive and finite");
    if (!(s_ > 0.0) || !std::isfinite(s_)) throw Error("exponent s must be positive and finite");
    std::unordered_map<std::string, int> seen;
    for (int v = 0; v < node_count(); ++v) {
      if (labels_[static_cast<std::size_t>(v)].empty()) throw Error("empty node label");
      if (!seen.emplace(labels_[static_cast<std::size_t>(v)], v).second)
        throw Error("duplicate node label '" + labels_[static_cast<std::size_t>(v)] + "'");
    }
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      const Edge& e = edges_[i];
      if (e.tail < 0 || e.tail >= node_count() || e.head < 0 || e.head >= node_count())
        throw Error("edge " + std::to_string(i) + ": node index out of range");
      if (e.tail == e.head)
        throw Error("edge " + std::to_string(i) + ": self-loops are not allowed");
      if (!(e.mu > 0.0) || !std::isfinite(e.mu))
        throw Error("edge " + std::to_string(i) + ": mu must be positive and finite");
      if (e.id != static_cast<int>(i))
        throw Error("edge " + std::to_string(i) + ": non-dense edge id");
    }
  }

  void build_adjacency() {
    index_.clear();
    for (int v = 0; v < node_count(); ++v) index_.emplace(labels_[static_cast<std::size_t>(v)], v);
    out_.assign(static_cast<std::size_t>(node_count()), {});
    in_.assign(static_cast<std::size_t>(node_count()), {});
    for (const Edge& e : edges_) {
      out_[static_cast<std::size_t>(e.tail)].push_back(e.id);
      in_[static_cast<std::size_t>(e.head)].push_back(e.id);
    }
  }

  std::vector<std::string> labels_;
  std::vector<Edge> edges_;
  double r_, s_;
  std::vector<std::vector<int>> out_, in_;
  std::unordered_map<std::string, int> index_;
};

/// The conductance law itself: current through resistance mu at the given
/// voltage. Total on all real voltages, zero on the negative half-line.
inline double conductance_law(double voltage, double mu, double r, double s) {
  if (voltage <= 0.0) return 0.0;
  if (r == 1.0 && s == 1.0) return voltage / mu;
  return std::pow(voltage, r) / std::pow(mu, s);
}

inline double edge_current(const Circuit& c, const Edge& e, double voltage) {
  return conductance_law(voltage, e.mu, c.r(), c.s());
}

/// y_e = x_tail - x_head for every edge.
inline std::vector<double> voltages(const Circuit& c, const PotentialVector& x) {
  if (static_cast<int>(x.size()) != c.node_count())
    throw Error("potential vector has wrong dimension");
  std::vector<double> y(static_cast<std::size_t>(c.edge_count()));
  for (const Edge& e : c.edges())
    y[static_cast<std::size_t>(e.id)] =
        x[static_cast<std::size_t>(e.tail)] - x[static_cast<std::size_t>(e.head)];
  return y;
}

/// Apply the law edgewise to a voltage vector.
inline FlowVector currents(const Circuit& c, const std::vector<double>& y) {
  if (static_cast<int>(y.size()) != c.edge_count())
    throw Error("voltage vector has wrong dimension");
  FlowVector ys(y.size());
  for (const Edge& e : c.edges())
    ys[static_cast<std::size_t>(e.id)] = edge_current(c, e, y[static_cast<std::size_t>(e.id)]);
  return ys;
}

/// x*_v = sum of currents leaving v minus sum entering v.
inline std::vector<double> fluxes(const Circuit& c, const FlowVector& y_star) {
  if (static_cast<int>(y_star.size()) != c.edge_count())
    throw Error("flow vector has wrong dimension");
  std::vector<double> xs(static_cast<std::size_t>(c.node_count()), 0.0);
  for (const Edge& e : c.edges()) {
    xs[static_cast<std::size_t>(e.tail)] += y_star[static_cast<std::size_t>(e.id)];
    xs[static_cast<std::size_t>(e.head)] -= y_star[static_cast<std::size_t>(e.id)];
  }
  return xs;
}

/// True iff a directed path a -> b exists, optionally with node `forbidden`
/// (and its incident edges) removed. Iterative DFS, tolerates deep paths.
inline bool reachable(const Circuit& c, int a, int b, int forbidden = -1) {
  if (a < 0 || a >= c.node_count() || b < 0 || b >= c.node_count())
    throw Error("node index out of range");
  if (forbidden == a || forbidden == b)
    throw Error("forbidden node coincides with an endpoint");
  if (a == b) return true;
  std::vector<char> seen(static_cast<std::size_t>(c.node_count()), 0);
  std::vector<int> stack{a};
  seen[static_cast<std::size_t>(a)] = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int eid : c.out(v)) {
      int w = c.edge(eid).head;
      if (w == forbidden || seen[static_cast<std::size_t>(w)]) continue;
      if (w == b) return true;
      seen[static_cast<std::size_t>(w)] = 1;
      stack.push_back(w);
    }
  }
  return false;
}

}  // namespace monores
