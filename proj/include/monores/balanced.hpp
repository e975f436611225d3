#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "monores/core.hpp"

namespace monores {

/// Prescribed per-node fluxes of a multi-pole problem (positive = source,
/// negative = sink). Must sum to zero.
using Boundary = std::vector<double>;

inline void validate_boundary(const Circuit& c, const Boundary& b, double tol = 1e-12) {
  if (static_cast<int>(b.size()) != c.node_count())
    throw Error("boundary vector has wrong dimension");
  double sum = 0.0, scale = 0.0;
  for (double v : b) {
    sum += v;
    scale = std::max(scale, std::abs(v));
  }
  if (std::abs(sum) > tol * std::max(1.0, scale))
    throw Error("boundary fluxes must sum to zero (sum = " + std::to_string(sum) + ")");
}

/// Ordered node bipartition with its deficiency D (net prescribed flux of
/// the left side), capacity L (total conductance of left->right edges), and
/// ratio R = D / L. An infinite ratio (D > 0, L = 0) witnesses
/// infeasibility.
struct Cut {
  std::uint32_t left_mask = 0;  // bit v set <=> node v on the left side
  double deficiency = 0.0;
  double capacity = 0.0;
  double ratio = 0.0;
  bool infinite = false;

  std::vector<int> left(int n) const {
    std::vector<int> out;
    for (int v = 0; v < n; ++v)
      if (left_mask >> v & 1u) out.push_back(v);
    return out;
  }
  std::vector<int> right(int n) const {
    std::vector<int> out;
    for (int v = 0; v < n; ++v)
      if (!(left_mask >> v & 1u)) out.push_back(v);
    return out;
  }
};

class Infeasible : public Error {
 public:
  Infeasible(const std::string& msg, Cut witness) : Error(msg), witness_(witness) {}
  const Cut& witness() const { return witness_; }

 private:
  Cut witness_;
};

namespace detail {

/// Critical cut over an explicit edge subset (the balanced-flow stages
/// delete edges as they saturate them).
inline Cut critical_cut_impl(const Circuit& c, const Boundary& boundary,
                             const std::vector<char>& alive) {
  const int n = c.node_count();
  if (n > 16) throw Error("critical_cut: exhaustive enumeration capped at 16 nodes");
  if (n < 2) throw Error("critical_cut: need at least two nodes");
  Cut best;
  bool have_best = false;
  const std::uint32_t end = 1u << n;
  for (std::uint32_t mask = 1; mask + 1 < end; ++mask) {
    double d = 0.0;
    for (int v = 0; v < n; ++v)
      if (mask >> v & 1u) d += boundary[static_cast<std::size_t>(v)];
    double cap = 0.0;
    for (const Edge& e : c.edges())
      if (alive[static_cast<std::size_t>(e.id)] && (mask >> e.tail & 1u) &&
          !(mask >> e.head & 1u))
        cap += 1.0 / e.mu;
    if (cap == 0.0) {
      if (d > 0.0) {
        Cut witness;
        witness.left_mask = mask;
        witness.deficiency = d;
        witness.infinite = true;
        return witness;  // smallest-mask infinite witness, scan order is ascending
      }
      continue;  // R undefined or -inf; never the maximum
    }
    double ratio = d / cap;
    if (!have_best || ratio > best.ratio) {
      best = Cut{mask, d, cap, ratio, false};
      have_best = true;
    }
  }
  if (!have_best) throw Error("critical_cut: no admissible cut");
  return best;
}

}  // namespace detail

/// Cut maximising the deficiency/capacity ratio, by exhaustive enumeration
/// of proper bipartitions (the algorithm is combinatorial; 2^n cuts are
/// fine at the <= 16-node budget). Ties go to the smallest left-set bitmask;
/// a (D > 0, L = 0) cut short-circuits as the infeasibility witness.
inline Cut critical_cut(const Circuit& c, const Boundary& boundary) {
  validate_boundary(c, boundary);
  std::vector<char> alive(static_cast<std::size_t>(c.edge_count()), 1);
  return detail::critical_cut_impl(c, boundary, alive);
}

struct BalancedFlowResult {
  FlowVector flow;
  std::vector<double> ratios;  // critical ratios per stage, non-increasing
  std::vector<Cut> cuts;
};

/// The multi-pole balanced flow: repeatedly find a critical cut, saturate
/// its edges proportionally (y*_e = R * lambda_e), delete them, push the
/// fixed flows into the residual boundary, and recurse until every node's
/// residual flux vanishes. Remaining edges carry zero flow.
inline BalancedFlowResult balanced_flow_stages(const Circuit& c, Boundary boundary) {
  validate_boundary(c, boundary);
  BalancedFlowResult res;
  res.flow.assign(static_cast<std::size_t>(c.edge_count()), 0.0);
  std::vector<char> alive(static_cast<std::size_t>(c.edge_count()), 1);

  double scale = 0.0;
  for (double v : boundary) scale = std::max(scale, std::abs(v));
  const double zero_tol = 1e-12 * std::max(1.0, scale);

  // Each stage deletes at least one edge, so edge_count() stages suffice;
  // anything more means the invariants broke.
  for (int stage = 0; stage <= c.edge_count(); ++stage) {
    double residual = 0.0;
    for (double v : boundary) residual = std::max(residual, std::abs(v));
    if (residual <= zero_tol) return res;

    Cut cut = detail::critical_cut_impl(c, boundary, alive);
    if (cut.infinite)
      throw Infeasible("no satisfactory flow: cut with positive deficiency and zero capacity",
                       cut);
    if (cut.ratio <= 0.0)
      throw Error("balanced_flow: nonpositive critical ratio with nonzero boundary (internal)");
    res.ratios.push_back(cut.ratio);
    res.cuts.push_back(cut);
    for (const Edge& e : c.edges()) {
      if (!alive[static_cast<std::size_t>(e.id)]) continue;
      if ((cut.left_mask >> e.tail & 1u) && !(cut.left_mask >> e.head & 1u)) {
        double y = cut.ratio / e.mu;  // R * lambda_e
        res.flow[static_cast<std::size_t>(e.id)] = y;
        boundary[static_cast<std::size_t>(e.tail)] -= y;
        boundary[static_cast<std::size_t>(e.head)] += y;
        alive[static_cast<std::size_t>(e.id)] = 0;
      }
    }
  }
  throw Error("balanced_flow: stage budget exhausted (internal)");
}

inline FlowVector balanced_flow(const Circuit& c, const Boundary& boundary) {
  return balanced_flow_stages(c, boundary).flow;
}

/// The critical ratios R, R', ... of successive stages; monotone
/// non-increasing by the theory behind the algorithm.
inline std::vector<double> ratio_sequence(const Circuit& c, const Boundary& boundary) {
  return balanced_flow_stages(c, boundary).ratios;
}

}  // namespace monores
