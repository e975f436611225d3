#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "monores/core.hpp"
#include "monores/solver.hpp"

namespace monores {

/// Effective resistance as an extended real: Zero (coinciding poles),
/// Finite (strictly positive), or Infinite (no directed path). Totally
/// ordered Zero < Finite < Infinite; no floating-point infinities leak out.
class ExtResistance {
 public:
  enum class Kind { Zero, Finite, Infinite };

  ExtResistance() = default;
  static ExtResistance zero() { return ExtResistance(Kind::Zero, 0.0); }
  static ExtResistance infinite() { return ExtResistance(Kind::Infinite, 0.0); }
  static ExtResistance finite(double v) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw Error("finite resistance must be strictly positive");
    return ExtResistance(Kind::Finite, v);
  }

  Kind kind() const { return kind_; }
  bool is_zero() const { return kind_ == Kind::Zero; }
  bool is_finite() const { return kind_ == Kind::Finite; }
  bool is_infinite() const { return kind_ == Kind::Infinite; }

  double value() const {
    if (!is_finite()) throw Error("value() on a non-finite resistance");
    return value_;
  }

  /// mu^q for q > 0; preserves the Zero/Infinite tags.
  ExtResistance pow(double q) const {
    if (!(q > 0.0)) throw Error("pow exponent must be positive");
    if (is_finite()) return finite(std::pow(value_, q));
    return *this;
  }

  friend ExtResistance operator+(const ExtResistance& a, const ExtResistance& b) {
    if (a.is_infinite() || b.is_infinite()) return infinite();
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    return finite(a.value_ + b.value_);
  }

  friend bool operator==(const ExtResistance& a, const ExtResistance& b) {
    if (a.kind_ != b.kind_) return false;
    return !a.is_finite() || a.value_ == b.value_;
  }
  friend bool operator!=(const ExtResistance& a, const ExtResistance& b) { return !(a == b); }
  friend bool operator<(const ExtResistance& a, const ExtResistance& b) {
    if (a.kind_ == b.kind_) return a.is_finite() && a.value_ < b.value_;
    return rank(a.kind_) < rank(b.kind_);
  }
  friend bool operator<=(const ExtResistance& a, const ExtResistance& b) {
    return a < b || a == b;
  }

  bool close_to(const ExtResistance& other, double rel_tol) const {
    if (kind_ != other.kind_) return false;
    if (!is_finite()) return true;
    return std::abs(value_ - other.value_) <= rel_tol * std::max(value_, other.value_);
  }

  /// "0", "inf", or the number at the given significant-digit count.
  std::string str(int digits = 12) const {
    if (is_zero()) return "0";
    if (is_infinite()) return "inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, value_);
    return buf;
  }

  static ExtResistance parse(const std::string& text) {
    if (text == "inf") return infinite();
    if (text == "0") return zero();
    try {
      std::size_t pos = 0;
      double v = std::stod(text, &pos);
      if (pos != text.size()) throw Error("");
      if (v == 0.0) return zero();
      return finite(v);
    } catch (const std::exception&) {
      throw ParseError("cannot parse resistance value '" + text + "'");
    }
  }

 private:
  ExtResistance(Kind k, double v) : kind_(k), value_(v) {}
  static int rank(Kind k) { return k == Kind::Zero ? 0 : (k == Kind::Finite ? 1 : 2); }

  Kind kind_ = Kind::Zero;
  double value_ = 0.0;
};

/// Two-pole reduction: the single resistance value such that the whole
/// network obeys the monomial law between the poles. Solves at the
/// normalised boundary x_a = 1, x_b = 0 (the scaling lemma makes any other
/// choice equivalent) and inverts the pole current through the law.
/// Unreachable pairs are decided combinatorially, never from near-zero
/// numerics.
inline ExtResistance effective_resistance(const Circuit& c, int a, int b,
                                          const SolveConfig& cfg = {}) {
  if (a < 0 || a >= c.node_count() || b < 0 || b >= c.node_count())
    throw Error("pole index out of range");
  if (a == b) return ExtResistance::zero();
  if (!reachable(c, a, b)) return ExtResistance::infinite();
  Solution sol = msa_solve(c, a, b, 1.0, 0.0, cfg);
  return ExtResistance::finite(std::pow(sol.pole_current, -1.0 / c.s()));
}

struct ResistanceMatrix {
  std::vector<std::string> labels;
  std::vector<ExtResistance> entries;  // row-major, source x target

  int size() const { return static_cast<int>(labels.size()); }
  const ExtResistance& at(int from, int to) const {
    return entries[static_cast<std::size_t>(from) * labels.size() + static_cast<std::size_t>(to)];
  }
  ExtResistance& at(int from, int to) {
    return entries[static_cast<std::size_t>(from) * labels.size() + static_cast<std::size_t>(to)];
  }
  bool operator==(const ResistanceMatrix& o) const {
    return labels == o.labels && entries == o.entries;
  }
};

/// All ordered-pair effective resistances. Pairs are independent solves on
/// the shared immutable circuit, so `jobs > 1` splits them across threads;
/// assembly order is by index either way, keeping the result deterministic.
/// Per-pair convergence failures are aggregated into one error naming every
/// failed pair.
inline ResistanceMatrix resistance_matrix(const Circuit& c, const SolveConfig& cfg = {},
                                          int jobs = 1) {
  const int n = c.node_count();
  ResistanceMatrix m;
  m.labels = c.labels();
  m.entries.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n),
                   ExtResistance::zero());
  std::vector<std::string> failures(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));

  auto solve_pair = [&](int idx) {
    int a = idx / n, b = idx % n;
    try {
      m.entries[static_cast<std::size_t>(idx)] = effective_resistance(c, a, b, cfg);
    } catch (const NotConverged& err) {
      failures[static_cast<std::size_t>(idx)] =
          "(" + c.label(a) + "," + c.label(b) + "): " + err.what();
    }
  };

  const int total = n * n;
  if (jobs <= 1) {
    for (int idx = 0; idx < total; ++idx) solve_pair(idx);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w)
      pool.emplace_back([&, w] {
        for (int idx = w; idx < total; idx += jobs) solve_pair(idx);
      });
    for (auto& t : pool) t.join();
  }

  std::string aggregate;
  for (const auto& f : failures)
    if (!f.empty()) aggregate += (aggregate.empty() ? "" : "; ") + f;
  if (!aggregate.empty()) throw Error("resistance_matrix failures: " + aggregate);
  return m;
}

/// One ordered triple of the power-space triangle inequality
///   mu_{a,b}^{s/r} <= mu_{a,c}^{s/r} + mu_{c,b}^{s/r}.
/// Equality is expected exactly when c lies on every directed a->b path
/// (vacuously when b is unreachable from a).
struct TriangleReport {
  int a = 0, b = 0, c = 0;
  ExtResistance lhs;  // mu_{a,b}^{s/r}
  ExtResistance rhs;  // mu_{a,c}^{s/r} + mu_{c,b}^{s/r}
  double slack = 0.0;       // rhs - lhs, meaningful when both are finite
  bool both_finite = false;
  bool cut_vertex = false;  // every directed a->b path contains c
  bool violated = false;    // inequality fails beyond tolerance
  bool equality = false;    // numeric classification
  bool consistent = false;  // equality classification matches cut_vertex
};

struct TriangleSummary {
  std::vector<TriangleReport> triples;
  double exponent = 1.0;  // s/r
  double tol = 1e-6;
  bool all_hold = true;        // no violated inequality
  bool all_consistent = true;  // no misclassified equality
};

inline TriangleSummary triangle_check(const ResistanceMatrix& m, const Circuit& c,
                                      double tol = 1e-6) {
  if (m.size() != c.node_count())
    throw Error("matrix size does not match the circuit");
  TriangleSummary sum;
  sum.exponent = c.s() / c.r();
  sum.tol = tol;
  const double q = sum.exponent;
  const int n = m.size();
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (b == a) continue;
      for (int cc = 0; cc < n; ++cc) {
        if (cc == a || cc == b) continue;
        TriangleReport rep;
        rep.a = a;
        rep.b = b;
        rep.c = cc;
        rep.lhs = m.at(a, b).pow(q);
        rep.rhs = m.at(a, cc).pow(q) + m.at(cc, b).pow(q);
        rep.cut_vertex = !reachable(c, a, b, cc);
        rep.both_finite = rep.lhs.is_finite() && rep.rhs.is_finite();
        if (rep.both_finite) {
          rep.slack = rep.rhs.value() - rep.lhs.value();
          rep.violated = rep.slack < -tol;
          rep.equality = std::abs(rep.slack) <= tol * std::max(1.0, rep.rhs.value());
        } else if (rep.lhs.is_infinite() && rep.rhs.is_infinite()) {
          rep.equality = true;  // inf = inf by convention
        } else if (rep.rhs.is_infinite()) {
          rep.equality = false;  // finite lhs, infinite rhs: strictly slack
        } else {
          rep.violated = true;  // infinite lhs above a finite rhs
        }
        rep.consistent = !rep.violated && rep.equality == rep.cut_vertex;
        sum.all_hold = sum.all_hold && !rep.violated;
        sum.all_consistent = sum.all_consistent && rep.consistent;
        sum.triples.push_back(rep);
      }
    }
  return sum;
}

struct UltrametricViolation {
  int a = 0, b = 0, c = 0;
  ExtResistance mu_ab;
  ExtResistance bound;  // max(mu_{a,c}, mu_{c,b})
};

struct UltrametricReport {
  double tol = 0.05;
  std::vector<UltrametricViolation> violations;
  bool ok() const { return violations.empty(); }
};

/// Quasi-ultrametric check mu_{a,b} <= max(mu_{a,c}, mu_{c,b}), with a
/// relative tolerance on the finite comparisons. Meaningful for matrices
/// from the bottleneck and max-flow limit regimes; Ohm-regime matrices are
/// expected to violate it and the violations are simply reported.
inline UltrametricReport ultrametric_check(const ResistanceMatrix& m, double tol = 0.05) {
  UltrametricReport rep;
  rep.tol = tol;
  const int n = m.size();
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (b == a) continue;
      for (int c = 0; c < n; ++c) {
        if (c == a || c == b) continue;
        const ExtResistance& ab = m.at(a, b);
        ExtResistance bound = std::max(m.at(a, c), m.at(c, b));
        bool holds;
        if (bound.is_infinite())
          holds = true;
        else if (ab.is_infinite())
          holds = false;
        else if (ab.is_zero() || bound.is_zero())
          holds = !bound.is_zero() || ab.is_zero();
        else
          holds = ab.value() <= bound.value() * (1.0 + tol);
        if (!holds) rep.violations.push_back({a, b, c, ab, bound});
      }
    }
  return rep;
}

struct MonotonicityResult {
  ExtResistance before;
  ExtResistance after;
  bool ok = false;  // direction of change consistent with the mu change
};

/// Replace one edge's resistance (infinity deletes the edge) and compare
/// the effective resistance before and after. Strengthening an edge can
/// never raise mu_{a,b}, weakening or deleting it can never lower it: the
/// no-Braess monotonicity principle.
inline MonotonicityResult monotonicity_check(const Circuit& c, int edge_id, double mu_new,
                                             int a, int b, const SolveConfig& cfg = {},
                                             double tol = 1e-8) {
  if (edge_id < 0 || edge_id >= c.edge_count()) throw Error("invalid edge id");
  if (!(mu_new > 0.0)) throw Error("mu_new must be positive (or infinite to delete)");
  const double mu_old = c.edge(edge_id).mu;
  MonotonicityResult res;
  res.before = effective_resistance(c, a, b, cfg);
  Circuit changed = std::isinf(mu_new) ? c.without_edge(edge_id) : c.with_mu(edge_id, mu_new);
  res.after = effective_resistance(changed, a, b, cfg);

  auto leq = [tol](const ExtResistance& lo, const ExtResistance& hi) {
    if (lo.is_finite() && hi.is_finite())
      return lo.value() <= hi.value() * (1.0 + tol) + tol;
    return lo <= hi || lo == hi;
  };
  bool ok = true;
  if (mu_new <= mu_old) ok = ok && leq(res.after, res.before);
  if (mu_new >= mu_old) ok = ok && leq(res.before, res.after);
  res.ok = ok;
  return res;
}

// ---------------------------------------------------------------------------
// Serialisation. CSV uses 12 significant digits with "inf"/"0" sentinels;
// JSON stores raw doubles (exact round-trip) with "inf" string sentinels.

inline std::string matrix_to_csv(const ResistanceMatrix& m) {
  std::ostringstream out;
  out << "from";
  for (const auto& l : m.labels) out << ',' << l;
  out << '\n';
  for (int i = 0; i < m.size(); ++i) {
    out << m.labels[static_cast<std::size_t>(i)];
    for (int j = 0; j < m.size(); ++j) out << ',' << m.at(i, j).str();
    out << '\n';
  }
  return out.str();
}

inline nlohmann::json matrix_to_json(const ResistanceMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < m.size(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < m.size(); ++j) {
      const ExtResistance& e = m.at(i, j);
      if (e.is_infinite())
        row.push_back("inf");
      else if (e.is_zero())
        row.push_back(0.0);
      else
        row.push_back(e.value());
    }
    rows.push_back(std::move(row));
  }
  return nlohmann::json{{"labels", m.labels}, {"mu", rows}};
}

inline ResistanceMatrix matrix_from_json(const nlohmann::json& j) {
  for (const auto& [key, _] : j.items())
    if (key != "labels" && key != "mu")
      throw ParseError("matrix: unknown key '" + key + "'");
  if (!j.contains("labels") || !j.contains("mu"))
    throw ParseError("matrix: missing 'labels' or 'mu'");
  ResistanceMatrix m;
  m.labels = j.at("labels").get<std::vector<std::string>>();
  const auto& rows = j.at("mu");
  if (!rows.is_array() || rows.size() != m.labels.size())
    throw ParseError("matrix: 'mu' must have one row per label");
  for (const auto& row : rows) {
    if (!row.is_array() || row.size() != m.labels.size())
      throw ParseError("matrix: ragged 'mu' rows");
    for (const auto& cell : row) {
      if (cell.is_string()) {
        if (cell.get<std::string>() != "inf")
          throw ParseError("matrix: bad cell '" + cell.get<std::string>() + "'");
        m.entries.push_back(ExtResistance::infinite());
      } else if (cell.is_number()) {
        double v = cell.get<double>();
        m.entries.push_back(v == 0.0 ? ExtResistance::zero() : ExtResistance::finite(v));
      } else {
        throw ParseError("matrix: cells must be numbers or 'inf'");
      }
    }
  }
  return m;
}

inline nlohmann::json triangle_to_json(const TriangleSummary& sum,
                                       const std::vector<std::string>& labels) {
  nlohmann::json triples = nlohmann::json::array();
  for (const TriangleReport& t : sum.triples) {
    nlohmann::json j{{"a", labels[static_cast<std::size_t>(t.a)]},
                     {"b", labels[static_cast<std::size_t>(t.b)]},
                     {"c", labels[static_cast<std::size_t>(t.c)]},
                     {"cut_vertex", t.cut_vertex},
                     {"violated", t.violated},
                     {"equality", t.equality},
                     {"consistent", t.consistent}};
    j["lhs"] = t.lhs.is_infinite() ? nlohmann::json("inf") : nlohmann::json(t.lhs.is_zero() ? 0.0 : t.lhs.value());
    j["rhs"] = t.rhs.is_infinite() ? nlohmann::json("inf") : nlohmann::json(t.rhs.is_zero() ? 0.0 : t.rhs.value());
    if (t.both_finite) j["slack"] = t.slack;
    triples.push_back(std::move(j));
  }
  return nlohmann::json{{"exponent", sum.exponent},
                        {"tol", sum.tol},
                        {"all_hold", sum.all_hold},
                        {"all_consistent", sum.all_consistent},
                        {"triples", triples}};
}

}  // namespace monores
