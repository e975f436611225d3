// monores command-line frontend: solves two-pole circuits under the
// monomial conductance law, builds resistance matrices, checks their
// quasi-metric / quasi-ultrametric structure, sweeps the classical limit
// regimes, and computes multi-pole balanced flows.
//
// Exit codes: 0 success, 1 failed check (violated inequality, misclassified
// equality, failed reduction), 2 bad input, 3 solver did not converge.

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "monores/monores.hpp"

namespace {

using namespace monores;

std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

struct CfgFlags {
  double flux_tol = 0.0;
  double bisect_tol = 0.0;
  long max_sweeps = 100000;

  void attach(CLI::App* cmd) {
    cmd->add_option("--flux-tol", flux_tol,
                    "absolute interior-flux convergence threshold (0 = auto scale)");
    cmd->add_option("--bisect-tol", bisect_tol,
                    "inner bisection interval width (0 = auto scale)");
    cmd->add_option("--max-sweeps", max_sweeps, "sweep/iteration budget");
  }
  SolveConfig config() const {
    SolveConfig cfg;
    cfg.flux_tol = flux_tol;
    cfg.bisect_tol = bisect_tol;
    cfg.max_sweeps = max_sweeps;
    return cfg;
  }
};

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw ParseError(out_path + ": cannot open file for writing");
  out << text;
}

int cmd_solve(const std::string& file, const std::string& source, const std::string& sink,
              double xa, double xb, const std::string& solver, const CfgFlags& flags) {
  Circuit c = load_circuit(file);
  int a = c.index_of(source), b = c.index_of(sink);
  Solution sol = solver == "energy" ? energy_solve(c, a, b, xa, xb, flags.config())
                                    : msa_solve(c, a, b, xa, xb, flags.config());
  std::cout << "node potentials:\n";
  for (int v = 0; v < c.node_count(); ++v)
    std::cout << "  " << c.label(v) << " = " << fmt(sol.x[static_cast<std::size_t>(v)]) << "\n";
  std::cout << "pole current  " << fmt(sol.pole_current) << "\n";
  std::cout << "residual      " << fmt(sol.residual) << "\n";
  std::cout << "sweeps        " << sol.sweeps_used << "\n";
  std::cout << "total heat    " << fmt(total_heat(c, sol.y_star)) << "\n";
  return 0;
}

int cmd_resistance(const std::string& file, const std::string& source, const std::string& sink,
                   const CfgFlags& flags) {
  Circuit c = load_circuit(file);
  ExtResistance mu = effective_resistance(c, c.index_of(source), c.index_of(sink),
                                          flags.config());
  std::cout << mu.str() << "\n";
  return 0;
}

int cmd_matrix(const std::string& file, const std::string& format, int jobs,
               const std::string& out_path, const CfgFlags& flags) {
  Circuit c = load_circuit(file);
  ResistanceMatrix m = resistance_matrix(c, flags.config(), jobs);
  if (format == "json")
    write_output(matrix_to_json(m).dump(2) + "\n", out_path);
  else
    write_output(matrix_to_csv(m), out_path);
  return 0;
}

int cmd_metric_check(const std::string& file, double tol, const std::string& format, int jobs,
                     const CfgFlags& flags) {
  Circuit c = load_circuit(file);
  ResistanceMatrix m = resistance_matrix(c, flags.config(), jobs);
  TriangleSummary sum = triangle_check(m, c, tol);
  if (format == "json") {
    std::cout << triangle_to_json(sum, m.labels).dump(2) << "\n";
  } else {
    std::cout << "triple (a,b,c)        lhs          rhs          slack        class     cut-vertex ok\n";
    for (const TriangleReport& t : sum.triples) {
      std::string name = m.labels[static_cast<std::size_t>(t.a)] + "," +
                         m.labels[static_cast<std::size_t>(t.b)] + "," +
                         m.labels[static_cast<std::size_t>(t.c)];
      std::printf("%-20s  %-11s  %-11s  %-11s  %-8s  %-9s  %s\n", name.c_str(),
                  t.lhs.str(6).c_str(), t.rhs.str(6).c_str(),
                  t.both_finite ? fmt(t.slack).c_str() : "-",
                  t.violated ? "VIOLATED" : (t.equality ? "equality" : "strict"),
                  t.cut_vertex ? "yes" : "no", t.consistent ? "ok" : "MISMATCH");
    }
    std::cout << (sum.all_hold && sum.all_consistent ? "metric-check: PASS\n"
                                                     : "metric-check: FAIL\n");
  }
  return sum.all_hold && sum.all_consistent ? 0 : 1;
}

int cmd_ultra_check(const std::string& matrix_file, double tol) {
  std::ifstream in(matrix_file);
  if (!in) throw ParseError(matrix_file + ": cannot open file");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(matrix_file + ": " + e.what());
  }
  ResistanceMatrix m = matrix_from_json(j);
  UltrametricReport rep = ultrametric_check(m, tol);
  if (rep.ok()) {
    std::cout << "ultra-check: PASS (tol " << fmt(tol) << ")\n";
    return 0;
  }
  std::cout << "ultra-check: " << rep.violations.size() << " violation(s)\n";
  for (const auto& v : rep.violations)
    std::cout << "  mu(" << m.labels[static_cast<std::size_t>(v.a)] << ","
              << m.labels[static_cast<std::size_t>(v.b)] << ") = " << v.mu_ab.str(6)
              << " > max via " << m.labels[static_cast<std::size_t>(v.c)] << " = "
              << v.bound.str(6) << "\n";
  return 1;
}

int cmd_limit_sweep(const std::string& file, const std::string& source, const std::string& sink,
                    const std::string& mode_name, const std::vector<double>& ts,
                    const std::string& out_path, const CfgFlags& flags) {
  Circuit c = load_circuit(file);
  SweepReport rep = sweep(c, c.index_of(source), c.index_of(sink),
                          limit_mode_from_name(mode_name), ts, flags.config());
  if (rep.mu_clamped)
    std::cerr << "note: mu values clamped to [0.25, 4] for the large-exponent sweep\n";
  write_output(sweep_to_csv(rep), out_path);
  return 0;
}

int cmd_balanced_flow(const std::string& file, const std::string& boundary_file) {
  Circuit c = load_circuit(file);
  Boundary boundary = load_boundary(boundary_file, c);
  BalancedFlowResult res = balanced_flow_stages(c, boundary);
  std::cout << "edge flows:\n";
  for (const Edge& e : c.edges())
    std::cout << "  " << c.label(e.tail) << " -> " << c.label(e.head) << "  y* = "
              << fmt(res.flow[static_cast<std::size_t>(e.id)], 12) << "  utilisation "
              << fmt(res.flow[static_cast<std::size_t>(e.id)] * e.mu) << "\n";
  std::cout << "ratio sequence:";
  for (double r : res.ratios) std::cout << " " << fmt(r, 12);
  std::cout << "\n";
  return 0;
}

int cmd_monotone_check(const std::string& file, int edge, const std::string& mu_new_text,
                       const std::string& source, const std::string& sink,
                       const CfgFlags& flags) {
  Circuit c = load_circuit(file);
  double mu_new;
  if (mu_new_text == "inf") {
    mu_new = std::numeric_limits<double>::infinity();
  } else {
    try {
      mu_new = std::stod(mu_new_text);
    } catch (const std::exception&) {
      throw ParseError("--mu-new: expected a number or 'inf', got '" + mu_new_text + "'");
    }
  }
  MonotonicityResult res = monotonicity_check(c, edge, mu_new, c.index_of(source),
                                              c.index_of(sink), flags.config());
  std::cout << "before " << res.before.str() << "\n";
  std::cout << "after  " << res.after.str() << "\n";
  std::cout << (res.ok ? "monotone-check: PASS\n" : "monotone-check: FAIL\n");
  return res.ok ? 0 : 1;
}

int cmd_sp_reduce(const std::string& file, const std::string& source, const std::string& sink) {
  Circuit c = load_circuit(file);
  try {
    ExtResistance mu = series_parallel_reduce(c, c.index_of(source), c.index_of(sink));
    std::cout << mu.str() << "\n";
    return 0;
  } catch (const NotSeriesParallel& e) {
    std::cout << "not-series-parallel\n";
    std::cerr << e.what() << "\n";
    return 1;
  }
}

int cmd_generate(const GenSpec& spec, const std::string& out_path) {
  Circuit c = generate(spec);
  std::string text = circuit_to_json(c).dump(2) + "\n";
  write_output(text, out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"monores: directed circuits under the monomial conductance law"};
  app.require_subcommand(1);

  std::string file, matrix_file, boundary_file, source, sink, out_path;
  std::string solver = "msa", format = "csv", mode, mu_new_text, family_name = "random-digraph";
  double xa = 1.0, xb = 0.0, tol = 1e-6, ultra_tol = 0.05;
  int jobs = 1, edge = 0;
  std::vector<double> ts{1, 2, 4, 8, 16, 32, 64};
  CfgFlags flags;
  GenSpec spec;

  auto* solve = app.add_subcommand("solve", "solve a two-pole problem and print the solution");
  solve->add_option("--circuit", file)->required();
  solve->add_option("--source", source)->required();
  solve->add_option("--sink", sink)->required();
  solve->add_option("--xa", xa, "source potential");
  solve->add_option("--xb", xb, "sink potential");
  solve->add_option("--solver", solver)->check(CLI::IsMember({"msa", "energy"}));
  flags.attach(solve);

  auto* resistance = app.add_subcommand("resistance", "effective resistance of an ordered pair");
  resistance->add_option("--circuit", file)->required();
  resistance->add_option("--source", source)->required();
  resistance->add_option("--sink", sink)->required();
  flags.attach(resistance);

  auto* matrix = app.add_subcommand("matrix", "all-pairs resistance matrix");
  matrix->add_option("--circuit", file)->required();
  matrix->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
  matrix->add_option("--jobs", jobs, "worker threads");
  matrix->add_option("--out", out_path, "write to file instead of stdout");
  flags.attach(matrix);

  auto* metric = app.add_subcommand("metric-check",
                                    "triangle inequality + equality/cut-vertex classification");
  metric->add_option("--circuit", file)->required();
  metric->add_option("--tol", tol, "equality band and violation tolerance");
  metric->add_option("--format", format)->check(CLI::IsMember({"table", "json"}));
  metric->add_option("--jobs", jobs);
  flags.attach(metric);

  auto* ultra = app.add_subcommand("ultra-check", "quasi-ultrametric check of a matrix file");
  ultra->add_option("--matrix", matrix_file)->required();
  ultra->add_option("--tol", ultra_tol, "relative tolerance");

  auto* limit = app.add_subcommand("limit-sweep",
                                   "resistance trajectory along a parameter curve (CSV). "
                                   "mu values are clamped to [0.25, 4] in non-ohm modes to "
                                   "keep mu^s representable");
  limit->add_option("--circuit", file)->required();
  limit->add_option("--source", source)->required();
  limit->add_option("--sink", sink)->required();
  limit->add_option("--mode", mode)->required()
      ->check(CLI::IsMember({"ohm", "shortest", "bottleneck", "maxflow"}));
  limit->add_option("--t", ts, "ascending t grid")->delimiter(',');
  limit->add_option("--out", out_path);
  flags.attach(limit);

  auto* balanced = app.add_subcommand("balanced-flow", "multi-pole balanced flow");
  balanced->add_option("--circuit", file)->required();
  balanced->add_option("--boundary", boundary_file)->required();

  auto* monotone = app.add_subcommand("monotone-check",
                                      "effective resistance before/after changing one edge");
  monotone->add_option("--circuit", file)->required();
  monotone->add_option("--edge", edge, "edge index")->required();
  monotone->add_option("--mu-new", mu_new_text, "new resistance, or 'inf' to delete")->required();
  monotone->add_option("--source", source)->required();
  monotone->add_option("--sink", sink)->required();
  flags.attach(monotone);

  auto* sp = app.add_subcommand("sp-reduce", "exact series-parallel reduction");
  sp->add_option("--circuit", file)->required();
  sp->add_option("--source", source)->required();
  sp->add_option("--sink", sink)->required();

  auto* gen = app.add_subcommand("generate", "emit a test circuit");
  std::string family = "random-digraph";
  gen->add_option("--family", family)
      ->check(CLI::IsMember({"random-digraph", "symmetric", "series-parallel", "paper-triangle",
                             "paper-5node", "induced-path"}));
  gen->add_option("--seed", spec.seed);
  gen->add_option("--n", spec.n, "node count (random families)");
  gen->add_option("--p", spec.p, "edge probability");
  gen->add_option("--depth", spec.depth, "series-parallel composition depth");
  gen->add_option("--k", spec.k, "induced-path interior length");
  gen->add_option("--mu-min", spec.mu_min);
  gen->add_option("--mu-max", spec.mu_max);
  gen->add_option("--r", spec.r);
  gen->add_option("--s", spec.s);
  gen->add_option("--out", out_path, "write to file instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(solve))
      return cmd_solve(file, source, sink, xa, xb, solver, flags);
    if (app.got_subcommand(resistance)) return cmd_resistance(file, source, sink, flags);
    if (app.got_subcommand(matrix)) return cmd_matrix(file, format, jobs, out_path, flags);
    if (app.got_subcommand(metric))
      return cmd_metric_check(file, tol, format == "json" ? "json" : "table", jobs, flags);
    if (app.got_subcommand(ultra)) return cmd_ultra_check(matrix_file, ultra_tol);
    if (app.got_subcommand(limit))
      return cmd_limit_sweep(file, source, sink, mode, ts, out_path, flags);
    if (app.got_subcommand(balanced)) return cmd_balanced_flow(file, boundary_file);
    if (app.got_subcommand(monotone))
      return cmd_monotone_check(file, edge, mu_new_text, source, sink, flags);
    if (app.got_subcommand(sp)) return cmd_sp_reduce(file, source, sink);
    if (app.got_subcommand(gen)) {
      spec.family = family_from_name(family);
      return cmd_generate(spec, out_path);
    }
  } catch (const NotConverged& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const Infeasible& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
