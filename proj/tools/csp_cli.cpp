#include <cmath>
#include <iostream>
#include <sstream>
#include <vector>

#include "CLI11.hpp"
#include "csp/demo_systems.hpp"
#include "csp/mmh.hpp"
#include "csp/report.hpp"

namespace {

using namespace csp;

Vec make_grid(double lo, double hi, int nodes) {
  Vec g(nodes);
  for (int i = 0; i < nodes; ++i) g[i] = lo + (hi - lo) * i / (nodes - 1);
  return g;
}

struct CommonArgs {
  std::string system = "mmh";
  double kappa = 1.0;
  double lambda = 0.5;
  double grid_min = 0.5;
  double grid_max = 2.0;
  int nodes = 64;

  void attach(CLI::App* cmd) {
    cmd->add_option("--system", system, "system name (mmh, linear2d, tilted)");
    cmd->add_option("--kappa", kappa, "mmh kappa");
    cmd->add_option("--lambda", lambda, "mmh lambda");
    cmd->add_option("--grid-min", grid_min, "slow grid lower end");
    cmd->add_option("--grid-max", grid_max, "slow grid upper end");
    cmd->add_option("--nodes", nodes, "slow grid node count");
  }
};

std::vector<BasisStack> build_chain(const SystemDefinition& sys, int levels,
                                    RefinementMode mode) {
  std::vector<BasisStack> chain;
  chain.push_back(initial_basis(sys.m(), sys.n(), std::nullopt, mode));
  for (int q = 0; q < levels; ++q) chain.push_back(refine(sys, chain.back()));
  return chain;
}

int run_validate_mmh(const CommonArgs& c, double eps, double tol, const std::string& json_out) {
  Experiment e;
  e.kind = ExperimentKind::oracle_diff;
  e.system = "mmh";
  e.kappa = c.kappa;
  e.lambda = c.lambda;
  e.q = 2;
  e.grid_min = c.grid_min;
  e.grid_max = c.grid_max;
  e.grid_nodes = c.nodes;

  const SweepTable t = run_sweep(e, {eps});
  const double rel = t.rows.front().metric;

  const SystemDefinition sys = mmh_system(MmhParams{c.kappa, c.lambda});
  const auto chain = build_chain(sys, 3, RefinementMode::two_step);
  double duality = 0.0;
  const Vec grid = make_grid(c.grid_min, c.grid_max, 9);
  for (int i = 0; i < grid.size(); ++i) {
    const StatePoint x(grid.segment(i, 1), Vec::Constant(1, 0.3 + 0.04 * i));
    for (const auto& b : chain) {
      const auto [A, B] = evaluate_basis(b, x, eps);
      duality = std::max(duality,
                         (B * A - Mat::Identity(2, 2)).lpNorm<Eigen::Infinity>());
    }
  }

  const bool pass = rel <= tol && duality <= 1e-9;
  std::cout << "engine vs closed forms: max relative gap " << format_double(rel)
            << " (tolerance " << format_double(tol) << ")\n";
  std::cout << "duality max ||BA - I||: " << format_double(duality)
            << " (tolerance 1e-09)\n";
  std::cout << (pass ? "PASS" : "FAIL") << " validate-mmh at eps = " << format_double(eps)
            << "\n";
  if (!json_out.empty()) write_text_file(json_out, sweep_report_json(t));
  return pass ? 0 : 1;
}

int run_project(const CommonArgs& c, int q, double eps, double y0, double z0,
                const std::string& scheme_name) {
  const SystemDefinition sys = make_demo_system(c.system, c.kappa, c.lambda);
  const auto chain = build_chain(sys, q, RefinementMode::two_step);
  const Vec grid = make_grid(c.grid_min, c.grid_max, c.nodes);
  const CspmTable table = build_cspm(sys, chain[q], grid, eps);

  const StatePoint x0(y0, z0);
  const ProjectionResult pr = scheme_name == "vertical_base"
                                  ? project_vertical_base(x0, table, chain[q], eps)
                                  : project_fiber_search(x0, table, chain[q], eps);
  std::cout << "scheme: " << scheme_name << "\n";
  std::cout << "base: y = " << format_double(pr.base.y[0])
            << ", z = " << format_double(pr.base.z[0]) << "\n";
  std::cout << "amplitude: " << format_double(pr.amplitude[0])
            << ", iterations: " << pr.iterations
            << ", residual: " << format_double(pr.residual) << "\n";

  const StatePoint oracle = shooting_base(sys, x0, table, eps);
  const double gap = slow_phase_error(sys, pr.base, oracle, eps);
  std::cout << "shooting base: y = " << format_double(oracle.y[0])
            << ", slow-phase gap vs scheme: " << format_double(gap) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Iterative slow-manifold / fast-fiber toolkit"};
  app.require_subcommand(1);

  // validate-mmh
  auto* validate = app.add_subcommand(
      "validate-mmh", "compare the refinement engine against the closed-form references");
  CommonArgs vc;
  vc.attach(validate);
  double v_eps = 1e-3, v_tol = 1e-3;
  std::string v_json;
  validate->add_option("--eps", v_eps, "perturbation parameter");
  validate->add_option("--tol", v_tol, "max allowed relative gap");
  validate->add_option("--json", v_json, "write the comparison as a JSON report");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "run a convergence experiment over eps");
  CommonArgs sc;
  sc.attach(sweep);
  std::string s_exp = "manifold_error", s_mode = "two_step", s_policy = "current",
              s_scheme = "fiber_search", s_out, s_json, s_config;
  int s_q = 1;
  std::vector<double> s_eps;
  std::vector<double> s_x0;
  double s_horizon = 5.0, s_dt = 0.05;
  sweep->add_option("--exp", s_exp, "experiment name");
  sweep->add_option("--q", s_q, "refinement order");
  sweep->add_option("--mode", s_mode, "one_step or two_step");
  sweep->add_option("--policy", s_policy, "current or previous");
  sweep->add_option("--scheme", s_scheme, "fiber_search or vertical_base");
  sweep->add_option("--eps", s_eps, "eps values (repeatable)");
  sweep->add_option("--x0", s_x0, "initial condition y z (projection experiments)")
      ->expected(2);
  sweep->add_option("--horizon", s_horizon, "slow-time window for trajectory metrics");
  sweep->add_option("--dt", s_dt, "fast-time integration step");
  sweep->add_option("--out", s_out, "write rows as CSV");
  sweep->add_option("--json", s_json, "write the JSON report");
  sweep->add_option("--config", s_config, "key = value config file (flags override)");

  // manifold
  auto* manifold = app.add_subcommand("manifold", "tabulate one manifold approximation");
  CommonArgs mc;
  mc.attach(manifold);
  int m_q = 1;
  double m_eps = 1e-2;
  std::string m_out;
  manifold->add_option("--q", m_q, "refinement order");
  manifold->add_option("--eps", m_eps, "perturbation parameter");
  manifold->add_option("--out", m_out, "write the table as CSV");

  // fibers
  auto* fibers = app.add_subcommand("fibers", "tabulate fiber frames along the manifold");
  CommonArgs fc;
  fc.attach(fibers);
  int f_q = 1;
  double f_eps = 1e-2;
  std::string f_policy = "current", f_out;
  fibers->add_option("--q", f_q, "refinement order");
  fibers->add_option("--eps", f_eps, "perturbation parameter");
  fibers->add_option("--policy", f_policy, "current or previous");
  fibers->add_option("--out", f_out, "write frames as CSV");

  // project
  auto* project = app.add_subcommand("project", "project an initial condition to its base");
  CommonArgs pc;
  pc.attach(project);
  int p_q = 1;
  double p_eps = 1e-2;
  std::vector<double> p_x0;
  std::string p_scheme = "fiber_search";
  project->add_option("--q", p_q, "refinement order");
  project->add_option("--eps", p_eps, "perturbation parameter");
  project->add_option("--x0", p_x0, "initial condition y z")->expected(2)->required();
  project->add_option("--scheme", p_scheme, "fiber_search or vertical_base");

  // report
  auto* report = app.add_subcommand("report", "summarize sweep JSON reports");
  std::vector<std::string> r_paths;
  report->add_option("files", r_paths, "JSON report files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (validate->parsed()) return run_validate_mmh(vc, v_eps, v_tol, v_json);

    if (sweep->parsed()) {
      Experiment e;
      std::vector<double> eps_list;
      if (!s_config.empty()) {
        const auto kv = parse_config(s_config);
        e = experiment_from_config(kv, eps_list);
        if (s_out.empty() && kv.count("out")) s_out = kv.at("out");
        if (s_json.empty() && kv.count("json")) s_json = kv.at("json");
      }
      if (sweep->count("--exp") || s_config.empty())
        e.kind = experiment_kind_from_string(s_exp);
      if (sweep->count("--q") || s_config.empty()) e.q = s_q;
      if (sweep->count("--system") || s_config.empty()) e.system = sc.system;
      if (sweep->count("--kappa")) e.kappa = sc.kappa;
      if (sweep->count("--lambda")) e.lambda = sc.lambda;
      if (sweep->count("--grid-min")) e.grid_min = sc.grid_min;
      if (sweep->count("--grid-max")) e.grid_max = sc.grid_max;
      if (sweep->count("--nodes")) e.grid_nodes = sc.nodes;
      if (sweep->count("--mode"))
        e.mode = s_mode == "one_step" ? RefinementMode::one_step : RefinementMode::two_step;
      if (sweep->count("--policy"))
        e.policy = s_policy == "previous" ? EvalPolicy::previous : EvalPolicy::current;
      if (sweep->count("--scheme"))
        e.scheme = s_scheme == "vertical_base" ? ProjectionScheme::vertical_base
                                               : ProjectionScheme::fiber_search;
      if (!s_x0.empty()) e.x0 = StatePoint(s_x0[0], s_x0[1]);
      if (sweep->count("--horizon")) e.horizon = s_horizon;
      if (sweep->count("--dt")) e.dt = s_dt;
      if (!s_eps.empty()) eps_list = s_eps;
      if (eps_list.empty()) eps_list = default_eps_grid();

      const SweepTable t = run_sweep(e, eps_list);
      const SlopeBand band = expected_band(e.kind, e.q);
      std::cout << "experiment: " << to_string(e.kind) << " (q = " << e.q << ", system "
                << e.system << ")\n";
      std::cout << "eps,metric,aux\n";
      for (const auto& r : t.rows)
        std::cout << format_double(r.eps) << ',' << format_double(r.metric) << ','
                  << format_double(r.aux) << '\n';
      for (const auto& note : t.notes) std::cout << "note: " << note << '\n';
      const bool pass = t.fit.points_used > 0 && band_satisfied(band, t.fit.slope);
      std::cout << "slope = " << format_double(t.fit.slope)
                << " (r2 = " << format_double(t.fit.r2) << ", band [" << format_double(band.lo)
                << ", " << format_double(band.hi) << "]) -> " << (pass ? "PASS" : "FAIL")
                << "\n";
      if (!s_out.empty()) write_sweep_csv(t, s_out);
      if (!s_json.empty()) write_text_file(s_json, sweep_report_json(t));
      return pass ? 0 : 1;
    }

    if (manifold->parsed()) {
      const SystemDefinition sys = make_demo_system(mc.system, mc.kappa, mc.lambda);
      const auto chain = build_chain(sys, m_q, RefinementMode::two_step);
      const Vec grid = make_grid(mc.grid_min, mc.grid_max, mc.nodes);
      const CspmTable table = build_cspm(sys, chain[m_q], grid, m_eps);
      double max_resid = 0.0;
      for (double r : table.residuals) max_resid = std::max(max_resid, r);
      std::cout << "order " << table.order << " table on [" << format_double(mc.grid_min)
                << ", " << format_double(mc.grid_max) << "], " << table.nodes()
                << " nodes, eps = " << format_double(m_eps)
                << ", max node residual = " << format_double(max_resid) << "\n";
      if (!m_out.empty()) {
        write_cspm_csv(table, m_out);
        std::cout << "wrote " << m_out << "\n";
      }
      return 0;
    }

    if (fibers->parsed()) {
      const SystemDefinition sys = make_demo_system(fc.system, fc.kappa, fc.lambda);
      const auto chain = build_chain(sys, f_q, RefinementMode::two_step);
      const Vec grid = make_grid(fc.grid_min, fc.grid_max, fc.nodes);
      const CspmTable table = build_cspm(sys, chain[f_q], grid, f_eps);
      const EvalPolicy policy =
          f_policy == "previous" ? EvalPolicy::previous : EvalPolicy::current;
      std::ostringstream os;
      os << "y,z,col_y,col_z\n";
      for (int i = 0; i < grid.size(); ++i) {
        const FiberFrame frame = extract_cspf(chain[f_q], table, grid[i], f_eps, policy);
        os << format_double(frame.base.y[0]) << ',' << format_double(frame.base.z[0]) << ','
           << format_double(frame.columns(0, 0)) << ',' << format_double(frame.columns(1, 0))
           << '\n';
      }
      if (f_out.empty()) std::cout << os.str();
      else {
        write_text_file(f_out, os.str());
        std::cout << "wrote " << f_out << "\n";
      }
      return 0;
    }

    if (project->parsed())
      return run_project(pc, p_q, p_eps, p_x0[0], p_x0[1], p_scheme);

    if (report->parsed()) {
      std::string rendered;
      const bool ok = summarize_reports(r_paths, rendered);
      std::cout << rendered;
      return ok ? 0 : 1;
    }
  } catch (const PreconditionError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
