#include "csp/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "csp/demo_systems.hpp"
#include "csp/mmh.hpp"

namespace csp {

namespace {

Vec linspace(double lo, double hi, int count) {
  Vec g(count);
  for (int i = 0; i < count; ++i) g[i] = lo + (hi - lo) * i / (count - 1);
  return g;
}

/// Reference manifold graph of the demo systems (through eps^2 for mmh).
Vec reference_manifold(const Experiment& e, double y, double eps) {
  if (e.system == "mmh")
    return Vec::Constant(1, mmh_slow_series(y, MmhParams{e.kappa, e.lambda}, eps, 2));
  if (e.system == "linear2d") return Vec::Constant(1, linear2d_manifold(y, eps));
  if (e.system == "tilted") return Vec::Zero(1);
  throw PreconditionError("manifold_error: no reference manifold for system '" + e.system +
                          "'");
}

int levels_needed(const Experiment& e) {
  switch (e.kind) {
    case ExperimentKind::lambda21_decay: return e.q + 1;
    case ExperimentKind::oracle_diff: return 2;
    default: return e.q;
  }
}

double rel_gap(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

struct MetricResult {
  double metric = 0.0;
  double aux = 0.0;
};

MetricResult eval_metric(const Experiment& e, const SystemDefinition& sys,
                         const std::vector<BasisStack>& chain, const Vec& grid,
                         double eps) {
  MetricResult out;
  switch (e.kind) {
    case ExperimentKind::manifold_error: {
      const CspmTable t = build_cspm(sys, chain[e.q], grid, eps);
      for (int i = 0; i < grid.size(); ++i)
        out.metric = std::max(out.metric, (t.values[i] - reference_manifold(e, grid[i], eps))
                                              .lpNorm<Eigen::Infinity>());
      return out;
    }
    case ExperimentKind::invariance_defect: {
      const CspmTable t = build_cspm(sys, chain[e.q], grid, eps);
      for (int i = 1; i + 1 < grid.size(); ++i)
        out.metric = std::max(out.metric, invariance_defect(sys, t, grid[i], eps));
      return out;
    }
    case ExperimentKind::fiber_angle: {
      if (e.system != "mmh")
        throw PreconditionError("fiber_angle: reference tangent exists only for mmh");
      const MmhParams p{e.kappa, e.lambda};
      const CspmTable t = build_cspm(sys, chain[e.q], grid, eps);
      for (int i = 0; i < grid.size(); ++i) {
        const FiberFrame f = extract_cspf(chain[e.q], t, grid[i], eps, e.policy);
        const Mat ref = mmh_fiber_tangent(grid[i], p, eps, 2);
        out.metric = std::max(out.metric, principal_angle(f.columns, ref));
      }
      return out;
    }
    case ExperimentKind::lambda12_decay:
    case ExperimentKind::lambda21_decay: {
      const bool is21 = e.kind == ExperimentKind::lambda21_decay;
      const CspmTable t = build_cspm(sys, chain[is21 ? e.q + 1 : e.q], grid, eps);
      for (int i = 0; i < grid.size(); ++i) {
        const StatePoint x(grid.segment(i, 1), t.values[i]);
        const LambdaBlocks lb = lambda_blocks(sys, chain[e.q], x, eps);
        const Mat& block = is21 ? lb.L21 : lb.L12;
        out.metric = std::max(out.metric, block.lpNorm<Eigen::Infinity>());
        out.aux = std::max(out.aux, lb.L11.lpNorm<Eigen::Infinity>());
      }
      return out;
    }
    case ExperimentKind::projection_error: {
      const CspmTable t = build_cspm(sys, chain[e.q], grid, eps);
      const ProjectionResult pr =
          e.scheme == ProjectionScheme::fiber_search
              ? project_fiber_search(e.x0, t, chain[e.q], eps)
              : project_vertical_base(e.x0, t, chain[e.q], eps);
      const StatePoint oracle = shooting_base(sys, e.x0, t, eps, e.horizon, e.dt);
      out.metric = slow_phase_error(sys, pr.base, oracle, eps, e.horizon, e.dt);
      out.aux = pr.residual;
      return out;
    }
    case ExperimentKind::oracle_diff: {
      if (e.system != "mmh")
        throw PreconditionError("oracle_diff: closed forms exist only for mmh");
      const MmhParams p{e.kappa, e.lambda};
      const CspmTable t2 = build_cspm(sys, chain[2], grid, eps);
      const CspmTable& t1 = *t2.parent;
      for (int i = 0; i < grid.size(); ++i) {
        const double y = grid[i];
        out.metric = std::max(out.metric,
                              rel_gap(t1.values[i][0], mmh_cspm_closed(y, p, eps, 1)));
        out.metric = std::max(out.metric,
                              rel_gap(t2.values[i][0], mmh_cspm_closed(y, p, eps, 2)));
        for (int q = 1; q <= 2; ++q) {
          const CspmTable& t = q == 1 ? t1 : t2;
          const StatePoint x(grid.segment(i, 1), t.values[i]);
          const Vec col = evaluate_basis(chain[q], x, eps).first.col(0);
          const Eigen::Vector2d closed = mmh_fast_column(y, p, eps, q);
          for (int k = 0; k < 2; ++k)
            out.metric = std::max(out.metric, rel_gap(col[k], closed[k]));
        }
      }
      return out;
    }
  }
  throw PreconditionError("run_sweep: unhandled experiment kind");
}

}  // namespace

std::vector<double> log_spaced(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2)
    throw PreconditionError("log_spaced: need 0 < lo < hi and count >= 2");
  std::vector<double> out(count);
  const double llo = std::log10(lo), lhi = std::log10(hi);
  for (int i = 0; i < count; ++i)
    out[i] = std::pow(10.0, llo + (lhi - llo) * i / (count - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> default_eps_grid() { return log_spaced(1e-4, std::pow(10.0, -1.5), 7); }

FitResult fit_order(const std::vector<SweepRow>& rows) {
  std::vector<double> xs, ys;
  for (const auto& r : rows) {
    if (r.metric > 0.0 && r.eps > 0.0) {
      xs.push_back(std::log(r.eps));
      ys.push_back(std::log(r.metric));
    }
  }
  const int k = static_cast<int>(xs.size());
  if (k < 5)
    throw Error("fit_order: need at least 5 positive data points, have " +
                std::to_string(k));

  double sx = 0, sy = 0;
  for (int i = 0; i < k; ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / k, my = sy / k;
  double sxx = 0, sxy = 0;
  for (int i = 0; i < k; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  FitResult f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0, ss_tot = 0;
  for (int i = 0; i < k; ++i) {
    const double pred = f.intercept + f.slope * xs[i];
    ss_res += (ys[i] - pred) * (ys[i] - pred);
    ss_tot += (ys[i] - my) * (ys[i] - my);
  }
  f.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  f.points_used = k;
  return f;
}

SweepTable run_sweep(const Experiment& e, const std::vector<double>& eps_list) {
  if (eps_list.empty()) throw PreconditionError("run_sweep: empty eps list");
  if (e.q < 0) throw PreconditionError("run_sweep: q must be >= 0");
  if (e.grid_nodes < 4 || !(e.grid_max > e.grid_min))
    throw PreconditionError("run_sweep: need grid_max > grid_min and at least 4 nodes");

  const SystemDefinition sys = make_demo_system(e.system, e.kappa, e.lambda);
  const Vec grid = linspace(e.grid_min, e.grid_max, e.grid_nodes);

  std::vector<BasisStack> chain;
  chain.push_back(initial_basis(sys.m(), sys.n(), std::nullopt, e.mode));
  for (int q = 0; q < levels_needed(e); ++q) chain.push_back(refine(sys, chain.back()));

  SweepTable table;
  table.exp = e;
  for (double eps : eps_list) {
    const MetricResult mr = eval_metric(e, sys, chain, grid, eps);
    table.rows.push_back({eps, mr.metric, mr.aux});
  }

  try {
    table.fit = fit_order(table.rows);
  } catch (const Error& err) {
    table.notes.emplace_back(err.what());
  }
  int skipped = 0;
  for (const auto& r : table.rows)
    if (!(r.metric > 0.0)) ++skipped;
  if (skipped > 0)
    table.notes.push_back(std::to_string(skipped) +
                          " rows with non-positive metric excluded from the fit");
  return table;
}

SlopeBand expected_band(ExperimentKind kind, int q) {
  const double inf = std::numeric_limits<double>::infinity();
  switch (kind) {
    case ExperimentKind::manifold_error:
    case ExperimentKind::fiber_angle:
      return {q + 0.8, q + 1.5};
    case ExperimentKind::invariance_defect:
    case ExperimentKind::lambda21_decay:
      return {q + 0.8, inf};
    case ExperimentKind::lambda12_decay:
      return {q - 0.2, inf};
    case ExperimentKind::projection_error:
      return {0.8, inf};
    case ExperimentKind::oracle_diff:
      return {-inf, inf};
  }
  return {-inf, inf};
}

bool band_satisfied(const SlopeBand& band, double slope) {
  return slope >= band.lo && slope <= band.hi;
}

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::manifold_error: return "manifold_error";
    case ExperimentKind::invariance_defect: return "invariance_defect";
    case ExperimentKind::fiber_angle: return "fiber_angle";
    case ExperimentKind::lambda12_decay: return "lambda12_decay";
    case ExperimentKind::lambda21_decay: return "lambda21_decay";
    case ExperimentKind::projection_error: return "projection_error";
    case ExperimentKind::oracle_diff: return "oracle_diff";
  }
  return "unknown";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
  for (ExperimentKind k :
       {ExperimentKind::manifold_error, ExperimentKind::invariance_defect,
        ExperimentKind::fiber_angle, ExperimentKind::lambda12_decay,
        ExperimentKind::lambda21_decay, ExperimentKind::projection_error,
        ExperimentKind::oracle_diff}) {
    if (name == to_string(k)) return k;
  }
  throw PreconditionError("unknown experiment '" + name + "'");
}

}  // namespace csp
