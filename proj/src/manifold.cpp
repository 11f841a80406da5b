#include "csp/manifold.hpp"

#include <cmath>
#include <string>

namespace csp {

namespace {

std::vector<CubicSpline> build_interp(const Vec& grid, const std::vector<Vec>& values) {
  if (grid.size() < 2) throw PreconditionError("cspm table: need at least two grid nodes");
  const int n = static_cast<int>(values.front().size());
  std::vector<CubicSpline> out;
  out.reserve(n);
  Vec col(grid.size());
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < grid.size(); ++i) col[i] = values[i][k];
    out.emplace_back(grid, col);
  }
  return out;
}

void require_in_hull(const CspmTable& table, double y) {
  const double slack = 1e-12 * std::max(1.0, table.max_y() - table.min_y());
  if (y < table.min_y() - slack || y > table.max_y() + slack)
    throw DomainError("cspm table: slow coordinate " + std::to_string(y) +
                      " outside the tabulated range [" + std::to_string(table.min_y()) +
                      ", " + std::to_string(table.max_y()) + "]");
}

}  // namespace

CspmPointResult solve_cspm_point(const SystemDefinition& sys, const BasisStack& basis,
                                 const Vec& y, const Vec& z_freeze, double eps,
                                 const NewtonOptions& opts) {
  const int n = sys.n();
  if (y.size() != sys.m() || z_freeze.size() != n)
    throw PreconditionError("solve_cspm_point: state dimensions do not match the system");

  const Mat B = evaluate_basis(basis, StatePoint(y, z_freeze), eps).second;
  const Mat B1 = B.topRows(n);
  const double step_cap = 0.5 * sys.fast_box().max_extent();

  auto residual_of = [&](const Vec& z) -> Vec {
    return B1 * eval_g(sys, StatePoint(y, z), eps);
  };

  Vec z = z_freeze;
  Vec F = residual_of(z);
  double resid = F.lpNorm<Eigen::Infinity>();
  int iter = 0;
  bool converged = resid < opts.residual_tol;

  while (!converged && iter < opts.max_iterations) {
    ++iter;
    const Mat J = eval_jacobian(sys, StatePoint(y, z), eps);
    Vec dz = (B1 * J.rightCols(n)).partialPivLu().solve(-F);
    if (!dz.allFinite())
      throw SolveError("solve_cspm_point: singular Newton step at order " +
                       std::to_string(basis.level()) + ", y = " + std::to_string(y[0]) +
                       ", eps = " + std::to_string(eps));
    const double dznorm = dz.lpNorm<Eigen::Infinity>();
    if (dznorm > step_cap) dz *= step_cap / dznorm;
    z += dz;
    F = residual_of(z);
    resid = F.lpNorm<Eigen::Infinity>();
    if (resid < opts.residual_tol) converged = true;
    else if (dznorm < opts.step_tol) break;
  }

  if (!converged)
    throw SolveError("solve_cspm_point: no convergence after " + std::to_string(iter) +
                     " iterations at order " + std::to_string(basis.level()) + ", y = " +
                     std::to_string(y[0]) + ", eps = " + std::to_string(eps) +
                     " (residual " + std::to_string(resid) + ")");

  // One polishing step: the tolerance test passes one iteration before the
  // quadratic tail would flatten out at rounding level.
  {
    const Mat J = eval_jacobian(sys, StatePoint(y, z), eps);
    Vec dz = (B1 * J.rightCols(n)).partialPivLu().solve(-F);
    if (dz.allFinite() && dz.lpNorm<Eigen::Infinity>() < step_cap) {
      Vec z2 = z + dz;
      Vec F2 = residual_of(z2);
      if (F2.allFinite() && F2.lpNorm<Eigen::Infinity>() <= resid) {
        z = z2;
        resid = F2.lpNorm<Eigen::Infinity>();
        ++iter;
      }
    }
  }

  return {z, resid, iter};
}

CspmTable build_cspm(const SystemDefinition& sys, const BasisStack& basis,
                     const Vec& grid, double eps, const NewtonOptions& opts) {
  if (sys.m() != 1)
    throw PreconditionError("build_cspm: tables require exactly one slow variable");
  if (grid.size() < 2) throw PreconditionError("build_cspm: need at least two grid nodes");
  for (int i = 0; i < grid.size(); ++i) {
    if (i + 1 < grid.size() && !(grid[i + 1] > grid[i]))
      throw PreconditionError("build_cspm: grid must be strictly increasing");
    if (!sys.domain().contains(grid.segment(i, 1), 1e-12))
      throw PreconditionError("build_cspm: grid node " + std::to_string(grid[i]) +
                              " outside the slow domain");
  }

  std::vector<BasisStack> chain;
  chain.push_back(basis);
  for (auto p = basis.parent(); p; p = p->parent()) chain.push_back(*p);
  std::reverse(chain.begin(), chain.end());

  const Vec center = 0.5 * (sys.fast_box().lo + sys.fast_box().hi);
  std::shared_ptr<const CspmTable> prev;
  for (std::size_t q = 0; q < chain.size(); ++q) {
    CspmTable t;
    t.order = static_cast<int>(q);
    t.grid = grid;
    t.eps = eps;
    t.parent = prev;
    t.values.reserve(grid.size());
    t.residuals.reserve(grid.size());
    for (int i = 0; i < grid.size(); ++i) {
      const Vec y = grid.segment(i, 1);
      const Vec freeze = prev ? prev->values[i] : center;
      CspmPointResult r = solve_cspm_point(sys, chain[q], y, freeze, eps, opts);
      t.values.push_back(std::move(r.z));
      t.residuals.push_back(r.residual);
    }
    t.interp = build_interp(grid, t.values);
    prev = std::make_shared<const CspmTable>(std::move(t));
  }
  return *prev;
}

CspmTable make_cspm_table(const Vec& grid, const std::vector<Vec>& values, double eps,
                          int order) {
  if (static_cast<int>(values.size()) != grid.size())
    throw PreconditionError("make_cspm_table: one value per grid node required");
  CspmTable t;
  t.order = order;
  t.grid = grid;
  t.eps = eps;
  t.values = values;
  t.residuals.assign(values.size(), 0.0);
  t.interp = build_interp(grid, t.values);
  return t;
}

Vec eval_psi(const CspmTable& table, double y) {
  require_in_hull(table, y);
  Vec out(static_cast<int>(table.interp.size()));
  for (std::size_t k = 0; k < table.interp.size(); ++k)
    out[static_cast<int>(k)] = table.interp[k].eval(y);
  return out;
}

Vec eval_psi_slope(const CspmTable& table, double y) {
  require_in_hull(table, y);
  Vec out(static_cast<int>(table.interp.size()));
  for (std::size_t k = 0; k < table.interp.size(); ++k)
    out[static_cast<int>(k)] = table.interp[k].deriv(y);
  return out;
}

double invariance_defect(const SystemDefinition& sys, const CspmTable& table, double y,
                         double eps) {
  if (!(y > table.min_y() && y < table.max_y()))
    throw DomainError("invariance_defect: point must be strictly inside the grid hull");
  const Vec z = eval_psi(table, y);
  const Vec slope = eval_psi_slope(table, y);
  const Vec yv = Vec::Constant(1, y);
  const Vec g1 = sys.g1(yv, z, eps);
  const Vec g2 = sys.g2(yv, z, eps);
  return (g2 - eps * slope * g1[0]).lpNorm<Eigen::Infinity>();
}

}  // namespace csp
