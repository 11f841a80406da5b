#ifndef CSP_MANIFOLD_HPP
#define CSP_MANIFOLD_HPP

#include <memory>
#include <vector>

#include "csp/basis.hpp"
#include "csp/spline.hpp"
#include "csp/system.hpp"

namespace csp {

/// Shared Newton controls for the manifold and projection solvers.
struct NewtonOptions {
  double residual_tol = 1e-12;
  double step_tol = 1e-13;
  int max_iterations = 50;
};

/*!
 * Tabulated graph of one manifold approximation order over a slow grid
 * (one slow variable). values[i] solves the order-q node equation at grid[i];
 * interp carries one spline per fast component. parent is the order (q-1)
 * table on the same grid (empty at order 0).
 */
struct CspmTable {
  int order = 0;
  Vec grid;
  std::vector<Vec> values;
  std::vector<double> residuals;
  double eps = 0.0;
  std::shared_ptr<const CspmTable> parent;
  std::vector<CubicSpline> interp;

  int nodes() const { return static_cast<int>(grid.size()); }
  double min_y() const { return grid.size() ? grid[0] : 0.0; }
  double max_y() const { return grid.size() ? grid[grid.size() - 1] : 0.0; }
};

struct CspmPointResult {
  Vec z;
  double residual = 0.0;
  int iterations = 0;
};

/*!
 * Solves the order-q node condition B1_(q) g = 0 for the fast coordinates at
 * fixed slow coordinates y. The fast rows B1 are frozen at (y, z_freeze),
 * which is also the initial guess; pass the previous-order manifold value
 * there (at order 0, B1 is constant and any in-range guess works). Throws
 * SolveError when Newton stalls.
 */
CspmPointResult solve_cspm_point(const SystemDefinition& sys, const BasisStack& basis,
                                 const Vec& y, const Vec& z_freeze, double eps,
                                 const NewtonOptions& opts = NewtonOptions{});

/*!
 * Builds the whole chain of tables, order 0 up to basis.level(), over one
 * grid. Each order freezes its fast rows on the previous order's node values.
 * Requires one slow variable and grid inside the system's slow domain.
 */
CspmTable build_cspm(const SystemDefinition& sys, const BasisStack& basis,
                     const Vec& grid, double eps,
                     const NewtonOptions& opts = NewtonOptions{});

/// Wraps precomputed node values as a table (residuals zero). For references
/// with a known graph.
CspmTable make_cspm_table(const Vec& grid, const std::vector<Vec>& values, double eps,
                          int order);

/// Interpolated fast coordinates at slow coordinate y (DomainError outside
/// the grid hull).
Vec eval_psi(const CspmTable& table, double y);

/// Interpolated slope d psi / dy, one row per fast component.
Vec eval_psi_slope(const CspmTable& table, double y);

/*!
 * Invariance defect || g2 - eps * (d psi / dy) g1 ||_inf of the interpolated
 * graph at an interior point of the grid (boundary nodes excluded: the slope
 * is one-sided there).
 */
double invariance_defect(const SystemDefinition& sys, const CspmTable& table, double y,
                         double eps);

}  // namespace csp

#endif
