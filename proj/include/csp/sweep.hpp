#ifndef CSP_SWEEP_HPP
#define CSP_SWEEP_HPP

#include <string>
#include <vector>

#include "csp/fibers.hpp"
#include "csp/projection.hpp"

namespace csp {

/*!
 * Convergence experiments. Each one produces a scalar metric per eps; the
 * fitted log-log slope against eps is the observed order.
 *
 *   manifold_error    max node deviation of the order-q table from the
 *                     system's reference manifold
 *   invariance_defect max interior-node invariance defect of the order-q table
 *   fiber_angle       max principal angle between the order-q frame and the
 *                     order-2 asymptotic fiber tangent (mmh only)
 *   lambda12_decay    max ||Lambda12_(q)|| over nodes, measured on the order-q
 *                     graph
 *   lambda21_decay    max ||Lambda21_(q)|| over nodes, measured on the order
 *                     (q+1) graph
 *   projection_error  slow-phase gap between the configured scheme's base and
 *                     the shooting reference base for x0
 *   oracle_diff       max relative gap between the engine and the closed-form
 *                     manifold/fast-column expressions (mmh only)
 */
enum class ExperimentKind {
  manifold_error,
  invariance_defect,
  fiber_angle,
  lambda12_decay,
  lambda21_decay,
  projection_error,
  oracle_diff,
};

struct Experiment {
  ExperimentKind kind = ExperimentKind::manifold_error;
  std::string system = "mmh";
  double kappa = 1.0;
  double lambda = 0.5;
  int q = 1;
  RefinementMode mode = RefinementMode::two_step;
  EvalPolicy policy = EvalPolicy::current;
  ProjectionScheme scheme = ProjectionScheme::fiber_search;
  double grid_min = 0.5;
  double grid_max = 2.0;
  int grid_nodes = 64;
  StatePoint x0{1.0, 0.7};  ///< projection experiments only
  double horizon = 5.0;     ///< slow-time window for trajectory metrics
  double dt = 0.05;         ///< fast-time integration step
};

/// aux carries a secondary per-eps quantity where one exists (the lambda
/// experiments store max ||Lambda11|| there).
struct SweepRow {
  double eps = 0.0;
  double metric = 0.0;
  double aux = 0.0;
};

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int points_used = 0;
};

struct SweepTable {
  Experiment exp;
  std::vector<SweepRow> rows;
  FitResult fit;
  std::vector<std::string> notes;
};

/// count >= 2 points, log-uniform from lo to hi inclusive.
std::vector<double> log_spaced(double lo, double hi, int count);

/// The standard eps window: seven points from 1e-4 to 10^(-1.5).
std::vector<double> default_eps_grid();

/// Least-squares line through (log eps, log metric). Rows with metric <= 0 are
/// skipped; fewer than five usable rows raise Error. A constant metric fits
/// slope 0 with r2 = 1.
FitResult fit_order(const std::vector<SweepRow>& rows);

/// Runs one experiment over the given eps values (deterministic; bases and
/// grids are rebuilt per eps, the basis chain is shared).
SweepTable run_sweep(const Experiment& e, const std::vector<double>& eps_list);

/// Acceptance band for the fitted slope of an experiment at order q; hi may be
/// +infinity when only a lower bound is meaningful.
struct SlopeBand {
  double lo = 0.0;
  double hi = 0.0;
};
SlopeBand expected_band(ExperimentKind kind, int q);
bool band_satisfied(const SlopeBand& band, double slope);

const char* to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

}  // namespace csp

#endif
