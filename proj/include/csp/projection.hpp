#ifndef CSP_PROJECTION_HPP
#define CSP_PROJECTION_HPP

#include "csp/basis.hpp"
#include "csp/manifold.hpp"

namespace csp {

enum class ProjectionScheme { fiber_search, vertical_base };

/// Result of projecting an off-manifold initial condition onto a manifold
/// table. amplitude holds the fast-frame coefficients of the offset.
struct ProjectionResult {
  StatePoint base;
  ProjectionScheme scheme = ProjectionScheme::fiber_search;
  Vec amplitude;
  int iterations = 0;
  double residual = 0.0;
};

/*!
 * Finds the base point whose fiber frame reaches x0: solves
 * x0 = (y, psi(y)) + A1(y, psi(y)) a for (y, a) by damped Newton with
 * finite-difference Jacobian. The base is constrained to the table hull.
 */
ProjectionResult project_fiber_search(const StatePoint& x0, const CspmTable& table,
                                      const BasisStack& basis, double eps,
                                      const NewtonOptions& opts = NewtonOptions{});

/*!
 * Cheaper scheme that freezes the frame at the point directly below x0: it
 * intersects the line x0 + span A1(y0, psi(y0)) with the manifold graph. First
 * order accurate in the fast offset where the fibers curve or tilt.
 */
ProjectionResult project_vertical_base(const StatePoint& x0, const CspmTable& table,
                                       const BasisStack& basis, double eps,
                                       const NewtonOptions& opts = NewtonOptions{});

/*!
 * Asymptotic slow mismatch of two initial conditions: integrates both over
 * [0, horizon / eps] in fast time and returns the largest slow-coordinate gap
 * over the trailing 20 percent of the window, where fast transients are dead.
 */
double slow_phase_error(const SystemDefinition& sys, const StatePoint& a,
                        const StatePoint& b, double eps, double horizon = 5.0,
                        double dt = 0.05);

/*!
 * Reference projection for one slow variable: bisects over base candidates
 * (b, psi(b)) for the sign change of the trailing slow gap against the
 * trajectory of x0. Independent of the fiber frames, so it checks them.
 */
StatePoint shooting_base(const SystemDefinition& sys, const StatePoint& x0,
                         const CspmTable& table, double eps, double horizon = 5.0,
                         double dt = 0.05);

}  // namespace csp

#endif
