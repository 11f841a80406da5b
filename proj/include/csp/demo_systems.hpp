#ifndef CSP_DEMO_SYSTEMS_HPP
#define CSP_DEMO_SYSTEMS_HPP

#include <string>
#include <vector>

#include "csp/system.hpp"

namespace csp {

/*!
 * Built-in example systems:
 *
 *   "mmh"      Michaelis-Menten-Henri enzyme kinetics (kappa, lambda apply)
 *   "linear2d" y' = -eps y, z' = -z + eps y; exact slow manifold
 *              z = eps y / (1 - eps), vertical fast fibers
 *   "tilted"   y' = -eps y (1 + z / (1 + eps z)), z' = -z; slow manifold is
 *              z = 0 at every order, fast fibers are the straight lines
 *              (b (1 + eps z), z), so the fiber through x0 hits the manifold
 *              at y = y0 / (1 + eps z0)
 *
 * kappa and lambda are ignored by systems that do not use them. Unknown names
 * throw PreconditionError.
 */
SystemDefinition make_demo_system(const std::string& name, double kappa = 1.0,
                                  double lambda = 0.5);

std::vector<std::string> demo_system_names();

/// Exact slow manifold of "linear2d".
double linear2d_manifold(double y, double eps);

/// Exact fiber base point of "tilted" for the initial condition x0.
StatePoint tilted_true_base(const StatePoint& x0, double eps);

}  // namespace csp

#endif
