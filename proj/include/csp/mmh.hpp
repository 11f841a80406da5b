#ifndef CSP_MMH_HPP
#define CSP_MMH_HPP

#include <Eigen/Dense>

#include "csp/system.hpp"

namespace csp {

/// Parameters of the Michaelis-Menten-Henri enzyme model. Requires
/// kappa > lambda > 0, which keeps the slow manifold attracting on s >= 0.
struct MmhParams {
  double kappa = 1.0;
  double lambda = 0.5;
};

/*!
 * The planar MMH system in fast time,
 *
 *   s' = eps * (-s + (s + kappa - lambda) c)
 *   c' = s - (s + kappa) c
 *
 * with analytic Jacobian, slow domain [0.1, 2]. The critical manifold is
 * c = h0(s) = s / (s + kappa) and the fast relaxation rate is -(s + kappa).
 */
SystemDefinition mmh_system(const MmhParams& p = MmhParams{});

/// Critical manifold c = h0(s).
double mmh_h0(double s, const MmhParams& p = MmhParams{});
/// d h0 / ds.
double mmh_h0_slope(double s, const MmhParams& p = MmhParams{});
/// First slow-manifold correction: h_eps = h0 + eps h1 + eps^2 h2 + ...
double mmh_h1(double s, const MmhParams& p = MmhParams{});
/// Second slow-manifold correction.
double mmh_h2(double s, const MmhParams& p = MmhParams{});

/// Slow-manifold series h0 + eps h1 + ... truncated after the given order
/// (0, 1, or 2).
double mmh_slow_series(double s, const MmhParams& p, double eps, int order);

/*!
 * Closed form of the iteratively refined manifold approximation of order q
 * (1 or 2), as a function on the slow variable. Order 1 matches the series
 * through eps^1 but carries a wrong eps^2 coefficient; order 2 matches the
 * series through eps^2.
 */
double mmh_cspm_closed(double s, const MmhParams& p, double eps, int q);

/*!
 * Closed form of the refined fast basis column A1^(q) (q = 1 or 2) evaluated
 * on the order-q manifold approximation, components (slow, fast).
 */
Eigen::Vector2d mmh_fast_column(double s, const MmhParams& p, double eps, int q);

/*!
 * Asymptotic fast-fiber tangent at the base point (s, h_eps(s)), normalized so
 * the leading fast component is 1, truncated after the given order (0, 1, 2).
 * The order-2 truncation equals mmh_fast_column(q = 2) identically.
 */
Eigen::Vector2d mmh_fiber_tangent(double s, const MmhParams& p, double eps, int order);

/// Closed forms (through eps^2) of the level-1 Lambda blocks at a general
/// point (s, c); L21 is O(eps^2) so its relative accuracy is the weakest.
struct Lambda1Closed {
  double L11, L12, L21, L22;
};
Lambda1Closed mmh_lambda1_closed(double s, double c, const MmhParams& p, double eps);

}  // namespace csp

#endif
