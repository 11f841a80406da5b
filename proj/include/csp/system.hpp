#ifndef CSP_SYSTEM_HPP
#define CSP_SYSTEM_HPP

#include <functional>
#include <optional>
#include <string>

#include "csp/types.hpp"

namespace csp {

/*!
 * A fast-slow ODE system in fast time,
 *
 *   y' = eps * g1(y, z, eps)   (m slow components)
 *   z' = g2(y, z, eps)         (n fast components)
 *
 * State order is (slow, fast) everywhere. The critical manifold is the zero set
 * of g2 at eps = 0; normal hyperbolicity means the fast block D_z g2 has
 * eigenvalues with negative real parts there.
 */
class SystemDefinition {
 public:
  using FieldFn = std::function<Vec(const Vec& y, const Vec& z, double eps)>;
  using JacobianFn = std::function<Mat(const Vec& y, const Vec& z, double eps)>;

  SystemDefinition(std::string name, int m, int n, FieldFn g1, FieldFn g2, Box domain_K,
                   std::optional<JacobianFn> jacobian = std::nullopt,
                   Box fast_box = Box(-0.5, 1.5));

  const std::string& name() const { return name_; }
  int m() const { return m_; }
  int n() const { return n_; }
  int dim() const { return m_ + n_; }
  const Box& domain() const { return domain_K_; }
  const Box& fast_box() const { return fast_box_; }
  bool has_jacobian() const { return jacobian_.has_value(); }

  Vec g1(const Vec& y, const Vec& z, double eps) const;
  Vec g2(const Vec& y, const Vec& z, double eps) const;
  Mat analytic_jacobian(const Vec& y, const Vec& z, double eps) const;

 private:
  std::string name_;
  int m_, n_;
  FieldFn g1_, g2_;
  std::optional<JacobianFn> jacobian_;
  Box domain_K_;
  Box fast_box_;
};

/// Full vector field (eps*g1, g2) stacked in (slow, fast) order.
Vec eval_g(const SystemDefinition& sys, const StatePoint& x, double eps);

/// Analytic Jacobian if provided, else central differences with per-coordinate
/// step cbrt(machine epsilon) * max(1, |x_i|).
Mat eval_jacobian(const SystemDefinition& sys, const StatePoint& x, double eps);

/// Real parts of the eigenvalues of the fast block D_z g2.
Vec fast_spectrum(const SystemDefinition& sys, const Vec& y, const Vec& z, double eps);

/*!
 * Residual norm of the critical-manifold tangency identity at eps = 0:
 * || Dg(y, z, 0) * [I_m ; h0_slope] ||_F, which vanishes when (y, z) lies on
 * the critical manifold and h0_slope is its slope there.
 *
 * \p z must satisfy |g2(y, z, 0)| <= 1e-10 (PreconditionError otherwise);
 * \p h0_slope is n x m.
 */
double check_tangency_lemma(const SystemDefinition& sys, const Vec& y, const Vec& z,
                            const Mat& h0_slope);

/// Classical fixed-step RK4 in fast time. Throws DivergenceError when the state
/// norm exceeds 1e12.
Trajectory integrate(const SystemDefinition& sys, const StatePoint& x0, double eps,
                     double t_end, double dt);

/// Same stepper, but streams (t, stacked state) to an observer instead of
/// storing the trajectory; observe is called at t = 0 and after every step.
void integrate_observe(const SystemDefinition& sys, const StatePoint& x0, double eps,
                       double t_end, double dt,
                       const std::function<void(double, const Vec&)>& observe);

}  // namespace csp

#endif
