#ifndef CSP_CALCULUS_HPP
#define CSP_CALCULUS_HPP

#include <cmath>
#include <functional>
#include <limits>

#include "csp/system.hpp"
#include "csp/types.hpp"

namespace csp {

/// Default first-derivative step: balances truncation against rounding for
/// 2-point central differences on smooth fields.
inline double default_fd_step() {
  return std::cbrt(std::numeric_limits<double>::epsilon());
}

/*!
 * A point-dependent r x c matrix (a basis, a basis column, ...). Evaluators
 * must be deterministic and re-entrant. Fields built from derivative-bearing
 * evaluations carry a larger recommended_step and may request the 4-point
 * stencil (fd_order = 4), whose O(h^4) truncation keeps nested differentiation
 * meaningful when the evaluator itself is only accurate to ~1e-10.
 */
struct MatrixField {
  std::function<Mat(const StatePoint&, double eps)> evaluator;
  int rows = 0;
  int cols = 0;
  int m = 0;  ///< slow dimension of the underlying state
  int n = 0;  ///< fast dimension
  double recommended_step = default_fd_step();
  int fd_order = 2;  ///< 2 or 4
  bool is_constant = false;

  Mat eval(const StatePoint& x, double eps) const { return evaluator(x, eps); }
  Mat eval(const Vec& x, double eps) const { return evaluator(split_state(x, m, n), eps); }
};

/*!
 * Directional derivative (DF)(x) v by central differences along the normalized
 * direction: (F(x + h v^) - F(x - h v^)) / (2h) * ||v||, column-wise on matrix
 * fields. fd_order = 4 uses the 4-point stencil (F(x-2h) - 8F(x-h) + 8F(x+h)
 * - F(x+2h)) / (12h) * ||v||. Zero direction gives the zero matrix; a non-finite
 * evaluation triggers one step-reduction retry before failing.
 */
Mat directional_derivative(const MatrixField& F, const StatePoint& x, const Vec& v,
                           double eps);

/// (DF)(x) g(x): the time derivative of F along the flow of sys. Exact zero for
/// constant fields.
Mat field_time_derivative(const SystemDefinition& sys, const MatrixField& F,
                          const StatePoint& x, double eps);

/// Lie bracket [a, g](x) = (Dg)(x) a(x) - (Da)(x) g(x) for a single-column field.
Vec lie_bracket(const SystemDefinition& sys, const MatrixField& a, const StatePoint& x,
                double eps);

/// Wraps a fixed matrix as a constant field (derivatives short-circuit to zero).
MatrixField constant_field(const Mat& value, int m, int n);

}  // namespace csp

#endif
