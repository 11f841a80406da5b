#ifndef CSP_SPLINE_HPP
#define CSP_SPLINE_HPP

#include <array>
#include <vector>

#include "csp/types.hpp"

namespace csp {

/*!
 * Cubic interpolating spline with not-a-knot end conditions (the first two and
 * last two polynomial pieces coincide). Exact at the nodes and exact for any
 * single cubic polynomial. Two nodes degenerate to a line, three to the unique
 * parabola.
 */
class CubicSpline {
 public:
  CubicSpline() = default;
  /// Nodes must be strictly increasing, at least two of them.
  CubicSpline(const Vec& x, const Vec& y);

  /// Interpolant value; DomainError outside the node hull (tiny slack for
  /// roundoff).
  double eval(double t) const;
  /// First derivative of the interpolant.
  double deriv(double t) const;

  double min_x() const { return x_.size() ? x_[0] : 0.0; }
  double max_x() const { return x_.size() ? x_[x_.size() - 1] : 0.0; }

 private:
  Vec x_;
  std::vector<std::array<double, 4>> coef_;  // value, slope, half-curvature, jerk/6

  int interval(double t) const;
};

}  // namespace csp

#endif
