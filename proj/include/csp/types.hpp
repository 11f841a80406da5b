#ifndef CSP_TYPES_HPP
#define CSP_TYPES_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace csp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// State of a fast-slow system, slow block first.
struct StatePoint {
  Vec y;  ///< slow coordinates, size m
  Vec z;  ///< fast coordinates, size n

  StatePoint() = default;
  StatePoint(Vec y_, Vec z_) : y(std::move(y_)), z(std::move(z_)) {}
  /// Convenience for m = n = 1.
  StatePoint(double y_, double z_) : y(Vec::Constant(1, y_)), z(Vec::Constant(1, z_)) {}

  int m() const { return static_cast<int>(y.size()); }
  int n() const { return static_cast<int>(z.size()); }
  int dim() const { return m() + n(); }

  bool finite() const { return y.allFinite() && z.allFinite(); }
};

/// Stacks (y, z) into one vector, slow block first.
inline Vec to_vector(const StatePoint& x) {
  Vec v(x.dim());
  v.head(x.m()) = x.y;
  v.tail(x.n()) = x.z;
  return v;
}

inline StatePoint split_state(const Vec& v, int m, int n) {
  return StatePoint(v.head(m), v.tail(n));
}

/// Axis-aligned box.
struct Box {
  Vec lo, hi;

  Box() = default;
  Box(Vec lo_, Vec hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {}
  Box(double lo_, double hi_) : lo(Vec::Constant(1, lo_)), hi(Vec::Constant(1, hi_)) {}

  bool contains(const Vec& p, double slack = 0.0) const {
    for (int i = 0; i < p.size(); ++i)
      if (p[i] < lo[i] - slack || p[i] > hi[i] + slack) return false;
    return true;
  }
  double max_extent() const { return (hi - lo).maxCoeff(); }
};

struct Trajectory {
  std::vector<double> times;
  std::vector<StatePoint> states;
};

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Vector field or Jacobian produced a non-finite value.
struct EvaluationError : Error {
  using Error::Error;
};

/// A linear solve hit an (effectively) singular matrix.
struct SingularityError : Error {
  using Error::Error;
};

/// An iterative solve (manifold node, projection) failed to converge.
struct SolveError : Error {
  using Error::Error;
};

/// Query outside the domain an object was built on.
struct DomainError : Error {
  using Error::Error;
};

/// Trajectory norm exceeded the blow-up guard.
struct DivergenceError : Error {
  DivergenceError(const std::string& what, double last_time)
      : Error(what), last_valid_time(last_time) {}
  double last_valid_time;
};

struct PreconditionError : Error {
  using Error::Error;
};

}  // namespace csp

#endif
