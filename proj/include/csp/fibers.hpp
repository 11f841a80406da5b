#ifndef CSP_FIBERS_HPP
#define CSP_FIBERS_HPP

#include "csp/basis.hpp"
#include "csp/manifold.hpp"

namespace csp {

/// Where the fast columns are evaluated: on the order-q manifold table
/// (current) or on the order (q-1) table (previous).
enum class EvalPolicy { current, previous };

/// Fast-fiber tangent frame at a base point: the n fast columns of A^(q).
struct FiberFrame {
  StatePoint base;
  Mat columns;  ///< (m+n) x n, state-order rows
  int order = 0;
  EvalPolicy policy = EvalPolicy::current;
};

/*!
 * Extracts the order-q fiber frame at slow coordinate y. policy = previous
 * evaluates the same columns on the order (q-1) graph and requires q >= 1.
 * Throws SolveError if the extracted columns are numerically rank deficient.
 */
FiberFrame extract_cspf(const BasisStack& basis, const CspmTable& table, double y,
                        double eps, EvalPolicy policy = EvalPolicy::current);

/*!
 * Largest principal angle between the column spans of F1 and F2 (equal column
 * counts, full column rank), in radians within [0, pi/2]. Computed from the
 * singular values of both the cross-Gram of the orthonormalized frames and its
 * orthogonal complement, pairing sines with cosines so angles near 0 and near
 * pi/2 are equally well conditioned.
 */
double principal_angle(const Mat& F1, const Mat& F2);

}  // namespace csp

#endif
