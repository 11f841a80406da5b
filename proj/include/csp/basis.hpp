#ifndef CSP_BASIS_HPP
#define CSP_BASIS_HPP

#include <memory>
#include <optional>

#include "csp/calculus.hpp"
#include "csp/system.hpp"
#include "csp/types.hpp"

namespace csp {

/// How a refinement sweep updates the basis pair.
///   two_step: A <- A(I-U)(I+L), B <- (I-L)(I+U)B  (manifold and fibers)
///   one_step: A <- A(I-U),      B <- (I+U)B       (manifold only)
enum class RefinementMode { one_step, two_step };

/// Tunables for the refinement engine. The defaults are what the test suite
/// and the CLI use; deep_level_step trades truncation error for roundoff when
/// differentiating basis fields that are themselves finite-difference chains.
struct EngineOptions {
  double first_level_step = default_fd_step();  ///< FD step for level-1 fields
  double deep_level_step = 2e-3;   ///< FD step for level >= 2 fields
  int deep_fd_order = 4;           ///< stencil order for level >= 2 fields
  double cond_threshold = 1e8;     ///< max condition number of the fast block
};

/// The blocks of Lambda = B (Dg) A - B dA/dt in the current basis, index 1
/// being the fast (first n) rows/columns. cond11 is the condition number of
/// L11, whose inverse drives the refinement.
struct LambdaBlocks {
  Mat L11;  ///< n x n fast-fast
  Mat L12;  ///< n x m fast-slow
  Mat L21;  ///< m x n slow-fast
  Mat L22;  ///< m x m slow-slow
  double cond11 = 0.0;
  StatePoint point;  ///< where the blocks were evaluated
  double eps = 0.0;

  int n() const { return static_cast<int>(L11.rows()); }
  int m() const { return static_cast<int>(L22.rows()); }
  /// Assembled (m+n) x (m+n) matrix in block order [fast; slow].
  Mat full() const;
};

/// The two elementary update factors for one refinement sweep, embedded into
/// (m+n) x (m+n) matrices. U has its only nonzero block in the upper-right
/// (fast rows, slow columns), L in the lower-left, so both square to zero.
struct RefinementMatrices {
  Mat U;    ///< (m+n)^2, upper-right block U12 = L11^{-1} L12
  Mat L;    ///< (m+n)^2, lower-left block L21 = Lambda21 L11^{-1}
  Mat U12;  ///< n x m
  Mat L21;  ///< m x n
};

/// Optional override for the level-0 basis blocks. Defaults give
/// A^(0) = [[0, I],[I, 0]] (fast columns along the fast coordinates).
struct InitialBlocks {
  Mat A12;  ///< m x m, invertible
  Mat A21;  ///< n x n, invertible
  Mat A22;  ///< n x m
};

/// One level of the refinement chain. Level 0 holds constant matrices; each
/// deeper level evaluates its parent, forms Lambda there, and applies the
/// update factors. A and B are always produced by the same U and L values at
/// a point, which keeps B A = I to rounding at every level.
class BasisStack {
 public:
  int level() const;
  RefinementMode mode() const;
  int m() const;
  int n() const;
  const EngineOptions& options() const;
  /// Parent stack (one level shallower); empty at level 0.
  std::shared_ptr<const BasisStack> parent() const;

  /// Column-basis field A^(q). For level >= 1 each evaluation runs the whole
  /// chain below it, including the finite-difference time derivatives.
  MatrixField A_field() const;
  /// Row-basis field B_(q), dual to A_field.
  MatrixField B_field() const;

  struct Node;
  explicit BasisStack(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  const std::shared_ptr<const Node>& node() const { return node_; }

 private:
  std::shared_ptr<const Node> node_;
};

/// Level-0 stack for an m-slow / n-fast system. Throws PreconditionError if a
/// supplied block is not invertible or has the wrong shape.
BasisStack initial_basis(int m, int n,
                         const std::optional<InitialBlocks>& blocks = std::nullopt,
                         RefinementMode mode = RefinementMode::two_step,
                         const EngineOptions& options = EngineOptions{});

/// Evaluate A^(q) and B_(q) together at a point. BA = I to rounding.
std::pair<Mat, Mat> evaluate_basis(const BasisStack& basis, const StatePoint& x,
                                   double eps);

/// Lambda blocks of the given stack level at a point. Level 0 has an exactly
/// zero dA/dt term; deeper levels differentiate the parent chain numerically.
LambdaBlocks lambda_blocks(const SystemDefinition& sys, const BasisStack& basis,
                           const StatePoint& x, double eps);

/// Update factors from Lambda blocks. Throws SingularityError (carrying the
/// evaluation point) when L11 is singular or its condition number exceeds
/// cond_threshold.
RefinementMatrices refinement_matrices(const LambdaBlocks& blocks,
                                       double cond_threshold = EngineOptions{}.cond_threshold);

/// Push one refinement level onto the stack. The returned stack closes over
/// sys; evaluating its fields anywhere runs the chain at that point.
BasisStack refine(const SystemDefinition& sys, const BasisStack& basis);

}  // namespace csp

#endif
