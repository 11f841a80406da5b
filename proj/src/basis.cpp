#include "csp/basis.hpp"

#include <Eigen/SVD>
#include <limits>
#include <sstream>
#include <utility>

namespace csp {

struct BasisStack::Node {
  int level = 0;
  int m = 0;
  int n = 0;
  RefinementMode mode = RefinementMode::two_step;
  EngineOptions options;
  Mat A0, B0;                                    // level 0 only
  std::shared_ptr<const Node> parent;            // level >= 1
  std::shared_ptr<const SystemDefinition> sys;   // level >= 1
};

namespace {

using Node = BasisStack::Node;

struct BasisPair {
  Mat A, B;
};

MatrixField field_for(const std::shared_ptr<const Node>& node, bool want_A);

std::string describe_point(const StatePoint& x, double eps) {
  std::ostringstream os;
  os << "y = (";
  for (int i = 0; i < x.m(); ++i) os << (i ? ", " : "") << x.y[i];
  os << "), z = (";
  for (int i = 0; i < x.n(); ++i) os << (i ? ", " : "") << x.z[i];
  os << "), eps = " << eps;
  return os.str();
}

LambdaBlocks lambda_from_pair(const SystemDefinition& sys,
                              const std::shared_ptr<const Node>& node,
                              const BasisPair& ab, const StatePoint& x, double eps) {
  const int m = node->m;
  const int n = node->n;
  const Mat J = eval_jacobian(sys, x, eps);
  Mat lam = ab.B * J * ab.A;
  if (node->level > 0) lam -= ab.B * field_time_derivative(sys, field_for(node, true), x, eps);

  LambdaBlocks out;
  out.L11 = lam.topLeftCorner(n, n);
  out.L12 = lam.topRightCorner(n, m);
  out.L21 = lam.bottomLeftCorner(m, n);
  out.L22 = lam.bottomRightCorner(m, m);
  out.point = x;
  out.eps = eps;

  Eigen::JacobiSVD<Mat> svd(out.L11);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  out.cond11 = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  return out;
}

BasisPair evaluate_node(const std::shared_ptr<const Node>& node, const StatePoint& x,
                        double eps) {
  if (node->level == 0) return {node->A0, node->B0};

  const auto& parent = node->parent;
  BasisPair base = evaluate_node(parent, x, eps);
  const LambdaBlocks blocks = lambda_from_pair(*node->sys, parent, base, x, eps);
  const RefinementMatrices rm = refinement_matrices(blocks, node->options.cond_threshold);

  const int d = node->m + node->n;
  const Mat I = Mat::Identity(d, d);
  Mat A = base.A * (I - rm.U);
  Mat B = (I + rm.U) * base.B;
  if (node->mode == RefinementMode::two_step) {
    A = A * (I + rm.L);
    B = (I - rm.L) * B;
  }
  return {std::move(A), std::move(B)};
}

MatrixField field_for(const std::shared_ptr<const Node>& node, bool want_A) {
  MatrixField f;
  f.rows = f.cols = node->m + node->n;
  f.m = node->m;
  f.n = node->n;
  f.evaluator = [node, want_A](const StatePoint& x, double eps) {
    BasisPair p = evaluate_node(node, x, eps);
    return want_A ? p.A : p.B;
  };
  if (node->level == 0) {
    f.is_constant = true;
  } else if (node->level == 1) {
    f.recommended_step = node->options.first_level_step;
    f.fd_order = 2;
  } else {
    f.recommended_step = node->options.deep_level_step;
    f.fd_order = node->options.deep_fd_order;
  }
  return f;
}

void require_invertible(const Mat& M, const char* label) {
  Eigen::FullPivLU<Mat> lu(M);
  if (!lu.isInvertible())
    throw PreconditionError(std::string("initial_basis: block ") + label +
                            " is not invertible");
}

}  // namespace

Mat LambdaBlocks::full() const {
  const int d = n() + m();
  Mat out(d, d);
  out.topLeftCorner(n(), n()) = L11;
  out.topRightCorner(n(), m()) = L12;
  out.bottomLeftCorner(m(), n()) = L21;
  out.bottomRightCorner(m(), m()) = L22;
  return out;
}

int BasisStack::level() const { return node_->level; }
RefinementMode BasisStack::mode() const { return node_->mode; }
int BasisStack::m() const { return node_->m; }
int BasisStack::n() const { return node_->n; }
const EngineOptions& BasisStack::options() const { return node_->options; }

std::shared_ptr<const BasisStack> BasisStack::parent() const {
  if (!node_->parent) return nullptr;
  return std::make_shared<const BasisStack>(node_->parent);
}

MatrixField BasisStack::A_field() const { return field_for(node_, true); }
MatrixField BasisStack::B_field() const { return field_for(node_, false); }

BasisStack initial_basis(int m, int n, const std::optional<InitialBlocks>& blocks,
                         RefinementMode mode, const EngineOptions& options) {
  if (m < 1 || n < 1) throw PreconditionError("initial_basis: need m >= 1 and n >= 1");

  Mat A12 = Mat::Identity(m, m);
  Mat A21 = Mat::Identity(n, n);
  Mat A22 = Mat::Zero(n, m);
  if (blocks) {
    if (blocks->A12.rows() != m || blocks->A12.cols() != m ||
        blocks->A21.rows() != n || blocks->A21.cols() != n ||
        blocks->A22.rows() != n || blocks->A22.cols() != m)
      throw PreconditionError("initial_basis: block shape mismatch");
    A12 = blocks->A12;
    A21 = blocks->A21;
    A22 = blocks->A22;
    require_invertible(A12, "A12");
    require_invertible(A21, "A21");
  }

  const int d = m + n;
  Mat A0 = Mat::Zero(d, d);
  A0.topRightCorner(m, m) = A12;
  A0.bottomLeftCorner(n, n) = A21;
  A0.bottomRightCorner(n, m) = A22;

  const Mat A12inv = A12.partialPivLu().solve(Mat::Identity(m, m));
  const Mat A21inv = A21.partialPivLu().solve(Mat::Identity(n, n));
  Mat B0 = Mat::Zero(d, d);
  B0.topLeftCorner(n, m) = -A21inv * A22 * A12inv;
  B0.topRightCorner(n, n) = A21inv;
  B0.bottomLeftCorner(m, m) = A12inv;

  auto node = std::make_shared<Node>();
  node->level = 0;
  node->m = m;
  node->n = n;
  node->mode = mode;
  node->options = options;
  node->A0 = std::move(A0);
  node->B0 = std::move(B0);
  return BasisStack(std::move(node));
}

std::pair<Mat, Mat> evaluate_basis(const BasisStack& basis, const StatePoint& x,
                                   double eps) {
  BasisPair p = evaluate_node(basis.node(), x, eps);
  return {std::move(p.A), std::move(p.B)};
}

LambdaBlocks lambda_blocks(const SystemDefinition& sys, const BasisStack& basis,
                           const StatePoint& x, double eps) {
  if (sys.m() != basis.m() || sys.n() != basis.n())
    throw PreconditionError("lambda_blocks: basis dimensions do not match the system");
  BasisPair p = evaluate_node(basis.node(), x, eps);
  return lambda_from_pair(sys, basis.node(), p, x, eps);
}

RefinementMatrices refinement_matrices(const LambdaBlocks& blocks, double cond_threshold) {
  const int m = blocks.m();
  const int n = blocks.n();
  if (!blocks.L11.allFinite() || blocks.cond11 > cond_threshold)
    throw SingularityError("refinement_matrices: fast block is singular (cond = " +
                           std::to_string(blocks.cond11) + ") at " +
                           describe_point(blocks.point, blocks.eps));

  Eigen::PartialPivLU<Mat> lu(blocks.L11);
  RefinementMatrices out;
  out.U12 = lu.solve(blocks.L12);
  out.L21 = blocks.L11.transpose().partialPivLu().solve(blocks.L21.transpose()).transpose();
  if (!out.U12.allFinite() || !out.L21.allFinite())
    throw SingularityError("refinement_matrices: update factors are non-finite at " +
                           describe_point(blocks.point, blocks.eps));

  const int d = m + n;
  out.U = Mat::Zero(d, d);
  out.L = Mat::Zero(d, d);
  out.U.topRightCorner(n, m) = out.U12;
  out.L.bottomLeftCorner(m, n) = out.L21;
  return out;
}

BasisStack refine(const SystemDefinition& sys, const BasisStack& basis) {
  if (sys.m() != basis.m() || sys.n() != basis.n())
    throw PreconditionError("refine: basis dimensions do not match the system");
  auto node = std::make_shared<Node>();
  node->level = basis.level() + 1;
  node->m = basis.m();
  node->n = basis.n();
  node->mode = basis.mode();
  node->options = basis.options();
  node->parent = basis.node();
  node->sys = std::make_shared<const SystemDefinition>(sys);
  return BasisStack(std::move(node));
}

}  // namespace csp
