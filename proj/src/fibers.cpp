#include "csp/fibers.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <string>

namespace csp {

FiberFrame extract_cspf(const BasisStack& basis, const CspmTable& table, double y,
                        double eps, EvalPolicy policy) {
  if (table.order != basis.level())
    throw PreconditionError("extract_cspf: table order " + std::to_string(table.order) +
                            " does not match basis level " + std::to_string(basis.level()));
  const CspmTable* src = &table;
  if (policy == EvalPolicy::previous) {
    if (!table.parent)
      throw PreconditionError("extract_cspf: policy 'previous' needs an order >= 1 table "
                              "carrying its parent");
    src = table.parent.get();
  }

  const Vec z = eval_psi(*src, y);
  const StatePoint p(Vec::Constant(1, y), z);
  const Mat A = evaluate_basis(basis, p, eps).first;
  Mat cols = A.leftCols(basis.n());

  Mat normalized = cols;
  for (int j = 0; j < normalized.cols(); ++j) {
    const double nrm = normalized.col(j).norm();
    if (!(nrm > 0.0) || !std::isfinite(nrm))
      throw SolveError("extract_cspf: degenerate fiber frame at y = " + std::to_string(y));
    normalized.col(j) /= nrm;
  }
  Eigen::JacobiSVD<Mat> svd(normalized);
  if (svd.singularValues().minCoeff() <= 1e-8)
    throw SolveError("extract_cspf: fiber frame is numerically rank deficient at y = " +
                     std::to_string(y) + " (smallest singular value " +
                     std::to_string(svd.singularValues().minCoeff()) + ")");

  FiberFrame out;
  out.base = p;
  out.columns = std::move(cols);
  out.order = basis.level();
  out.policy = policy;
  return out;
}

double principal_angle(const Mat& F1, const Mat& F2) {
  const int rows = static_cast<int>(F1.rows());
  const int k = static_cast<int>(F1.cols());
  if (F2.rows() != rows || F2.cols() != k)
    throw PreconditionError("principal_angle: frames must have equal shapes");
  if (k < 1 || rows < k)
    throw PreconditionError("principal_angle: need 1 <= columns <= rows");

  auto orthonormalize = [rows, k](const Mat& F, const char* which) {
    Eigen::ColPivHouseholderQR<Mat> qr(F);
    if (qr.rank() < k)
      throw PreconditionError(std::string("principal_angle: frame ") + which +
                              " is rank deficient");
    Mat Q = qr.householderQ() * Mat::Identity(rows, k);
    return Q;
  };
  const Mat Q1 = orthonormalize(F1, "1");
  const Mat Q2 = orthonormalize(F2, "2");

  const Mat C = Q1.transpose() * Q2;
  Eigen::JacobiSVD<Mat> cos_svd(C);
  const double cos_min = std::clamp(cos_svd.singularValues().minCoeff(), 0.0, 1.0);

  const Mat S = Q2 - Q1 * C;
  Eigen::JacobiSVD<Mat> sin_svd(S);
  const double sin_max = std::clamp(sin_svd.singularValues().maxCoeff(), 0.0, 1.0);

  return std::atan2(sin_max, cos_min);
}

}  // namespace csp
