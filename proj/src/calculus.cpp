#include "csp/calculus.hpp"

namespace csp {

namespace {

Mat stencil(const MatrixField& F, const Vec& x0, const Vec& dir, double h, double scale,
            double eps, bool& ok) {
  ok = true;
  if (F.fd_order == 4) {
    Mat fm2 = F.eval(Vec(x0 - 2.0 * h * dir), eps);
    Mat fm1 = F.eval(Vec(x0 - h * dir), eps);
    Mat fp1 = F.eval(Vec(x0 + h * dir), eps);
    Mat fp2 = F.eval(Vec(x0 + 2.0 * h * dir), eps);
    Mat out = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h) * scale;
    ok = out.allFinite();
    return out;
  }
  Mat fm = F.eval(Vec(x0 - h * dir), eps);
  Mat fp = F.eval(Vec(x0 + h * dir), eps);
  Mat out = (fp - fm) / (2.0 * h) * scale;
  ok = out.allFinite();
  return out;
}

}  // namespace

Mat directional_derivative(const MatrixField& F, const StatePoint& x, const Vec& v,
                           double eps) {
  if (F.is_constant) return Mat::Zero(F.rows, F.cols);
  const double vnorm = v.norm();
  if (!std::isfinite(vnorm)) throw EvaluationError("directional_derivative: non-finite direction");
  if (vnorm == 0.0) return Mat::Zero(F.rows, F.cols);

  Vec x0 = to_vector(x);
  Vec dir = v / vnorm;
  bool ok = false;
  Mat out = stencil(F, x0, dir, F.recommended_step, vnorm, eps, ok);
  if (!ok) out = stencil(F, x0, dir, 0.25 * F.recommended_step, vnorm, eps, ok);
  if (!ok)
    throw EvaluationError("directional_derivative: field is non-finite at the stencil points");
  return out;
}

Mat field_time_derivative(const SystemDefinition& sys, const MatrixField& F,
                          const StatePoint& x, double eps) {
  if (F.is_constant) return Mat::Zero(F.rows, F.cols);
  return directional_derivative(F, x, eval_g(sys, x, eps), eps);
}

Vec lie_bracket(const SystemDefinition& sys, const MatrixField& a, const StatePoint& x,
                double eps) {
  if (a.cols != 1 || a.rows != sys.dim())
    throw Error("lie_bracket: field must be a single state-sized column");
  Mat Dg = eval_jacobian(sys, x, eps);
  Vec ax = a.eval(x, eps).col(0);
  Vec first = Dg * ax;
  Vec second = field_time_derivative(sys, a, x, eps).col(0);
  return first - second;
}

MatrixField constant_field(const Mat& value, int m, int n) {
  MatrixField f;
  f.rows = static_cast<int>(value.rows());
  f.cols = static_cast<int>(value.cols());
  f.m = m;
  f.n = n;
  f.is_constant = true;
  f.evaluator = [value](const StatePoint&, double) { return value; };
  return f;
}

}  // namespace csp
