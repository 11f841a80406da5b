#include "csp/spline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace csp {

CubicSpline::CubicSpline(const Vec& x, const Vec& y) : x_(x) {
  const int N = static_cast<int>(x.size());
  if (N < 2 || y.size() != N)
    throw PreconditionError("CubicSpline: need at least two nodes and matching values");
  for (int i = 0; i + 1 < N; ++i)
    if (!(x[i + 1] > x[i]))
      throw PreconditionError("CubicSpline: nodes must be strictly increasing");

  Vec M = Vec::Zero(N);  // second derivatives at the nodes
  if (N > 2) {
    Mat S = Mat::Zero(N, N);
    Vec rhs = Vec::Zero(N);
    for (int i = 1; i + 1 < N; ++i) {
      const double hl = x[i] - x[i - 1];
      const double hr = x[i + 1] - x[i];
      S(i, i - 1) = hl / 6.0;
      S(i, i) = (hl + hr) / 3.0;
      S(i, i + 1) = hr / 6.0;
      rhs[i] = (y[i + 1] - y[i]) / hr - (y[i] - y[i - 1]) / hl;
    }
    if (N == 3) {
      S(0, 0) = 1.0;
      S(0, 1) = -1.0;
      S(2, 1) = 1.0;
      S(2, 2) = -1.0;
    } else {
      const double h0 = x[1] - x[0];
      const double h1 = x[2] - x[1];
      S(0, 0) = -1.0 / h0;
      S(0, 1) = 1.0 / h0 + 1.0 / h1;
      S(0, 2) = -1.0 / h1;
      const double hm = x[N - 2] - x[N - 3];
      const double hn = x[N - 1] - x[N - 2];
      S(N - 1, N - 3) = -1.0 / hm;
      S(N - 1, N - 2) = 1.0 / hm + 1.0 / hn;
      S(N - 1, N - 1) = -1.0 / hn;
    }
    M = S.partialPivLu().solve(rhs);
    if (!M.allFinite()) throw SolveError("CubicSpline: curvature solve failed");
  }

  coef_.resize(N - 1);
  for (int i = 0; i + 1 < N; ++i) {
    const double h = x[i + 1] - x[i];
    coef_[i][0] = y[i];
    coef_[i][1] = (y[i + 1] - y[i]) / h - h * (2.0 * M[i] + M[i + 1]) / 6.0;
    coef_[i][2] = M[i] / 2.0;
    coef_[i][3] = (M[i + 1] - M[i]) / (6.0 * h);
  }
}

int CubicSpline::interval(double t) const {
  const int N = static_cast<int>(x_.size());
  if (N == 0) throw PreconditionError("CubicSpline: not built");
  const double slack = 1e-12 * std::max(1.0, max_x() - min_x());
  if (t < min_x() - slack || t > max_x() + slack)
    throw DomainError("CubicSpline: query " + std::to_string(t) + " outside [" +
                      std::to_string(min_x()) + ", " + std::to_string(max_x()) + "]");
  const double* begin = x_.data();
  int i = static_cast<int>(std::upper_bound(begin, begin + N, t) - begin) - 1;
  return std::clamp(i, 0, N - 2);
}

double CubicSpline::eval(double t) const {
  const int i = interval(t);
  const double dx = t - x_[i];
  const auto& c = coef_[i];
  return c[0] + dx * (c[1] + dx * (c[2] + dx * c[3]));
}

double CubicSpline::deriv(double t) const {
  const int i = interval(t);
  const double dx = t - x_[i];
  const auto& c = coef_[i];
  return c[1] + dx * (2.0 * c[2] + dx * 3.0 * c[3]);
}

}  // namespace csp
