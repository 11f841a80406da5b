#include "csp/mmh.hpp"

#include <cmath>
#include <string>

namespace csp {

namespace {

void validate(const MmhParams& p) {
  if (!(p.kappa > p.lambda && p.lambda > 0.0))
    throw PreconditionError("mmh: parameters must satisfy kappa > lambda > 0 (got kappa = " +
                            std::to_string(p.kappa) + ", lambda = " + std::to_string(p.lambda) +
                            ")");
}

void validate_order(int got, int lo, int hi, const char* what) {
  if (got < lo || got > hi)
    throw PreconditionError(std::string(what) + ": order " + std::to_string(got) +
                            " is outside [" + std::to_string(lo) + ", " + std::to_string(hi) +
                            "]");
}

}  // namespace

SystemDefinition mmh_system(const MmhParams& p) {
  validate(p);
  const double kappa = p.kappa;
  const double lambda = p.lambda;
  auto g1 = [kappa, lambda](const Vec& y, const Vec& z, double) {
    return Vec::Constant(1, -y[0] + (y[0] + kappa - lambda) * z[0]);
  };
  auto g2 = [kappa](const Vec& y, const Vec& z, double) {
    return Vec::Constant(1, y[0] - (y[0] + kappa) * z[0]);
  };
  auto jac = [kappa, lambda](const Vec& y, const Vec& z, double eps) {
    Mat J(2, 2);
    J(0, 0) = eps * (z[0] - 1.0);
    J(0, 1) = eps * (y[0] + kappa - lambda);
    J(1, 0) = 1.0 - z[0];
    J(1, 1) = -(y[0] + kappa);
    return J;
  };
  return SystemDefinition("mmh", 1, 1, g1, g2, Box(0.1, 2.0), jac);
}

double mmh_h0(double s, const MmhParams& p) {
  validate(p);
  return s / (s + p.kappa);
}

double mmh_h0_slope(double s, const MmhParams& p) {
  validate(p);
  const double P = s + p.kappa;
  return p.kappa / (P * P);
}

double mmh_h1(double s, const MmhParams& p) {
  validate(p);
  const double P = s + p.kappa;
  return p.kappa * p.lambda * s / std::pow(P, 4);
}

double mmh_h2(double s, const MmhParams& p) {
  validate(p);
  const double k = p.kappa;
  const double l = p.lambda;
  const double P = s + k;
  return k * l * s * (2.0 * k * l - 3.0 * l * s - k * s - k * k) / std::pow(P, 7);
}

double mmh_slow_series(double s, const MmhParams& p, double eps, int order) {
  validate_order(order, 0, 2, "mmh_slow_series");
  double v = mmh_h0(s, p);
  if (order >= 1) v += eps * mmh_h1(s, p);
  if (order >= 2) v += eps * eps * mmh_h2(s, p);
  return v;
}

double mmh_cspm_closed(double s, const MmhParams& p, double eps, int q) {
  validate_order(q, 1, 2, "mmh_cspm_closed");
  if (q == 2) return mmh_slow_series(s, p, eps, 2);
  const double k = p.kappa;
  const double l = p.lambda;
  const double P = s + k;
  return mmh_h0(s, p) + eps * mmh_h1(s, p) -
         eps * eps * k * k * l * s * (P - l) / std::pow(P, 7);
}

Eigen::Vector2d mmh_fast_column(double s, const MmhParams& p, double eps, int q) {
  validate_order(q, 1, 2, "mmh_fast_column");
  const double k = p.kappa;
  const double l = p.lambda;
  const double P = s + k;
  double slow = -eps * (P - l) / P;
  double fast = 1.0 - eps * k * (P - l) / std::pow(P, 3);
  if (q == 1) {
    fast += eps * eps * k * l * s * (P - l) / std::pow(P, 6);
  } else {
    slow += eps * eps * (k * (P - 2.0 * l) * (P - l) + l * l * s) / std::pow(P, 4);
    fast += eps * eps * ((P - l) * (k * k * (P - 2.0 * l) + k * l * s) + k * l * l * s) /
            std::pow(P, 6);
  }
  return {slow, fast};
}

Eigen::Vector2d mmh_fiber_tangent(double s, const MmhParams& p, double eps, int order) {
  validate_order(order, 0, 2, "mmh_fiber_tangent");
  validate(p);
  const double k = p.kappa;
  const double l = p.lambda;
  const double P = s + k;
  Eigen::Vector2d v(0.0, 1.0);
  if (order == 0) return v;
  const double beta = -k * (P - l) / std::pow(P, 3);
  v[0] += eps * (-(1.0 - l / P));
  v[1] += eps * beta;
  if (order == 1) return v;
  const double gamma =
      ((P - l) * (k * k * (P - 2.0 * l) + k * l * s) + k * l * l * s) / std::pow(P, 6);
  v[0] += eps * eps *
          (-(1.0 - l / P) * beta - (l / (P * P)) * ((k * (P - l) - l * s) / (P * P)));
  v[1] += eps * eps * gamma;
  return v;
}

Lambda1Closed mmh_lambda1_closed(double s, double c, const MmhParams& p, double eps) {
  validate(p);
  const double l = p.lambda;
  const double P = s + p.kappa;
  const double e2 = eps * eps;
  const double cm1 = c - 1.0;
  const double r = (P - l) * c - s;   // residual of the fast equation, flipped sign
  const double w = c - s / P;         // deviation from the critical manifold

  Lambda1Closed out;
  out.L11 = -P + eps * (P - l) / P * (cm1 + w) +
            e2 * cm1 * (P - l) / std::pow(P, 3) * (-l * cm1 + r);
  out.L12 = -w + eps * cm1 / (P * P) * (l * cm1 - r);
  out.L21 = e2 / (P * P) *
            (cm1 * (P - l) * (P - 2.0 * l) + l * r + (P - l) * (P - l) * w);
  out.L22 = eps / P * (l * cm1 - (P - l) * w) +
            e2 * cm1 * (P - l) / std::pow(P, 3) * (l * cm1 - r);
  return out;
}

}  // namespace csp
