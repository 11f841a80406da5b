#include "csp/system.hpp"

#include <cmath>
#include <sstream>

namespace csp {

namespace {

double fd_step(double xi) {
  static const double base = std::cbrt(std::numeric_limits<double>::epsilon());
  return base * std::max(1.0, std::abs(xi));
}

void require_finite(const Vec& v, const char* component, const StatePoint& x) {
  if (v.allFinite()) return;
  std::ostringstream os;
  os << component << " produced a non-finite value at y=" << x.y.transpose()
     << " z=" << x.z.transpose();
  throw EvaluationError(os.str());
}

}  // namespace

SystemDefinition::SystemDefinition(std::string name, int m, int n, FieldFn g1, FieldFn g2,
                                   Box domain_K, std::optional<JacobianFn> jacobian,
                                   Box fast_box)
    : name_(std::move(name)),
      m_(m),
      n_(n),
      g1_(std::move(g1)),
      g2_(std::move(g2)),
      jacobian_(std::move(jacobian)),
      domain_K_(std::move(domain_K)),
      fast_box_(std::move(fast_box)) {
  if (m_ < 1 || n_ < 1) throw Error("system requires m >= 1 and n >= 1");
}

Vec SystemDefinition::g1(const Vec& y, const Vec& z, double eps) const { return g1_(y, z, eps); }
Vec SystemDefinition::g2(const Vec& y, const Vec& z, double eps) const { return g2_(y, z, eps); }

Mat SystemDefinition::analytic_jacobian(const Vec& y, const Vec& z, double eps) const {
  return (*jacobian_)(y, z, eps);
}

Vec eval_g(const SystemDefinition& sys, const StatePoint& x, double eps) {
  if (!x.finite()) throw EvaluationError("eval_g: non-finite state");
  Vec out(sys.dim());
  Vec slow = sys.g1(x.y, x.z, eps);
  Vec fast = sys.g2(x.y, x.z, eps);
  require_finite(slow, "g1", x);
  require_finite(fast, "g2", x);
  out.head(sys.m()) = eps * slow;
  out.tail(sys.n()) = fast;
  return out;
}

Mat eval_jacobian(const SystemDefinition& sys, const StatePoint& x, double eps) {
  if (!x.finite()) throw EvaluationError("eval_jacobian: non-finite state");
  if (sys.has_jacobian()) {
    Mat J = sys.analytic_jacobian(x.y, x.z, eps);
    if (!J.allFinite()) throw EvaluationError("analytic jacobian is non-finite");
    return J;
  }
  const int d = sys.dim();
  Vec base = to_vector(x);
  Mat J(d, d);
  for (int i = 0; i < d; ++i) {
    const double h = fd_step(base[i]);
    Vec xp = base, xm = base;
    xp[i] += h;
    xm[i] -= h;
    Vec gp = eval_g(sys, split_state(xp, sys.m(), sys.n()), eps);
    Vec gm = eval_g(sys, split_state(xm, sys.m(), sys.n()), eps);
    J.col(i) = (gp - gm) / (2.0 * h);
  }
  if (!J.allFinite()) throw EvaluationError("finite-difference jacobian is non-finite");
  return J;
}

Vec fast_spectrum(const SystemDefinition& sys, const Vec& y, const Vec& z, double eps) {
  Mat J = eval_jacobian(sys, StatePoint(y, z), eps);
  Mat Dzg2 = J.bottomRightCorner(sys.n(), sys.n());
  Eigen::EigenSolver<Mat> es(Dzg2);
  if (es.info() != Eigen::Success)
    throw SingularityError("fast_spectrum: eigen solver failed on the fast block");
  Vec re = es.eigenvalues().real();
  std::sort(re.data(), re.data() + re.size());
  return re;
}

double check_tangency_lemma(const SystemDefinition& sys, const Vec& y, const Vec& z,
                            const Mat& h0_slope) {
  Vec residual = sys.g2(y, z, 0.0);
  if (residual.lpNorm<Eigen::Infinity>() > 1e-10)
    throw PreconditionError("check_tangency_lemma: base point is not on the critical manifold");
  Mat J = eval_jacobian(sys, StatePoint(y, z), 0.0);
  Mat tangent(sys.dim(), sys.m());
  tangent.topRows(sys.m()) = Mat::Identity(sys.m(), sys.m());
  tangent.bottomRows(sys.n()) = h0_slope;
  return (J * tangent).norm();
}

void integrate_observe(const SystemDefinition& sys, const StatePoint& x0, double eps,
                       double t_end, double dt,
                       const std::function<void(double, const Vec&)>& observe) {
  if (t_end <= 0 || dt <= 0) throw Error("integrate: t_end and dt must be positive");
  const int m = sys.m(), n = sys.n();
  auto f = [&](const Vec& v) { return eval_g(sys, split_state(v, m, n), eps); };

  const auto steps = static_cast<long>(std::ceil(t_end / dt - 1e-12));
  Vec v = to_vector(x0);
  double t = 0.0;
  observe(t, v);
  for (long i = 0; i < steps; ++i) {
    const double h = std::min(dt, t_end - t);
    Vec k1 = f(v);
    Vec k2 = f(v + 0.5 * h * k1);
    Vec k3 = f(v + 0.5 * h * k2);
    Vec k4 = f(v + h * k3);
    v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += h;
    if (!v.allFinite() || v.norm() > 1e12) {
      std::ostringstream os;
      os << "integrate: trajectory blew up; last valid time " << t - h;
      throw DivergenceError(os.str(), t - h);
    }
    observe(t, v);
  }
}

Trajectory integrate(const SystemDefinition& sys, const StatePoint& x0, double eps,
                     double t_end, double dt) {
  Trajectory traj;
  const auto steps = static_cast<long>(std::ceil(t_end / dt - 1e-12));
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  integrate_observe(sys, x0, eps, t_end, dt, [&](double t, const Vec& v) {
    traj.times.push_back(t);
    traj.states.push_back(split_state(v, sys.m(), sys.n()));
  });
  return traj;
}

}  // namespace csp
