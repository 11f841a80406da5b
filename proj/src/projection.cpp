#include "csp/projection.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace csp {

namespace {

double clamp_to_hull(const CspmTable& table, double y) {
  return std::clamp(y, table.min_y(), table.max_y());
}

/// Damped Newton on F with a finite-difference or supplied Jacobian. Halves
/// the step while the residual norm fails to decrease (or the evaluation
/// leaves the table hull), accepting the last candidate when damping runs out.
template <typename ResidualFn, typename JacobianFn>
ProjectionResult newton_solve(Vec w, const ResidualFn& residual, const JacobianFn& jacobian,
                              const NewtonOptions& opts, const char* label) {
  Vec F = residual(w);
  double rnorm = F.lpNorm<Eigen::Infinity>();
  int iter = 0;
  while (rnorm >= opts.residual_tol && iter < opts.max_iterations) {
    ++iter;
    Mat J = jacobian(w, F);
    Vec dw = J.partialPivLu().solve(-F);
    if (!dw.allFinite())
      throw SolveError(std::string(label) + ": singular Newton step");

    double scale = 1.0;
    bool accepted = false;
    Vec w_next, F_next;
    double r_next = 0.0;
    for (int halving = 0; halving < 8 && !accepted; ++halving) {
      Vec w_try = w + scale * dw;
      try {
        Vec F_try = residual(w_try);
        const double r_try = F_try.lpNorm<Eigen::Infinity>();
        if (r_try < rnorm || scale <= 1.0 / 128.0) {
          w_next = std::move(w_try);
          F_next = std::move(F_try);
          r_next = r_try;
          accepted = true;
        }
      } catch (const DomainError&) {
      }
      if (!accepted) scale *= 0.5;
    }
    if (!accepted)
      throw SolveError(std::string(label) + ": step left the table domain");

    const double stepnorm = (w_next - w).lpNorm<Eigen::Infinity>();
    w = std::move(w_next);
    F = std::move(F_next);
    rnorm = r_next;
    if (stepnorm < opts.step_tol) break;
  }
  if (rnorm >= opts.residual_tol)
    throw SolveError(std::string(label) + ": no convergence after " + std::to_string(iter) +
                     " iterations (residual " + std::to_string(rnorm) + ")");

  ProjectionResult out;
  out.amplitude = w;  // caller re-slices
  out.iterations = iter;
  out.residual = rnorm;
  return out;
}

Mat fd_jacobian(const std::function<Vec(const Vec&)>& F, const Vec& w, int rows) {
  const double base = std::cbrt(std::numeric_limits<double>::epsilon());
  const int d = static_cast<int>(w.size());
  Mat J(rows, d);
  for (int j = 0; j < d; ++j) {
    const double h = base * std::max(1.0, std::abs(w[j]));
    Vec wp = w, wm = w;
    wp[j] += h;
    wm[j] -= h;
    J.col(j) = (F(wp) - F(wm)) / (2.0 * h);
  }
  return J;
}

void require_table_matches(const CspmTable& table, const BasisStack& basis) {
  if (table.order != basis.level())
    throw PreconditionError("projection: table order " + std::to_string(table.order) +
                            " does not match basis level " + std::to_string(basis.level()));
}

}  // namespace

ProjectionResult project_fiber_search(const StatePoint& x0, const CspmTable& table,
                                      const BasisStack& basis, double eps,
                                      const NewtonOptions& opts) {
  require_table_matches(table, basis);
  if (x0.m() != 1) throw PreconditionError("project_fiber_search: one slow variable required");
  const int n = x0.n();
  const Vec target = to_vector(x0);

  auto residual = [&](const Vec& w) -> Vec {
    const double y = w[0];
    if (y < table.min_y() || y > table.max_y())
      throw DomainError("fiber search base left the table hull");
    const Vec psi = eval_psi(table, y);
    const StatePoint p(Vec::Constant(1, y), psi);
    const Mat A1 = evaluate_basis(basis, p, eps).first.leftCols(n);
    return to_vector(p) + A1 * w.tail(n) - target;
  };
  auto jacobian = [&](const Vec& w, const Vec&) { return fd_jacobian(residual, w, 1 + n); };

  Vec w0(1 + n);
  w0[0] = clamp_to_hull(table, x0.y[0]);
  w0.tail(n) = x0.z - eval_psi(table, w0[0]);

  ProjectionResult out = newton_solve(w0, residual, jacobian, opts, "project_fiber_search");
  const double y = out.amplitude[0];
  const Vec a = out.amplitude.tail(n);
  out.base = StatePoint(Vec::Constant(1, y), eval_psi(table, y));
  out.amplitude = a;
  out.scheme = ProjectionScheme::fiber_search;
  return out;
}

ProjectionResult project_vertical_base(const StatePoint& x0, const CspmTable& table,
                                       const BasisStack& basis, double eps,
                                       const NewtonOptions& opts) {
  require_table_matches(table, basis);
  if (x0.m() != 1) throw PreconditionError("project_vertical_base: one slow variable required");
  const int n = x0.n();

  const double y0 = x0.y[0];
  const Vec psi0 = eval_psi(table, y0);
  const StatePoint below(Vec::Constant(1, y0), psi0);
  const Mat A1 = evaluate_basis(basis, below, eps).first.leftCols(n);
  const Mat d_slow = A1.topRows(1);
  const Mat d_fast = A1.bottomRows(n);
  const Vec target = to_vector(x0);

  auto point_of = [&](const Vec& a) -> Vec { return target + A1 * a; };
  auto residual = [&](const Vec& a) -> Vec {
    const Vec x = point_of(a);
    const double y = x[0];
    if (y < table.min_y() || y > table.max_y())
      throw DomainError("vertical-base line left the table hull");
    return x.tail(n) - eval_psi(table, y);
  };
  auto jacobian = [&](const Vec& a, const Vec&) -> Mat {
    const Vec x = point_of(a);
    const Vec slope = eval_psi_slope(table, clamp_to_hull(table, x[0]));
    return d_fast - slope * d_slow;
  };

  ProjectionResult out =
      newton_solve(Vec::Zero(n), residual, jacobian, opts, "project_vertical_base");
  const Vec a = out.amplitude;
  const double y = point_of(a)[0];
  out.base = StatePoint(Vec::Constant(1, y), eval_psi(table, y));
  out.amplitude = a;
  out.scheme = ProjectionScheme::vertical_base;
  return out;
}

double slow_phase_error(const SystemDefinition& sys, const StatePoint& a,
                        const StatePoint& b, double eps, double horizon, double dt) {
  if (!(eps > 0.0)) throw PreconditionError("slow_phase_error: eps must be positive");
  const double t_end = horizon / eps;
  const double t_cut = 0.8 * t_end;
  const int m = sys.m();

  std::vector<Vec> tail_a;
  integrate_observe(sys, a, eps, t_end, dt, [&](double t, const Vec& v) {
    if (t >= t_cut) tail_a.push_back(v.head(m));
  });
  double gap = 0.0;
  std::size_t idx = 0;
  integrate_observe(sys, b, eps, t_end, dt, [&](double t, const Vec& v) {
    if (t >= t_cut && idx < tail_a.size()) {
      gap = std::max(gap, (tail_a[idx] - v.head(m)).lpNorm<Eigen::Infinity>());
      ++idx;
    }
  });
  return gap;
}

StatePoint shooting_base(const SystemDefinition& sys, const StatePoint& x0,
                         const CspmTable& table, double eps, double horizon, double dt) {
  if (sys.m() != 1) throw PreconditionError("shooting_base: one slow variable required");
  if (!(eps > 0.0)) throw PreconditionError("shooting_base: eps must be positive");
  const double t_end = horizon / eps;

  auto final_slow = [&](const StatePoint& p) {
    double y_final = 0.0;
    integrate_observe(sys, p, eps, t_end, dt,
                      [&](double, const Vec& v) { y_final = v[0]; });
    return y_final;
  };

  const double target = final_slow(x0);
  auto gap = [&](double b) {
    return final_slow(StatePoint(Vec::Constant(1, b), eval_psi(table, b))) - target;
  };

  const int scan = 17;
  double lo = table.min_y(), hi = table.max_y();
  double prev_b = lo, prev_gap = gap(lo);
  double blo = 0.0, bhi = 0.0, glo = 0.0;
  bool bracketed = std::abs(prev_gap) == 0.0;
  if (bracketed) return StatePoint(Vec::Constant(1, lo), eval_psi(table, lo));
  for (int i = 1; i < scan && !bracketed; ++i) {
    const double b = lo + (hi - lo) * i / (scan - 1);
    const double g = gap(b);
    if (g == 0.0) return StatePoint(Vec::Constant(1, b), eval_psi(table, b));
    if ((g < 0.0) != (prev_gap < 0.0)) {
      blo = prev_b;
      bhi = b;
      glo = prev_gap;
      bracketed = true;
    }
    prev_b = b;
    prev_gap = g;
  }
  if (!bracketed)
    throw SolveError("shooting_base: no slow-gap sign change over the table hull; "
                     "the fiber base is outside the tabulated range");

  for (int i = 0; i < 60 && (bhi - blo) > 1e-14 * std::max(1.0, std::abs(bhi)); ++i) {
    const double mid = 0.5 * (blo + bhi);
    const double g = gap(mid);
    if (g == 0.0) {
      blo = bhi = mid;
      break;
    }
    if ((g < 0.0) == (glo < 0.0)) {
      blo = mid;
      glo = g;
    } else {
      bhi = mid;
    }
  }
  const double b = 0.5 * (blo + bhi);
  return StatePoint(Vec::Constant(1, b), eval_psi(table, b));
}

}  // namespace csp
