#include "doctest.h"

#include <cmath>
#include <random>

#include "csp/fibers.hpp"
#include "csp/mmh.hpp"

using namespace csp;

namespace {

Vec linspace(double lo, double hi, int count) {
  Vec v(count);
  for (int i = 0; i < count; ++i) v[i] = lo + (hi - lo) * i / (count - 1);
  return v;
}

Mat col2(double a, double b) {
  Mat v(2, 1);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("principal angle basics") {
  CHECK(principal_angle(col2(0.0, 1.0), col2(0.0, 1.0)) <= 1e-14);
  CHECK(principal_angle(col2(0.0, 1.0), col2(1.0, 0.0)) ==
        doctest::Approx(1.5707963267948966).epsilon(1e-13));
  CHECK(principal_angle(col2(0.0, 1.0), col2(-0.075, 0.98125)) ==
        doctest::Approx(0.0762847992479009).epsilon(1e-12));
}

TEST_CASE("principal angle ignores column scaling and argument order") {
  std::mt19937 rng(77);
  std::normal_distribution<double> dist(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    Mat F1 = col2(dist(rng), dist(rng));
    Mat F2 = col2(dist(rng), dist(rng));
    if (F1.norm() < 0.1 || F2.norm() < 0.1) continue;
    double base = principal_angle(F1, F2);
    CHECK(std::abs(principal_angle(Mat(-3.7 * F1), F2) - base) <= 1e-12);
    CHECK(std::abs(principal_angle(F1, Mat(0.013 * F2)) - base) <= 1e-12);
    CHECK(std::abs(principal_angle(F2, F1) - base) <= 1e-12);
  }
}

TEST_CASE("principal angle between planes in three dimensions") {
  // span{e1, e2} against span{e1, cos t e2 + sin t e3}: the angle is t
  double t = 0.3;
  Mat F1(3, 2), F2(3, 2);
  F1 << 1, 0, 0, 1, 0, 0;
  F2 << 1, 0, 0, std::cos(t), 0, std::sin(t);
  CHECK(principal_angle(F1, F2) == doctest::Approx(t).epsilon(1e-12));

  // identical spans through different column mixes
  Mat F3(3, 2);
  F3 << 1, 2, 1, -1, 0, 0;
  Mat F4(3, 2);
  F4 << 1, 0, 0, 1, 0, 0;
  CHECK(principal_angle(F3, F4) <= 1e-12);
}

TEST_CASE("rank-deficient frames are rejected") {
  Mat F(3, 2);
  F << 1, 2, 1, 2, 1, 2;
  Mat G(3, 2);
  G << 1, 0, 0, 1, 0, 0;
  CHECK_THROWS_AS(principal_angle(F, G), PreconditionError);
  CHECK_THROWS_AS(principal_angle(G, F), PreconditionError);

  Mat H(3, 1);
  H << 1, 0, 0;
  CHECK_THROWS_AS(principal_angle(G, H), PreconditionError);
}

TEST_CASE("order-0 frame is the fast coordinate axis") {
  auto sys = mmh_system({});
  auto basis = initial_basis(1, 1);
  auto table = build_cspm(sys, basis, linspace(0.5, 2.0, 16), 0.05);
  auto frame = extract_cspf(basis, table, 1.0, 0.05);
  CHECK(frame.columns(0, 0) == 0.0);
  CHECK(frame.columns(1, 0) == 1.0);
  CHECK(frame.base.y[0] == 1.0);
  CHECK(frame.order == 0);
}

TEST_CASE("order-1 frame matches the closed-form fast column") {
  auto sys = mmh_system({});
  auto level1 = refine(sys, initial_basis(1, 1));
  auto table = build_cspm(sys, level1, linspace(0.5, 2.0, 64), 0.01);
  auto frame = extract_cspf(level1, table, 1.0, 0.01);
  CHECK(std::abs(frame.columns(0, 0) - (-0.0075)) <= 1e-10);
  CHECK(std::abs(frame.columns(1, 0) - 0.9981261696818465) <= 1e-9);
}

TEST_CASE("at eps zero the refined frame stays vertical") {
  auto sys = mmh_system({});
  auto level1 = refine(sys, initial_basis(1, 1));
  auto table = build_cspm(sys, level1, linspace(0.5, 2.0, 16), 0.0);
  auto frame = extract_cspf(level1, table, 1.3, 0.0);
  CHECK(std::abs(frame.columns(0, 0)) <= 1e-14);
  CHECK(std::abs(frame.columns(1, 0) - 1.0) <= 1e-14);
}

TEST_CASE("previous policy evaluates the frame on the coarser graph") {
  auto sys = mmh_system({});
  auto level1 = refine(sys, initial_basis(1, 1));
  auto table = build_cspm(sys, level1, linspace(0.5, 2.0, 64), 0.01);

  auto prev = extract_cspf(level1, table, 1.0, 0.01, EvalPolicy::previous);
  CHECK(prev.policy == EvalPolicy::previous);
  CHECK(prev.base.z[0] == doctest::Approx(mmh_h0(1.0)).epsilon(1e-10));

  auto cur = extract_cspf(level1, table, 1.0, 0.01, EvalPolicy::current);
  CHECK(cur.base.z[0] == doctest::Approx(0.5003119151590767).epsilon(1e-10));
  CHECK((cur.columns - prev.columns).cwiseAbs().maxCoeff() > 1e-8);

  auto table0 = build_cspm(sys, initial_basis(1, 1), linspace(0.5, 2.0, 16), 0.01);
  CHECK_THROWS_AS(extract_cspf(initial_basis(1, 1), table0, 1.0, 0.01, EvalPolicy::previous),
                  PreconditionError);
}

TEST_CASE("frame order must match the table order") {
  auto sys = mmh_system({});
  auto level1 = refine(sys, initial_basis(1, 1));
  auto table0 = build_cspm(sys, initial_basis(1, 1), linspace(0.5, 2.0, 16), 0.01);
  CHECK_THROWS_AS(extract_cspf(level1, table0, 1.0, 0.01), PreconditionError);
}

TEST_CASE("refined frame converges to the asymptotic tangent") {
  MmhParams p;
  auto sys = mmh_system(p);
  auto level1 = refine(sys, initial_basis(1, 1));
  Vec grid = linspace(0.5, 2.0, 32);

  std::vector<double> eps_list = {1e-3, 3.1623e-3, 1e-2, 3.1623e-2};
  std::vector<double> angles;
  for (double eps : eps_list) {
    auto table = build_cspm(sys, level1, grid, eps);
    auto frame = extract_cspf(level1, table, 1.0, eps);
    Mat ref(2, 1);
    ref.col(0) = mmh_fiber_tangent(1.0, p, eps, 2);
    angles.push_back(principal_angle(frame.columns, ref));
  }
  for (size_t i = 0; i + 1 < angles.size(); ++i) {
    double ratio = angles[i + 1] / angles[i];
    CHECK(ratio >= 8.0);
    CHECK(ratio <= 14.0);
  }
}

TEST_CASE("order-2 frame and order-2 tangent span the same line") {
  MmhParams p;
  auto sys = mmh_system(p);
  double eps = 0.01;
  auto stack = refine(sys, refine(sys, initial_basis(1, 1)));
  auto table = build_cspm(sys, stack, linspace(0.5, 2.0, 64), eps);

  for (double y : {0.7, 1.0, 1.8}) {
    auto frame = extract_cspf(stack, table, y, eps);
    Mat ref(2, 1);
    ref.col(0) = mmh_fiber_tangent(y, p, eps, 2);
    CHECK(principal_angle(frame.columns, ref) <= 3e-7);
  }
}
