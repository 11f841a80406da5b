#include "doctest.h"

#include <cmath>
#include <random>

#include "csp/basis.hpp"
#include "csp/mmh.hpp"

using namespace csp;

namespace {

std::pair<Mat, Mat> level0_matrices(const BasisStack& s) {
  return evaluate_basis(s, StatePoint(1.0, 1.0), 0.0);
}

}  // namespace

TEST_CASE("default initial basis swaps the blocks") {
  auto s = initial_basis(1, 1);
  auto [A, B] = level0_matrices(s);
  Mat swap(2, 2);
  swap << 0.0, 1.0, 1.0, 0.0;
  CHECK((A - swap).norm() == 0.0);
  CHECK((B - swap).norm() == 0.0);
}

TEST_CASE("custom invertible blocks produce the dual row basis") {
  InitialBlocks blocks;
  blocks.A12 = Mat::Identity(1, 1);
  blocks.A21 = Mat::Constant(1, 1, 2.0);
  blocks.A22 = Mat::Zero(1, 1);
  auto s = initial_basis(1, 1, blocks);
  auto [A, B] = level0_matrices(s);
  CHECK(A(1, 0) == 2.0);
  CHECK(B(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(B(1, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK((B * A - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("random rectangular blocks still satisfy duality") {
  const int m = 2, n = 3;
  std::mt19937 rng(4242);
  std::normal_distribution<double> dist(0.0, 1.0);
  auto rand_mat = [&](int r, int c) {
    Mat M(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) M(i, j) = dist(rng);
    return M;
  };

  InitialBlocks blocks;
  blocks.A12 = rand_mat(m, m) + 3.0 * Mat::Identity(m, m);
  blocks.A21 = rand_mat(n, n) + 3.0 * Mat::Identity(n, n);
  blocks.A22 = rand_mat(n, m);
  auto s = initial_basis(m, n, blocks);
  REQUIRE(s.m() == m);
  REQUIRE(s.n() == n);
  auto [A, B] = evaluate_basis(s, StatePoint(Vec::Zero(m), Vec::Zero(n)), 0.0);
  CHECK((B * A - Mat::Identity(m + n, m + n)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("singular off-diagonal block is rejected") {
  InitialBlocks blocks;
  blocks.A12 = Mat::Zero(1, 1);
  blocks.A21 = Mat::Identity(1, 1);
  blocks.A22 = Mat::Zero(1, 1);
  CHECK_THROWS_AS(initial_basis(1, 1, blocks), PreconditionError);
}

TEST_CASE("level-0 lambda blocks are the swapped jacobian") {
  auto sys = mmh_system({});
  auto s = initial_basis(1, 1);
  auto lb = lambda_blocks(sys, s, StatePoint(1.0, 0.5), 0.01);
  CHECK(lb.L11(0, 0) == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(lb.L12(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(lb.L21(0, 0) == doctest::Approx(0.015).epsilon(1e-14));
  CHECK(lb.L22(0, 0) == doctest::Approx(-0.005).epsilon(1e-14));
  CHECK(lb.cond11 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("update factors solve against the fast-fast block") {
  auto sys = mmh_system({});
  auto s = initial_basis(1, 1);
  auto lb = lambda_blocks(sys, s, StatePoint(1.0, 0.5), 0.01);
  auto rm = refinement_matrices(lb);
  CHECK(rm.U12(0, 0) == doctest::Approx(-0.25).epsilon(1e-14));
  CHECK(rm.L21(0, 0) == doctest::Approx(-0.0075).epsilon(1e-14));
  CHECK((rm.U * rm.U).norm() == 0.0);
  CHECK((rm.L * rm.L).norm() == 0.0);
  CHECK(rm.U(0, 1) == rm.U12(0, 0));
  CHECK(rm.L(1, 0) == rm.L21(0, 0));
}

TEST_CASE("diagonal fast-fast block scales the coupling rows") {
  LambdaBlocks lb;
  lb.L11 = Eigen::Vector2d(2.0, 4.0).asDiagonal();
  lb.L12 = Mat(2, 1);
  lb.L12 << 2.0, 4.0;
  lb.L21 = Mat::Zero(1, 2);
  lb.L22 = Mat::Zero(1, 1);
  lb.cond11 = 2.0;
  auto rm = refinement_matrices(lb);
  CHECK(rm.U12(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(rm.U12(1, 0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("ill-conditioned fast-fast block raises SingularityError") {
  LambdaBlocks lb;
  lb.L11 = Mat(2, 2);
  lb.L11 << 1.0, 1.0, 1.0, 1.0 + 1e-12;
  lb.L12 = Mat::Zero(2, 1);
  lb.L21 = Mat::Zero(1, 2);
  lb.L22 = Mat::Zero(1, 1);
  lb.cond11 = 4e12;
  CHECK_THROWS_AS(refinement_matrices(lb), SingularityError);
}

TEST_CASE("a structurally singular fast-fast block names the point") {
  SystemDefinition sys(
      "flat", 1, 1, [](const Vec& y, const Vec&, double) { return Vec(-y); },
      [](const Vec& y, const Vec&, double) { return Vec(y); }, Box(0.1, 2.0));
  auto level1 = refine(sys, initial_basis(1, 1));
  try {
    evaluate_basis(level1, StatePoint(1.0, 0.3), 0.1);
    FAIL("expected SingularityError");
  } catch (const SingularityError& e) {
    CHECK(std::string(e.what()).find("y =") != std::string::npos);
  }
}

TEST_CASE("one refinement sweep matches the closed-form level-1 basis") {
  MmhParams p;
  auto sys = mmh_system(p);
  auto level1 = refine(sys, initial_basis(1, 1));

  for (double eps : {0.0, 1e-3, 1e-2}) {
    for (double c : {0.3, 0.52, 0.8}) {
      StatePoint x(1.0, c);
      double P = 1.0 + p.kappa;
      double u = (c - 1.0) / P;
      double l = -eps * (P - p.lambda) / P;
      auto [A, B] = evaluate_basis(level1, x, eps);
      CHECK(A(0, 0) == doctest::Approx(l).epsilon(1e-10));
      CHECK(A(1, 0) == doctest::Approx(1.0 - u * l).epsilon(1e-10));
      CHECK(A(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(A(1, 1) == doctest::Approx(-u).epsilon(1e-10));
      CHECK(B(0, 0) == doctest::Approx(u).epsilon(1e-10));
      CHECK(B(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(B(1, 0) == doctest::Approx(1.0 - l * u).epsilon(1e-10));
      CHECK(B(1, 1) == doctest::Approx(-l).epsilon(1e-10));
    }
  }
}

TEST_CASE("level-1 lambda blocks match the closed forms at a frozen point") {
  MmhParams p;
  auto sys = mmh_system(p);
  auto level1 = refine(sys, initial_basis(1, 1));
  auto lb = lambda_blocks(sys, level1, StatePoint(1.0, 0.52), 0.01);
  auto cl = mmh_lambda1_closed(1.0, 0.52, p, 0.01);
  CHECK(cl.L11 == doctest::Approx(-2.00345018).epsilon(1e-14));
  CHECK(cl.L12 == doctest::Approx(-0.019976).epsilon(1e-14));
  CHECK(cl.L21 == doctest::Approx(-1.9625e-5).epsilon(1e-12));
  CHECK(cl.L22 == doctest::Approx(-0.00134982).epsilon(1e-14));
  // L21 is the only block with terms beyond eps^2, so its gap is the widest.
  CHECK(std::abs(lb.L11(0, 0) - cl.L11) <= 1e-8 * std::abs(cl.L11));
  CHECK(std::abs(lb.L12(0, 0) - cl.L12) <= 1e-4 * std::abs(cl.L12));
  CHECK(std::abs(lb.L21(0, 0) - cl.L21) <= 5e-4 * std::abs(cl.L21));
  CHECK(std::abs(lb.L22(0, 0) - cl.L22) <= 1e-8 * std::abs(cl.L22));
}

TEST_CASE("duality holds to rounding at every level") {
  auto sys = mmh_system({});
  std::mt19937 rng(555);
  std::uniform_real_distribution<double> uy(0.5, 2.0);
  std::uniform_real_distribution<double> uz(0.1, 0.9);

  auto stack = initial_basis(1, 1);
  for (int level = 0; level <= 3; ++level) {
    for (int i = 0; i < 5; ++i) {
      StatePoint x(uy(rng), uz(rng));
      auto [A, B] = evaluate_basis(stack, x, 0.01);
      CHECK((B * A - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-9);
    }
    if (level < 3) stack = refine(sys, stack);
  }
}

TEST_CASE("single-sweep mode shares the row update and keeps the fast column") {
  auto sys = mmh_system({});
  auto one = refine(sys, initial_basis(1, 1, std::nullopt, RefinementMode::one_step));
  auto two = refine(sys, initial_basis(1, 1, std::nullopt, RefinementMode::two_step));
  REQUIRE(one.mode() == RefinementMode::one_step);

  StatePoint x(1.3, 0.4);
  auto [Ao, Bo] = evaluate_basis(one, x, 0.01);
  auto [At, Bt] = evaluate_basis(two, x, 0.01);
  CHECK((Bo.row(0) - Bt.row(0)).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(Ao(0, 0) == 0.0);
  CHECK(Ao(1, 0) == 1.0);
  CHECK(At(0, 0) != 0.0);
}

TEST_CASE("an already decoupled system is a fixed point of refinement") {
  SystemDefinition sys(
      "split", 1, 1, [](const Vec& y, const Vec&, double) { return Vec(-y); },
      [](const Vec&, const Vec& z, double) { return Vec(-z); }, Box(0.1, 2.0));
  auto level1 = refine(sys, initial_basis(1, 1));
  auto [A1, B1] = evaluate_basis(level1, StatePoint(1.0, 0.5), 0.2);
  Mat swap(2, 2);
  swap << 0.0, 1.0, 1.0, 0.0;
  CHECK((A1 - swap).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((B1 - swap).cwiseAbs().maxCoeff() <= 1e-14);
}
