#include "csp/demo_systems.hpp"

#include "csp/mmh.hpp"

namespace csp {

namespace {

SystemDefinition make_linear2d() {
  auto g1 = [](const Vec& y, const Vec&, double) { return Vec::Constant(1, -y[0]); };
  auto g2 = [](const Vec& y, const Vec& z, double eps) {
    return Vec::Constant(1, -z[0] + eps * y[0]);
  };
  auto jac = [](const Vec&, const Vec&, double eps) {
    Mat J(2, 2);
    J << -eps, 0.0, eps, -1.0;
    return J;
  };
  return SystemDefinition("linear2d", 1, 1, g1, g2, Box(0.1, 2.0), jac);
}

SystemDefinition make_tilted() {
  auto g1 = [](const Vec& y, const Vec& z, double eps) {
    return Vec::Constant(1, -y[0] * (1.0 + z[0] / (1.0 + eps * z[0])));
  };
  auto g2 = [](const Vec&, const Vec& z, double) { return Vec::Constant(1, -z[0]); };
  auto jac = [](const Vec& y, const Vec& z, double eps) {
    const double w = 1.0 + eps * z[0];
    Mat J(2, 2);
    J(0, 0) = eps * (-(1.0 + z[0] / w));
    J(0, 1) = eps * (-y[0] / (w * w));
    J(1, 0) = 0.0;
    J(1, 1) = -1.0;
    return J;
  };
  return SystemDefinition("tilted", 1, 1, g1, g2, Box(0.1, 2.0), jac);
}

}  // namespace

SystemDefinition make_demo_system(const std::string& name, double kappa, double lambda) {
  if (name == "mmh") return mmh_system(MmhParams{kappa, lambda});
  if (name == "linear2d") return make_linear2d();
  if (name == "tilted") return make_tilted();
  std::string known;
  for (const auto& s : demo_system_names()) known += (known.empty() ? "" : ", ") + s;
  throw PreconditionError("unknown system '" + name + "' (known: " + known + ")");
}

std::vector<std::string> demo_system_names() { return {"mmh", "linear2d", "tilted"}; }

double linear2d_manifold(double y, double eps) { return eps * y / (1.0 - eps); }

StatePoint tilted_true_base(const StatePoint& x0, double eps) {
  return StatePoint(x0.y[0] / (1.0 + eps * x0.z[0]), 0.0);
}

}  // namespace csp
