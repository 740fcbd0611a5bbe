#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fbp/solutions.hpp"

using namespace fbp;
using namespace fbp::solutions;

namespace {

// Frozen reference values (30-digit elementary-function evaluation).
constexpr double kSinh1 = 1.1752011936438014568823818506;
constexpr double kCosh1 = 1.54308063481524377847790562076;
constexpr double kTanPi6 = 0.577350269189625764509148780502;
constexpr double kSech2_3 = 0.00986603716544019127315616968352;
constexpr double kTip = -2.57079632679489661923132169164;  // -(1 + pi/2)

AnalyticSolution hairpin(double a, RigidMotion m = {}) {
  return AnalyticSolution(Hairpin{a}, m);
}

}  // namespace

TEST_CASE("phi at the anchor points") {
  CHECK(std::abs(phi({0, 0})) == 0.0);
  Complex tip = phi(Complex(0, kPi / 2));
  CHECK(tip.real() == doctest::Approx(kTip).epsilon(1e-14));
  CHECK(std::abs(tip.imag()) < 1e-15);
  Complex p1 = phi(Complex(1, 0));
  CHECK(p1.real() == doctest::Approx(0.0));
  CHECK(p1.imag() == doctest::Approx(1.0 + kSinh1).epsilon(1e-15));
  CHECK_THROWS_AS(phi(Complex(0, kPi / 2 + 0.01)), std::domain_error);
}

TEST_CASE("phi_inv round trips and domain checks") {
  auto zero = phi_inv({0, 0});
  CHECK(zero.converged);
  CHECK(std::abs(zero.zeta) < 1e-14);

  Complex target = phi(Complex(0.3, 0.2));
  auto inv = phi_inv(target, 1e-12);
  CHECK(inv.converged);
  CHECK(std::abs(inv.zeta - Complex(0.3, 0.2)) < 1e-12);

  auto one = phi_inv(Complex(0, 1.0 + kSinh1), 1e-12);
  CHECK(std::abs(one.zeta - Complex(1, 0)) < 1e-10);

  CHECK_THROWS_AS(phi_inv(Complex(-4.0, 0.0)), std::domain_error);  // outside Omega_1

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> uy1(-3.0, 3.0), uy2(-kPi / 2, kPi / 2);
  double worst = 0;
  for (int k = 0; k < 1000; ++k) {
    Complex zeta(uy1(rng), uy2(rng));
    auto r = phi_inv(phi(zeta), 1e-13);
    CHECK(r.converged);
    worst = std::max(worst, std::abs(r.zeta - zeta));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("eval across the families") {
  CHECK(eval(hairpin(1), {0, 0}) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(eval(hairpin(1), Complex(kTip, 0)) == doctest::Approx(0.0));
  CHECK(eval(hairpin(1), Complex(0, 1.0 + kSinh1)) == doctest::Approx(kCosh1).epsilon(1e-13));

  AnalyticSolution hp{HalfPlane{}};
  CHECK(eval(hp, {3, 2}) == 2.0);
  CHECK(eval(hp, {3, -2}) == 0.0);

  AnalyticSolution tp{TwoPlane{0.5}};
  CHECK(eval(tp, {0, 1}) == 1.0);
  CHECK(eval(tp, {0, -0.25}) == 0.0);
  CHECK(eval(tp, {0, -1}) == doctest::Approx(0.5));

  AnalyticSolution wd{Wedge{0.5}};
  CHECK(eval(wd, {1, -2}) == doctest::Approx(1.0));

  CHECK_THROWS_AS(AnalyticSolution(Wedge{1.5}), std::invalid_argument);
  CHECK_THROWS_AS(AnalyticSolution(Hairpin{-1.0}), std::invalid_argument);
  CHECK_THROWS_AS(eval(hp, Complex(std::nan(""), 0)), std::domain_error);
}

TEST_CASE("hairpin geometry") {
  HairpinGeometry g(2.0);
  CHECK(g.separation == doctest::Approx(2.0 * (2 + kPi)).epsilon(1e-15));
  CHECK(g.saddle_value == 2.0);
}

TEST_CASE("gradient: saddle, boundary magnitude, closed form") {
  CHECK(std::abs(grad(hairpin(1), {0, 0})) < 1e-13);

  // |grad| = 1 on the free boundary, |grad| = tan(y2/2) on the neck segment.
  for (double y1 : {-3.0, -1.0, 0.0, 0.5, 2.0}) {
    for (auto side : {Side::Left, Side::Right}) {
      auto bp = boundary_param(1.0, y1, side);
      CHECK(std::abs(std::abs(grad(hairpin(1), bp.point)) - 1.0) < 1e-10);
    }
  }
  Complex probe = phi(Complex(0, kPi / 3));
  CHECK(std::abs(grad(hairpin(1), probe)) == doctest::Approx(kTanPi6).epsilon(1e-12));

  CHECK_THROWS_AS(grad(hairpin(1), Complex(-10, 0)), std::domain_error);
  CHECK_THROWS_AS(grad(AnalyticSolution{HalfPlane{}}, Complex(0, -1)), std::domain_error);

  // Finite-difference cross-check with observed order >= 1.9.
  Complex at(0.7, 0.9);
  Complex g = grad(hairpin(1), at);
  double prev_err = 0;
  int n = 0;
  double order_min = 10;
  for (double h : {1e-3, 5e-4, 2.5e-4}) {
    AnalyticSolution s = hairpin(1);
    Complex fd((eval(s, at + h) - eval(s, at - h)) / (2 * h),
               (eval(s, at + Complex(0, h)) - eval(s, at - Complex(0, h))) / (2 * h));
    double err = std::abs(fd - g);
    if (n > 0 && err > 0) order_min = std::min(order_min, std::log2(prev_err / err));
    prev_err = err;
    ++n;
  }
  CHECK(order_min >= 1.9);
}

TEST_CASE("gradient lower bound calibration min(1/2, c0 |x|)") {
  // Largest c0 passing a dense sample; the paper leaves the constant open.
  double c0 = 1e9;
  for (double y1 = -6.0; y1 <= 6.0; y1 += 0.04) {
    for (double y2 = -kPi / 2 + 1e-6; y2 < kPi / 2; y2 += 0.04) {
      Complex z = phi(Complex(y1, y2));
      double gn = std::abs(grad(hairpin(1), z));
      if (gn < 0.5 && std::abs(z) > 0) c0 = std::min(c0, gn / std::abs(z));
    }
  }
  // Frozen from this scan (measures ~0.207); the bound must hold with the
  // frozen constant.
  CHECK(c0 >= 0.15);
  for (double y1 = -5.97; y1 <= 6.0; y1 += 0.0913) {
    for (double y2 = -kPi / 2 + 2e-3; y2 < kPi / 2; y2 += 0.0517) {
      Complex z = phi(Complex(y1, y2));
      double gn = std::abs(grad(hairpin(1), z));
      CHECK(gn >= std::min(0.5, 0.15 * std::abs(z)) - 1e-12);
    }
  }
}

TEST_CASE("boundary_param curvature oracle") {
  auto tip = boundary_param(1.0, 0.0, Side::Left);
  CHECK(tip.point.real() == doctest::Approx(kTip).epsilon(1e-15));
  CHECK(tip.point.imag() == 0.0);
  CHECK(tip.kappa == doctest::Approx(1.0).epsilon(1e-15));

  CHECK(boundary_param(2.0, 0.0, Side::Left).kappa == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(boundary_param(1.0, 3.0, Side::Left).kappa == doctest::Approx(kSech2_3).epsilon(1e-14));

  // Membership: boundary points satisfy the implicit equation.
  for (double y1 : {-2.0, 0.3, 4.0}) {
    auto bp = boundary_param(1.5, y1, Side::Right);
    CHECK(std::abs(solutions::hairpin_margin(1.5, bp.point)) < 1e-12);
  }
}

TEST_CASE("holomorphic extension agrees with eval") {
  AnalyticSolution hp{HalfPlane{}};
  Complex w = holo_ext(hp, {0, 1});
  CHECK(w.real() == doctest::Approx(eval(hp, {0, 1})));

  CHECK(holo_ext(hairpin(2), {0, 0}).real() == doctest::Approx(2.0));
  Complex v = holo_ext(hairpin(1), Complex(0, 1.0 + kSinh1));
  CHECK(v.real() == doctest::Approx(kCosh1).epsilon(1e-13));
  CHECK(std::abs(v.imag()) < 1e-13);

  AnalyticSolution tp{TwoPlane{0.5}};
  CHECK(holo_ext(tp, {0, -2}).real() == doctest::Approx(1.5));
  CHECK_THROWS_AS(holo_ext(tp, {0, -0.2}), std::domain_error);

  // Cauchy-Riemann for the hairpin extension: W' == conj(grad).
  AnalyticSolution s = hairpin(1);
  Complex at(0.4, -0.8);
  double h = 1e-5;
  Complex wp = (holo_ext(s, at + h) - holo_ext(s, at - h)) / (2 * h);
  CHECK(std::abs(std::conj(wp) - grad(s, at)) < 1e-8);
}

TEST_CASE("rigid motion equivariance is exact composed arithmetic") {
  RigidMotion m(0.7, {1.5, -2.0});
  AnalyticSolution moved = hairpin(1, m);
  AnalyticSolution base = hairpin(1);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int k = 0; k < 200; ++k) {
    Complex z(u(rng), u(rng));
    CHECK(eval(moved, z) == eval(base, m.undo(z)));
  }
}

TEST_CASE("dilation equivariance") {
  for (double a : {0.1, 1.0, 7.0}) {
    AnalyticSolution sa = hairpin(a);
    AnalyticSolution s1 = hairpin(1);
    for (Complex z : {Complex(0.3, 0.1), Complex(-2, 5), Complex(4, -3), Complex(0, 0.01)}) {
      double lhs = eval(sa, z);
      double rhs = a * eval(s1, z / a);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
  }
}

TEST_CASE("saddle is non-degenerate") {
  AnalyticSolution s = hairpin(1);
  double h = 1e-4;
  double uxx = (eval(s, {h, 0}) - 2 * eval(s, {0, 0}) + eval(s, {-h, 0})) / (h * h);
  double uyy = (eval(s, {0, h}) - 2 * eval(s, {0, 0}) + eval(s, {0, -h})) / (h * h);
  double uxy = (eval(s, {h, h}) - eval(s, {h, -h}) - eval(s, {-h, h}) + eval(s, {-h, -h})) /
               (4 * h * h);
  double det = uxx * uyy - uxy * uxy;
  CHECK(det < -1e-3);  // one positive, one negative eigenvalue
  CHECK(std::abs(grad(s, {0, 0})) < 1e-12);
}

TEST_CASE("sample_to_grid basics") {
  AnalyticSolution hp{HalfPlane{}};
  GridField f = sample_to_grid(hp, {-1, -1, 1, 1}, 0.5);
  CHECK(f.nx == 5);
  CHECK(f.ny == 5);
  for (int i = 0; i < 5; ++i) CHECK(f.at(i, 4) == doctest::Approx(1.0));
  for (int i = 0; i < 5; ++i) CHECK(f.at(i, 0) == 0.0);

  AnalyticSolution wd{Wedge{0.5}};
  GridField g = sample_to_grid(wd, {-1, -1, 1, 1}, 0.25);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) CHECK(g.at(i, j) == g.at(i, g.ny - 1 - j));

  CHECK_THROWS_AS(sample_to_grid(hp, {-1, -1, 1, 1}, 1e-6), fbp::resource_error);
  CHECK_THROWS_AS(sample_to_grid(hp, {1, 1, -1, -1}, 0.5), std::invalid_argument);
}

TEST_CASE("interior harmonicity of sampled families") {
  // 5-point Laplacian O(h^2) at nodes more than 2h inside the positive phase.
  struct Case {
    AnalyticSolution sol;
    solutions::Window win;
  };
  std::vector<Case> cases = {
      {AnalyticSolution{HalfPlane{}}, {-2, -2, 2, 2}},
      {AnalyticSolution{TwoPlane{0.5}}, {-2, -2, 2, 2}},
      {AnalyticSolution{Wedge{0.7}}, {-2, -2, 2, 2}},
      {hairpin(1), {-6, -6, 6, 6}},
  };
  // Calibrated once: hairpin(1) measures sup|lap|/h^2 of 0.57 at h=0.05 rising
  // toward ~1.2 as the 2h-margin nodes approach the tips.
  const double C = 2.0;
  for (const auto& c : cases) {
    for (double h : {0.05, 0.025}) {
      GridField f = sample_to_grid(c.sol, c.win, h);
      double sup = 0;
      for (int j = 1; j + 1 < f.ny; ++j)
        for (int i = 1; i + 1 < f.nx; ++i) {
          bool interior = true;
          for (int dj = -3; dj <= 3 && interior; ++dj)
            for (int di = -3; di <= 3; ++di) {
              int ni = i + di, nj = j + dj;
              if (!f.in_grid(ni, nj) || f.at(ni, nj) <= 0) {
                interior = false;
                break;
              }
            }
          if (interior) sup = std::max(sup, std::abs(f.laplacian_node(i, j)));
        }
      CHECK(sup <= C * h * h);
    }
  }
}
