#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fbp/acsolver.hpp"
#include "fbp/geometry.hpp"
#include "fbp/solutions.hpp"

using namespace fbp;
using namespace fbp::acsolver;
using solutions::AnalyticSolution;
using solutions::HalfPlane;
using solutions::Hairpin;
using solutions::TwoPlane;
using solutions::Window;
using solutions::eval;
using solutions::sample_to_grid;

TEST_CASE("zero boundary data minimizes to the zero field") {
  Window win{-1, -1, 1, 1};
  double h = 1.0 / 16;
  BoundaryData bd = boundary_from_family(AnalyticSolution{HalfPlane{}}, win, h);
  for (auto& [k, v] : bd.values) v = 0.0;
  auto res = minimize(win, h, bd);
  CHECK(res.converged);
  for (double v : res.field.values) CHECK(v == 0.0);
}

TEST_CASE("half-plane benchmark: proximity, optimality, maximum principle") {
  Window win{-1, -1, 1, 1};
  const double h = 1.0 / 64;
  AnalyticSolution hp{HalfPlane{}};
  auto res = minimize(win, h, boundary_from_family(hp, win, h));
  CHECK(res.converged);

  for (size_t k = 1; k < res.energy_trace.size(); ++k)
    CHECK(res.energy_trace[k] <= res.energy_trace[k - 1] + 1e-12 * std::abs(res.energy_trace[0]));

  // Comparison optimality against the analytic minimizer's sample.
  GridField exact = sample_to_grid(hp, win, h);
  double eps = 2 * h;
  CHECK(discrete_energy(res.field, eps) <= discrete_energy(exact, eps) + 1e-9);

  double bsup = 0;
  for (int i = 0; i < res.field.nx; ++i) bsup = std::max(bsup, res.field.at(i, res.field.ny - 1));
  double usup = *std::max_element(res.field.values.begin(), res.field.values.end());
  CHECK(usup <= bsup + 1e-12);

  double sup = 0;
  for (int j = 0; j < res.field.ny; ++j)
    for (int i = 0; i < res.field.nx; ++i)
      sup = std::max(sup, std::abs(res.field.at(i, j) - eval(hp, res.field.node(i, j))));
  CHECK(sup <= 5 * h);
}

TEST_CASE("mesh refinement: sup distance decreases monotonically") {
  Window win{-1, -1, 1, 1};
  AnalyticSolution hp{HalfPlane{}};
  double prev = 1e9;
  for (double h : {1.0 / 32, 1.0 / 64, 1.0 / 128}) {
    auto res = minimize(win, h, boundary_from_family(hp, win, h));
    double sup = 0;
    for (int j = 0; j < res.field.ny; ++j)
      for (int i = 0; i < res.field.nx; ++i)
        sup = std::max(sup, std::abs(res.field.at(i, j) - eval(hp, res.field.node(i, j))));
    CHECK(sup < prev);
    prev = sup;
  }
}

TEST_CASE("two-plane boundary data separates the positive phase by the gap") {
  Window win{-1, -1, 1, 1};
  const double h = 1.0 / 64;
  auto res = minimize(win, h, boundary_from_family(AnalyticSolution{TwoPlane{0.5}}, win, h));
  auto pc = geometry::positive_components(res.field);
  REQUIRE(pc.count == 2);
  const double L = geometry::contour_level(res.field);
  int top_label = pc.label[res.field.index(0, res.field.ny - 1)];
  double ytop = 1e9, ybot = -1e9;
  for (int j = 0; j < res.field.ny; ++j)
    for (int i = 0; i < res.field.nx; ++i) {
      if (res.field.at(i, j) <= L) continue;
      double y = res.field.node(i, j).imag();
      if (pc.label[res.field.index(i, j)] == top_label)
        ytop = std::min(ytop, y);
      else
        ybot = std::max(ybot, y);
    }
  CHECK(ytop - ybot == doctest::Approx(0.5).epsilon(0.3));
}

TEST_CASE("invalid boundary data is rejected") {
  Window win{-1, -1, 1, 1};
  BoundaryData bd = boundary_from_family(AnalyticSolution{HalfPlane{}}, win, 0.25);
  bd.values[0].second = -1.0;
  CHECK_THROWS_AS(minimize(win, 0.25, bd), std::invalid_argument);
  bd.values.erase(bd.values.begin());
  CHECK_THROWS_AS(minimize(win, 0.25, bd), std::invalid_argument);
}

TEST_CASE("verify_fbc on exact samples and on solver output") {
  const double h = 1.0 / 64;
  GridField exact = sample_to_grid(AnalyticSolution{HalfPlane{}}, {-1, -1, 1, 1}, h);
  auto stats = verify_fbc(exact);
  CHECK(stats.count > 20);
  CHECK(stats.max <= 2 * h);

  Window win{-1, -1, 1, 1};
  auto good = minimize(win, h, boundary_from_family(AnalyticSolution{HalfPlane{}}, win, h));
  auto gstats = verify_fbc(good.field, 6 * h, 0.1);
  CHECK(gstats.max <= 0.1);

  SolverParams lazy;
  lazy.max_iters = 3;
  auto bad = minimize(win, h, boundary_from_family(AnalyticSolution{HalfPlane{}}, win, h), lazy);
  CHECK(!bad.converged);
  auto bstats = verify_fbc(bad.field, 6 * h, 0.1);
  CHECK(bstats.max > gstats.max);
}

TEST_CASE("fbc defect halves under h-halving") {
  Window win{-1, -1, 1, 1};
  AnalyticSolution hp{HalfPlane{}};
  std::vector<double> defects;
  for (double h : {1.0 / 64, 1.0 / 128}) {
    auto res = minimize(win, h, boundary_from_family(hp, win, h));
    defects.push_back(verify_fbc(res.field, 6 * h, 0.1).max);
  }
  CHECK(defects[1] <= 0.6 * defects[0]);
}

TEST_CASE("regularity diagnostics") {
  GridField f = sample_to_grid(AnalyticSolution{Hairpin{1}}, {-6, -6, 6, 6}, 0.02);
  Complex tip(-(1.0 + kPi / 2), 0.0);
  auto rep = regularity_diagnostics(f, &tip);
  CHECK(rep.min_profile >= 1.0 / (2 * kPi));
  CHECK(rep.sup_grad_half_window <= 1.0);

  GridField hp = sample_to_grid(AnalyticSolution{HalfPlane{}}, {-1, -1, 1, 1}, 0.02);
  Complex origin(0, 0);
  auto hrep = regularity_diagnostics(hp, &origin);
  for (auto [r, p] : hrep.profile) CHECK(p == doctest::Approx(1.0).epsilon(0.03));

  Window win{-1, -1, 1, 1};
  auto res = minimize(win, 1.0 / 64,
                      boundary_from_family(AnalyticSolution{HalfPlane{}}, win, 1.0 / 64));
  auto srep = regularity_diagnostics(res.field);
  CHECK(srep.sup_grad_half_window <= 1.2);
}
