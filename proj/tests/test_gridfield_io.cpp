#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "fbp/geometry.hpp"
#include "fbp/io.hpp"
#include "fbp/numerics.hpp"
#include "fbp/solutions.hpp"

using namespace fbp;
namespace fs = std::filesystem;

namespace {

fs::path tmpdir() {
  fs::path p = fs::temp_directory_path() / "fbp_io_test";
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("bilinear and gradient interpolation") {
  GridField f;
  f.origin = {0, 0};
  f.h = 0.5;
  f.nx = 5;
  f.ny = 5;
  f.values.resize(25);
  for (int j = 0; j < 5; ++j)
    for (int i = 0; i < 5; ++i) f.at(i, j) = 2.0 * (i * 0.5) + 3.0 * (j * 0.5);
  CHECK(f.bilinear({0.7, 1.1}) == doctest::Approx(2 * 0.7 + 3 * 1.1));
  Complex g = f.grad_interp({0.8, 0.9});
  CHECK(g.real() == doctest::Approx(2.0));
  CHECK(g.imag() == doctest::Approx(3.0));

  GridField bad;
  bad.nx = 2;
  bad.ny = 2;
  bad.h = 1;
  bad.values.resize(3);
  CHECK_THROWS_AS(bad.check_shape(), std::invalid_argument);
}

TEST_CASE("field binary + JSON round trip") {
  auto sol = solutions::AnalyticSolution(solutions::Hairpin{0.5});
  GridField f = solutions::sample_to_grid(sol, {-3, -3, 3, 3}, 0.1);
  fs::path base = tmpdir() / "field_a";
  io::write_field(f, base.string());
  GridField g = io::read_field(base.string());
  CHECK(g.nx == f.nx);
  CHECK(g.ny == f.ny);
  CHECK(g.h == f.h);
  CHECK(g.origin == f.origin);
  CHECK(g.provenance == f.provenance);
  CHECK(g.values == f.values);  // bit-exact
}

TEST_CASE("shortest round-trip float formatting") {
  CHECK(num::format_double(0.1) == "0.1");
  CHECK(num::format_double(1.0) == "1");
  double pi_ish = 3.141592653589793;
  CHECK(std::stod(num::format_double(pi_ish)) == pi_ish);
}

TEST_CASE("strand CSV golden format") {
  geometry::ContourStrand s;
  s.points = {{0, 0}, {0.5, 0.25}, {1, 1}};
  std::vector<double> kap = {std::nan(""), 0.125, std::nan("")};
  fs::path p = tmpdir() / "strand.csv";
  io::write_strand_csv(s, kap, p.string());
  CHECK(io::read_text(p.string()) == "x,y,kappa\n0,0,nan\n0.5,0.25,0.125\n1,1,nan\n");
}

TEST_CASE("weiss CSV golden format") {
  weiss::WeissScan scan;
  scan.samples = {{0.5, 1.5}, {1.0, 1.625}};
  scan.defects = {0.0};
  fs::path p = tmpdir() / "weiss.csv";
  io::write_weiss_csv(scan, p.string());
  CHECK(io::read_text(p.string()) == "r,phi,defect\n0.5,1.5,0\n1,1.625,0\n");
}

TEST_CASE("determinism: identical runs produce identical bytes") {
  auto sol = solutions::AnalyticSolution(solutions::Hairpin{1.0}, RigidMotion(0.3, {0.1, -0.2}));
  GridField f = solutions::sample_to_grid(sol, {-2, -2, 2, 2}, 0.05);
  fs::path b1 = tmpdir() / "det1", b2 = tmpdir() / "det2";
  io::write_field(f, b1.string());
  io::write_field(solutions::sample_to_grid(sol, {-2, -2, 2, 2}, 0.05), b2.string());
  CHECK(io::read_text(b1.string() + ".json") == io::read_text(b2.string() + ".json"));
  CHECK(io::read_text(b1.string() + ".bin") == io::read_text(b2.string() + ".bin"));
}
