#pragma once

#include <array>
#include <functional>
#include <vector>

#include "fbp/solutions.hpp"
#include "fbp/types.hpp"

namespace fbp::traizet {

// Weierstrass data of the correspondence: g = 2 du/dz (the holomorphic
// extension's derivative) and height differential dh = g dz. dg is g' in z.
struct WeierstrassData {
  std::function<double(Complex)> u;
  std::function<bool(Complex)> in_domain;
  std::function<Complex(Complex)> g;
  std::function<Complex(Complex)> dg;
};

// Supported: HalfPlane and Hairpin (global holomorphic extension on one
// component). Wedge/TwoPlane throw std::invalid_argument.
WeierstrassData weierstrass_data(const solutions::AnalyticSolution& sol);

using Vec3 = std::array<double, 3>;

struct SurfaceMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
  std::vector<double> gauss_curvature;  // per vertex, <= 0
  std::vector<double> metric_factor;    // lambda = (1 + |g|^2)/2 per vertex
  std::vector<Complex> domain_z;        // parameter-domain node per vertex
  std::vector<std::vector<Vec3>> boundary;  // X3 = 0 polylines
  int basepoint_index = -1;
  double basepoint_height = 0.0;
  double loop_residual = 0.0;  // max pre-least-squares loop defect
};

// Numerical immersion X = Re int((1-g^2)/2, i(1+g^2)/2, g) dz over the grid
// Omega cap window at the given step; per-edge Gauss-Legendre quadrature,
// spanning tree plus loop-closure least squares.
SurfaceMesh immerse(const WeierstrassData& data, const solutions::Window& window, double step,
                    Complex basepoint);

// Translate the basepoint over the origin and rotate about the vertical axis
// so the neck axis aligns with x1 (heights are preserved).
void canonical_align(SurfaceMesh& mesh);

// sup over vertices of |(x2/rho)^2 + (x3/rho)^2 - cosh^2(x1/rho)|.
double catenoid_residual(const SurfaceMesh& mesh, double rho);

// Golden-section minimizer of the catenoid residual, bracket seeded at the
// neck-top height. Throws fit_error when no interior bracket exists.
double fit_rho(const SurfaceMesh& mesh);

// K = -16 |g'|^2 / (1 + |g|^2)^4, the Gauss curvature of the conformal metric
// lambda |dz| with lambda = (1+|g|^2)/2.
std::vector<double> gauss_curvature(const WeierstrassData& data, const std::vector<Complex>& nodes);

struct DefectBin {
  double r_lo, r_hi;
  int count = 0;
  double k_defect = 0.0;
  double metric_defect = 0.0;
  double bound = 0.0;  // two-regime bound with epsilon = 2 pi rho
};

struct DefectProfile {
  double rho = 0.0;
  double epsilon = 0.0;
  std::vector<DefectBin> bins;
};

// Per-bin sup of |K - K_rho| and of |lambda/lambda_model - 1| against the model
// hairpin H_rho, nodes binned by the 3-space distance of their model image.
DefectProfile curvature_compare_3d(const WeierstrassData& data, double rho,
                                   const std::vector<Complex>& nodes);

// Discrete mean curvature magnitude (cotangent formula); NaN on boundary
// vertices.
std::vector<double> mean_curvature(const SurfaceMesh& mesh);
double mean_interior_mean_curvature(const SurfaceMesh& mesh);

}  // namespace fbp::traizet
