#pragma once

#include <vector>

#include "fbp/gridfield.hpp"
#include "fbp/solutions.hpp"
#include "fbp/types.hpp"

namespace fbp::weiss {

struct WeissSample {
  double r;
  double phi;
};

struct QuadParams {
  int n_theta = 512;
  int n_radial = 128;
};

// Phi(u, r) = r^-2 int_{B_r} (|grad u|^2 + chi_{u>0}) - r^-3 int_{dB_r} u^2.
// Polar quadrature: angular midpoint rule, Gauss-Legendre in radius with
// per-ray splitting at free-boundary crossings for analytic inputs.
double weiss_phi(const solutions::AnalyticSolution& u, Complex x0, double r,
                 const QuadParams& quad = {});
// Grid variant: bilinear u, interpolated central-difference gradient; callers
// should widen tolerances to ~5h.
double weiss_phi(const GridField& u, Complex x0, double r, const QuadParams& quad = {});

struct WeissScan {
  std::vector<WeissSample> samples;
  std::vector<double> defects;  // defects[i] = max(0, phi_i - phi_{i+1})
};

WeissScan weiss_scan(const solutions::AnalyticSolution& u, Complex x0,
                     const std::vector<double>& radii, const QuadParams& quad = {});
WeissScan weiss_scan(const GridField& u, Complex x0, const std::vector<double>& radii,
                     const QuadParams& quad = {});

}  // namespace fbp::weiss
