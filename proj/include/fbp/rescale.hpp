#pragma once

#include <variant>

#include "fbp/gridfield.hpp"
#include "fbp/solutions.hpp"

namespace fbp::rescale {

// v(x) = u(center + lambda x) / lambda.
solutions::AnalyticSolution rescaled(const solutions::AnalyticSolution& u, Complex center,
                                     double lambda);
GridField rescaled(const GridField& u, Complex center, double lambda);

struct ClassificationResult {
  solutions::AnalyticSolution family;
  double residual;      // sup |u - candidate| on the probe disk, over probe_radius
  double probe_radius;
};

enum FamilyMask : unsigned {
  kHalfPlane = 1u,
  kWedge = 2u,
  kTwoPlane = 4u,
  kHairpin = 8u,
  kAllFamilies = 15u,
};

struct ClassifyParams {
  int probe_n = 64;        // probe grid resolution
  int coarse_theta = 64;
  int coarse_param = 32;
  int descent_budget = 200;  // line-search iterations cap during refinement
  unsigned family_mask = kAllFamilies;
};

ClassificationResult classify(const solutions::AnalyticSolution& u, double probe_radius,
                              const ClassifyParams& params = {});
ClassificationResult classify(const GridField& u, double probe_radius,
                              const ClassifyParams& params = {});

}  // namespace fbp::rescale
