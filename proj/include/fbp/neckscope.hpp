#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fbp/geometry.hpp"
#include "fbp/gridfield.hpp"
#include "fbp/types.hpp"

namespace fbp::neckscope {

struct Saddle {
  Complex z0;
  double a0;
};

// Subgrid-refined interior critical points with indefinite Hessian.
std::vector<Saddle> find_saddles(const GridField& field);

struct Proximity {
  double delta;
  RigidMotion rotation;
};

// min over rotations of sup_{|x| <= 2 a0/epsilon} |u(z0+x) - H_{a0}(rho x)| / a0.
Proximity hairpin_proximity(const GridField& field, Complex z0, double a0, double epsilon);

// Harmonic conjugate of u on the positive-phase component of the basepoint,
// v(basepoint) = 0. Spanning-tree integration of the Cauchy-Riemann increments
// with loop-closure least squares. Throws structure_error when the component
// is multiply connected.
GridField harmonic_conjugate(const GridField& field, Complex basepoint);

struct ConformalMapNode {
  Complex z;
  Complex psi;
  Complex psi1;  // NaN when stencil unavailable
  Complex psi2;
  bool on_cut = false;  // branch resolved by continuity near beta
};

struct ConformalMapSample {
  std::vector<ConformalMapNode> nodes;
  Complex saddle{0, 0};
  double a0 = 0;
  double probe_radius = 0;
};

// Branch evaluator for psi = V_{a0}^{-1} o (u + i v), with the branch side
// chosen across the steepest-descent cut beta through the saddle.
struct PsiMap {
  GridField u;
  GridField v;
  std::vector<Complex> beta;  // oriented cut polyline through the saddle
  double a0 = 0;
  Complex saddle{0, 0};

  // side > 0: north of beta. |side| below ~h/4 marks near-cut points.
  double side(Complex z) const;
  Complex operator()(Complex z) const;
};

struct PsiBuild {
  ConformalMapSample sample;
  PsiMap map;
};

// orientation: direction of the hairpin axis (from the proximity rotation);
// defaults to the principal direction of beta.
PsiBuild build_psi(const GridField& field, const GridField& v, double a0, Complex saddle,
                   double probe_radius = 0.0, std::optional<double> orientation = std::nullopt);

struct PsiEstimates {
  double sup_second;
  double first_defect;
  double theta;
};

// sup|psi''| and min over theta of sup |psi' - e^{i theta}|/(|z - saddle| + a0),
// restricted to nodes within r0 of the saddle.
PsiEstimates psi_estimates(const ConformalMapSample& map, double a0, double r0);

// sup over traced boundary points of |kappa(z) - kappa_{a0}(psi(z))|.
double curvature_compare(const GridField& field, const PsiBuild& psi, double a0);

struct NeckReport {
  Complex center{0, 0};
  double a = 0;
  RigidMotion rotation;
  double proximity_delta = 0;
  geometry::FourGraphReport four_graph;
  double psi_sup_second = 0;
  double psi_first_defect = 0;
  double curvature_defect = 0;
  std::string error;  // nonempty when a stage failed for this neck
};

struct NeckParams {
  double epsilon = 0.125;     // proximity probe radius = 2 a0 / epsilon
  double r_out = 0.0;         // annulus outer radius; 0: auto from window
  double psi_probe = 0.0;     // psi probe radius; 0: auto
};

struct NeckScan {
  std::vector<NeckReport> necks;
  double outside_curvature_bound = 0.0;  // sup |kappa| outside all neck balls
};

NeckScan neck_pipeline(const GridField& field, const NeckParams& params = {});

}  // namespace fbp::neckscope
