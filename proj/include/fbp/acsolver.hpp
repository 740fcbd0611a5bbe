#pragma once

#include <vector>

#include "fbp/gridfield.hpp"
#include "fbp/solutions.hpp"

namespace fbp::acsolver {

struct StepPolicy {
  double init = 1e-2;
  double shrink = 0.5;
  int max_backtrack = 40;
};

struct SolverParams {
  double epsilon_relax = 0.0;  // 0: defaults to 2h
  int max_iters = 60000;
  double descent_tol = 1e-7;
  StepPolicy step;
};

// Dirichlet data on the window frame, row-major node indices.
struct BoundaryData {
  std::vector<std::pair<std::size_t, double>> values;
};

BoundaryData boundary_from_family(const solutions::AnalyticSolution& sol,
                                  const solutions::Window& window, double h);

struct MinimizeResult {
  GridField field;
  std::vector<double> energy_trace;
  bool converged = false;
  int iters = 0;
  double final_grad_norm = 0.0;
};

// Projected Barzilai-Borwein descent on the relaxed Alt-Caffarelli energy
//   E(u) = sum_edges (du)^2 + h^2 sum_nodes min(u/eps, 1),  u >= 0,
// with Dirichlet data on the frame and harmonic-extension initialization.
MinimizeResult minimize(const solutions::Window& window, double h, const BoundaryData& boundary,
                        const SolverParams& params = {});

struct FbcStrandStats {
  double mean = 0.0;
  double max = 0.0;
  int count = 0;
};

struct FbcStats {
  std::vector<FbcStrandStats> per_strand;
  double mean = 0.0;
  double max = 0.0;
  int count = 0;
};

// ||grad u| - 1| at traced free-boundary points via a one-sided normal secant
// over [probe_offset, probe_offset + baseline]; probe_offset defaults to 2h
// and baseline to 2h. Solver outputs should pass an offset of ~3*epsilon_relax
// to clear the smeared band and a fixed baseline long enough to average out
// contour jitter (the intrinsic slope error is what scales with h).
FbcStats verify_fbc(const GridField& field, double probe_offset = 0.0, double baseline = 0.0);

// Discrete relaxed energy sum_edges (du)^2 + h^2 sum_nodes min(u/eps, 1);
// the comparison oracle for minimizer optimality.
double discrete_energy(const GridField& field, double epsilon_relax);

struct RegularityReport {
  double sup_grad_half_window = 0.0;
  std::vector<std::pair<double, double>> profile;  // (r, sup_{B_r} u / r)
  double min_profile = 0.0;
  Complex fb_point{0, 0};
};

// Lipschitz bound and nondegeneracy profile at a free boundary point
// (defaults to the traced point closest to the window center).
RegularityReport regularity_diagnostics(const GridField& field,
                                        const Complex* fb_point = nullptr);

}  // namespace fbp::acsolver
