#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace fbp::num {

// Nodes/weights of the n-point Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};
const GaussRule& gauss_legendre(int n);

// Golden-section minimization of f on [a, b]; fixed iteration count keeps it
// deterministic. Returns argmin.
double golden_min(const std::function<double(double)>& f, double a, double b, int iters = 60);

// Minimize a periodic function of angle on [0, 2pi): coarse scan with
// `coarse` samples, then golden refinement around the best basin.
double periodic_min(const std::function<double(double)>& f, int coarse = 64, int iters = 60);

// Least-squares fit of q(x,y) = c0 + c1 x + c2 y + c3 x^2 + c4 xy + c5 y^2.
struct Quadratic2D {
  double c[6] = {0, 0, 0, 0, 0, 0};
  double value(double x, double y) const;
  void gradient(double x, double y, double& gx, double& gy) const;
  // Hessian entries: [uxx, uxy; uxy, uyy]
  double hxx() const { return 2 * c[3]; }
  double hxy() const { return c[4]; }
  double hyy() const { return 2 * c[5]; }
};
Quadratic2D fit_quadratic(const std::vector<double>& xs, const std::vector<double>& ys,
                          const std::vector<double>& vs);

// Conjugate gradient for SPD systems given by a matrix-free apply.
// Returns achieved relative residual.
double conjugate_gradient(const std::function<void(const std::vector<double>&, std::vector<double>&)>& apply,
                          const std::vector<double>& rhs, std::vector<double>& x,
                          int max_iters, double tol);

std::uint64_t fnv1a(const std::string& s);

// Shortest round-trip decimal formatting of a double.
std::string format_double(double v);

}  // namespace fbp::num
