#pragma once

#include <string>
#include <variant>

#include "fbp/gridfield.hpp"
#include "fbp/types.hpp"

namespace fbp::solutions {

// The four explicit solution families, in body coordinates:
//   HalfPlane     u = x2^+
//   TwoPlane(b)   u = x2^+ + (x2+b)^-,  zero slab {-b <= x2 <= 0}, b >= 0
//   Wedge(s)      u = s|x2|, 0 < s <= 1 (weak solution; s=1 matches TwoPlane(0))
//   Hairpin(a)    u = H_a, positive phase Omega_a = {|x1/a| < pi/2 + cosh(x2/a)}
struct HalfPlane {};
struct TwoPlane {
  double b = 0.0;
};
struct Wedge {
  double s = 1.0;
};
struct Hairpin {
  double a = 1.0;
};
using Family = std::variant<HalfPlane, TwoPlane, Wedge, Hairpin>;

struct AnalyticSolution {
  Family family;
  RigidMotion motion;

  AnalyticSolution(Family f = HalfPlane{}, RigidMotion m = {});  // validates parameters
};

const char* family_name(const Family& f);
std::string describe(const AnalyticSolution& sol);

struct HairpinGeometry {
  double a;
  double separation;   // a * (2 + pi)
  double saddle_value; // a
  explicit HairpinGeometry(double a_);
};

// phi(zeta) = i (zeta + sinh zeta), conformal from the strip |Im zeta| <= pi/2
// onto the closure of Omega_1. Throws std::domain_error off the strip.
Complex phi(Complex zeta);
Complex phi_deriv(Complex zeta);  // i (1 + cosh zeta)

struct PhiInverse {
  Complex zeta;
  double residual = 0.0;
  int iters = 0;
  bool converged = false;
};

// Newton inversion of phi; returns the strip representative. Throws
// std::domain_error when z is outside the closure of Omega_1; non-convergence
// is reported through the result, not thrown.
PhiInverse phi_inv(Complex z, double tol = 1e-12);

// V(z) = cosh(phi^{-1}(z)) on closure(Omega_1); V' and V'' as derivatives in z.
Complex hairpin_V(Complex z);
Complex hairpin_Vp(Complex z);
Complex hairpin_Vpp(Complex z);

// Membership margin for Hairpin(a) in body coordinates:
// a*(pi/2 + cosh(x2/a)) - |x1|; positive inside Omega_a.
double hairpin_margin(double a, Complex w);

double eval(const AnalyticSolution& sol, Complex z);

// Gradient as a complex number gx + i*gy (world frame). One-sided limit on the
// free boundary; throws std::domain_error strictly inside the zero phase.
Complex grad(const AnalyticSolution& sol, Complex z);

enum class Side { Left, Right };

struct BoundaryPoint {
  Complex point;
  double kappa;
};

// Point of the model boundary {|x1| = a(pi/2 + cosh(x2/a))} with x2 = a*y1,
// and its curvature (1/a) sech^2(y1). No rigid motion applied.
BoundaryPoint boundary_param(double a, double y1, Side side);

// Holomorphic extension W with Re W = u on the connected component of z.
// Throws std::domain_error in the zero-phase interior.
Complex holo_ext(const AnalyticSolution& sol, Complex z);

struct Window {
  double x0, y0, x1, y1;
  bool empty() const { return !(x1 > x0) || !(y1 > y0); }
};

inline constexpr std::size_t kDefaultNodeCap = 1u << 24;

GridField sample_to_grid(const AnalyticSolution& sol, const Window& window, double h,
                         std::size_t node_cap = kDefaultNodeCap);

}  // namespace fbp::solutions
