#include "fbp/solutions.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "fbp/numerics.hpp"

namespace fbp::solutions {

namespace {

constexpr double kStripHalfWidth = kPi / 2;
// Slack for membership tests of the closed strip / closed Omega_a; points this
// close to the boundary count as boundary.
constexpr double kEdgeTol = 1e-9;

double pos_part(double t) { return t > 0 ? t : 0.0; }
double neg_part(double t) { return t < 0 ? -t : 0.0; }

Complex clamp_strip(Complex zeta) {
  if (std::abs(zeta.imag()) > kStripHalfWidth)
    return Complex(zeta.real(), std::copysign(kStripHalfWidth, zeta.imag()));
  return zeta;
}

}  // namespace

AnalyticSolution::AnalyticSolution(Family f, RigidMotion m) : family(f), motion(m) {
  if (auto* tp = std::get_if<TwoPlane>(&family)) {
    if (!(tp->b >= 0) || !std::isfinite(tp->b))
      throw std::invalid_argument("TwoPlane: b must be >= 0");
  } else if (auto* w = std::get_if<Wedge>(&family)) {
    if (!(w->s > 0) || !(w->s <= 1)) throw std::invalid_argument("Wedge: s must be in (0,1]");
  } else if (auto* hp = std::get_if<Hairpin>(&family)) {
    if (!(hp->a > 0) || !std::isfinite(hp->a))
      throw std::invalid_argument("Hairpin: a must be > 0");
  }
}

const char* family_name(const Family& f) {
  if (std::holds_alternative<HalfPlane>(f)) return "half_plane";
  if (std::holds_alternative<TwoPlane>(f)) return "two_plane";
  if (std::holds_alternative<Wedge>(f)) return "wedge";
  return "hairpin";
}

std::string describe(const AnalyticSolution& sol) {
  std::ostringstream os;
  os << family_name(sol.family);
  if (auto* tp = std::get_if<TwoPlane>(&sol.family))
    os << "(b=" << num::format_double(tp->b) << ")";
  else if (auto* w = std::get_if<Wedge>(&sol.family))
    os << "(s=" << num::format_double(w->s) << ")";
  else if (auto* hp = std::get_if<Hairpin>(&sol.family))
    os << "(a=" << num::format_double(hp->a) << ")";
  os << " theta=" << num::format_double(sol.motion.theta)
     << " shift=(" << num::format_double(sol.motion.shift.real()) << ","
     << num::format_double(sol.motion.shift.imag()) << ")";
  return os.str();
}

HairpinGeometry::HairpinGeometry(double a_) : a(a_), separation(a_ * (2 + kPi)), saddle_value(a_) {
  if (!(a > 0)) throw std::invalid_argument("HairpinGeometry: a must be > 0");
}

Complex phi(Complex zeta) {
  require_finite(zeta, "phi");
  if (std::abs(zeta.imag()) > kStripHalfWidth + kEdgeTol)
    throw std::domain_error("phi: zeta outside the strip |Im| <= pi/2");
  return Complex(0, 1) * (zeta + std::sinh(zeta));
}

Complex phi_deriv(Complex zeta) { return Complex(0, 1) * (1.0 + std::cosh(zeta)); }

double hairpin_margin(double a, Complex w) {
  double y = w.imag() / a;
  // cosh overflows around |y| ~ 710; the margin is then effectively +inf.
  if (std::abs(y) > 700) return std::numeric_limits<double>::max();
  return a * (kPi / 2 + std::cosh(y)) - std::abs(w.real());
}

PhiInverse phi_inv(Complex z, double tol) {
  require_finite(z, "phi_inv");
  if (!(tol > 0)) throw std::invalid_argument("phi_inv: tol must be > 0");
  if (hairpin_margin(1.0, z) < -kEdgeTol * std::max(1.0, std::abs(z)))
    throw std::domain_error("phi_inv: z outside closure(Omega_1)");

  Complex zeta = std::abs(z) <= 1.0 ? Complex(0, -1) * z : std::asinh(Complex(0, -1) * z);
  PhiInverse out;
  const int max_iters = 50;
  for (out.iters = 0; out.iters < max_iters; ++out.iters) {
    Complex f = Complex(0, 1) * (zeta + std::sinh(zeta)) - z;
    if (std::abs(f) <= tol) break;
    zeta -= f / phi_deriv(zeta);
    // Fold the iterate back into the fundamental strip if it strays.
    if (std::abs(zeta.imag()) > kPi) zeta = std::asinh(std::sinh(zeta));
  }
  zeta = clamp_strip(zeta);
  out.zeta = zeta;
  out.residual = std::abs(phi(zeta) - z);
  out.converged = out.residual <= std::max(tol, 1e-12 * std::max(1.0, std::abs(z)));
  return out;
}

Complex hairpin_V(Complex z) { return std::cosh(phi_inv(z).zeta); }

Complex hairpin_Vp(Complex z) {
  Complex zeta = phi_inv(z).zeta;
  return Complex(0, -1) * std::tanh(0.5 * zeta);
}

Complex hairpin_Vpp(Complex z) {
  Complex zeta = phi_inv(z).zeta;
  Complex c = std::cosh(0.5 * zeta);
  Complex c2 = c * c;
  return -0.25 / (c2 * c2);
}

double eval(const AnalyticSolution& sol, Complex z) {
  require_finite(z, "eval");
  Complex w = sol.motion.undo(z);
  if (std::holds_alternative<HalfPlane>(sol.family)) return pos_part(w.imag());
  if (auto* tp = std::get_if<TwoPlane>(&sol.family))
    return pos_part(w.imag()) + neg_part(w.imag() + tp->b);
  if (auto* wd = std::get_if<Wedge>(&sol.family)) return wd->s * std::abs(w.imag());
  double a = std::get<Hairpin>(sol.family).a;
  if (hairpin_margin(a, w) <= 0) return 0.0;
  double u = a * hairpin_V(w / a).real();
  return u > 0 ? u : 0.0;
}

Complex grad(const AnalyticSolution& sol, Complex z) {
  require_finite(z, "grad");
  Complex w = sol.motion.undo(z);
  Complex rot = sol.motion.rotor();
  if (std::holds_alternative<HalfPlane>(sol.family)) {
    if (w.imag() < 0) throw std::domain_error("grad: point inside the zero phase");
    return rot * Complex(0, 1);
  }
  if (auto* tp = std::get_if<TwoPlane>(&sol.family)) {
    if (w.imag() >= 0) return rot * Complex(0, 1);
    if (w.imag() <= -tp->b) return rot * Complex(0, -1);
    throw std::domain_error("grad: point inside the zero phase");
  }
  if (auto* wd = std::get_if<Wedge>(&sol.family)) {
    double s = wd->s;
    return rot * Complex(0, w.imag() >= 0 ? s : -s);
  }
  double a = std::get<Hairpin>(sol.family).a;
  double margin = hairpin_margin(a, w);
  if (margin < -kEdgeTol * a * std::max(1.0, std::abs(w) / a))
    throw std::domain_error("grad: point inside the zero phase");
  Complex vp = hairpin_Vp(w / a);
  return rot * std::conj(vp);
}

BoundaryPoint boundary_param(double a, double y1, Side side) {
  if (!(a > 0) || !std::isfinite(y1)) throw std::invalid_argument("boundary_param: bad arguments");
  double x1 = a * (kPi / 2 + std::cosh(y1));
  if (side == Side::Left) x1 = -x1;
  double sech = 1.0 / std::cosh(y1);
  return {Complex(x1, a * y1), sech * sech / a};
}

Complex holo_ext(const AnalyticSolution& sol, Complex z) {
  require_finite(z, "holo_ext");
  Complex w = sol.motion.undo(z);
  if (std::holds_alternative<HalfPlane>(sol.family)) {
    if (w.imag() < 0) throw std::domain_error("holo_ext: point inside the zero phase");
    return Complex(0, -1) * w;
  }
  if (auto* tp = std::get_if<TwoPlane>(&sol.family)) {
    if (w.imag() >= 0) return Complex(0, -1) * w;
    if (w.imag() <= -tp->b) return Complex(0, 1) * w - tp->b;
    throw std::domain_error("holo_ext: point inside the zero phase");
  }
  if (auto* wd = std::get_if<Wedge>(&sol.family)) {
    return Complex(0, w.imag() >= 0 ? -wd->s : wd->s) * w;
  }
  double a = std::get<Hairpin>(sol.family).a;
  if (hairpin_margin(a, w) < -kEdgeTol * a)
    throw std::domain_error("holo_ext: point inside the zero phase");
  return a * hairpin_V(w / a);
}

GridField sample_to_grid(const AnalyticSolution& sol, const Window& window, double h,
                         std::size_t node_cap) {
  if (!(h > 0)) throw std::invalid_argument("sample_to_grid: h must be > 0");
  if (window.empty()) throw std::invalid_argument("sample_to_grid: empty window");
  std::size_t nx = static_cast<std::size_t>(std::floor((window.x1 - window.x0) / h + 1e-9)) + 1;
  std::size_t ny = static_cast<std::size_t>(std::floor((window.y1 - window.y0) / h + 1e-9)) + 1;
  if (nx * ny > node_cap)
    throw resource_error("sample_to_grid: node count " + std::to_string(nx * ny) +
                         " exceeds cap " + std::to_string(node_cap));
  GridField f;
  f.origin = Complex(window.x0, window.y0);
  f.h = h;
  f.nx = static_cast<int>(nx);
  f.ny = static_cast<int>(ny);
  f.values.resize(nx * ny);
  for (int j = 0; j < f.ny; ++j)
    for (int i = 0; i < f.nx; ++i) f.at(i, j) = eval(sol, f.node(i, j));
  std::ostringstream prov;
  prov << "family=" << describe(sol) << " h=" << num::format_double(h);
  f.provenance = prov.str();
  return f;
}

}  // namespace fbp::solutions
