#include "fbp/weiss.hpp"

#include <cmath>
#include <functional>

#include "fbp/numerics.hpp"

namespace fbp::weiss {

namespace {

struct Integrand {
  // density(x) = |grad u|^2 + 1 on the positive phase, 0 outside
  std::function<bool(Complex)> positive;
  std::function<double(Complex)> density;
  std::function<double(Complex)> value;  // u
  bool split_rays = false;
};

double phi_impl(const Integrand& f, Complex x0, double r, const QuadParams& quad) {
  const int nt = quad.n_theta;
  const double dtheta = 2 * kPi / nt;

  double area = 0.0;
  double ring = 0.0;
  for (int k = 0; k < nt; ++k) {
    double theta = (k + 0.5) * dtheta;
    Complex dir = std::polar(1.0, theta);

    if (f.split_rays) {
      // Locate membership changes along the ray, then integrate per segment.
      const int nscan = 64;
      std::vector<double> cuts{0.0};
      bool prev = f.positive(x0 + 1e-12 * r * dir);
      for (int m = 1; m <= nscan; ++m) {
        double t = r * m / nscan;
        bool cur = f.positive(x0 + t * dir);
        if (cur != prev) {
          double lo = r * (m - 1) / nscan, hi = t;
          for (int it = 0; it < 60; ++it) {
            double mid = 0.5 * (lo + hi);
            if (f.positive(x0 + mid * dir) == prev)
              lo = mid;
            else
              hi = mid;
          }
          cuts.push_back(0.5 * (lo + hi));
          prev = cur;
        }
      }
      cuts.push_back(r);
      for (size_t s = 0; s + 1 < cuts.size(); ++s) {
        double a = cuts[s], b = cuts[s + 1];
        if (b - a < 1e-14 * r) continue;
        double mid_t = 0.5 * (a + b);
        if (!f.positive(x0 + mid_t * dir)) continue;
        int nn = std::max(8, static_cast<int>(std::lround(quad.n_radial * (b - a) / r)));
        const auto& rule = num::gauss_legendre(nn);
        for (int q = 0; q < nn; ++q) {
          double t = 0.5 * (a + b) + 0.5 * (b - a) * rule.x[q];
          area += 0.5 * (b - a) * rule.w[q] * f.density(x0 + t * dir) * t * dtheta;
        }
      }
    } else {
      const auto& rule = num::gauss_legendre(quad.n_radial);
      for (int q = 0; q < quad.n_radial; ++q) {
        double t = 0.5 * r * (1.0 + rule.x[q]);
        Complex x = x0 + t * dir;
        if (!f.positive(x)) continue;
        area += 0.5 * r * rule.w[q] * f.density(x) * t * dtheta;
      }
    }

    double u = f.value(x0 + r * dir);
    ring += u * u * r * dtheta;
  }
  return area / (r * r) - ring / (r * r * r);
}

}  // namespace

double weiss_phi(const solutions::AnalyticSolution& u, Complex x0, double r,
                 const QuadParams& quad) {
  require_finite(x0, "weiss_phi");
  if (!(r > 0)) throw std::invalid_argument("weiss_phi: r must be > 0");
  Integrand f;
  f.positive = [&u](Complex x) { return solutions::eval(u, x) > 0; };
  // Total on the plane: quadrature nodes may straddle thin zero-phase slivers.
  f.density = [&u](Complex x) {
    if (solutions::eval(u, x) <= 0) return 0.0;
    return std::norm(solutions::grad(u, x)) + 1.0;
  };
  f.value = [&u](Complex x) { return solutions::eval(u, x); };
  f.split_rays = true;
  return phi_impl(f, x0, r, quad);
}

double weiss_phi(const GridField& u, Complex x0, double r, const QuadParams& quad) {
  u.check_shape();
  if (!(r > 0)) throw std::invalid_argument("weiss_phi: r must be > 0");
  if (!u.contains(x0 + Complex(r, r)) || !u.contains(x0 - Complex(r, r)))
    throw std::domain_error("weiss_phi: ball exits the window");
  Integrand f;
  f.positive = [&u](Complex x) { return u.bilinear(x) > 0; };
  f.density = [&u](Complex x) { return std::norm(u.grad_interp(x)) + 1.0; };
  f.value = [&u](Complex x) { return u.bilinear(x); };
  f.split_rays = false;
  return phi_impl(f, x0, r, quad);
}

namespace {

template <class U>
WeissScan scan_impl(const U& u, Complex x0, const std::vector<double>& radii,
                    const QuadParams& quad) {
  for (size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1]))
      throw std::invalid_argument("weiss_scan: radii must be strictly increasing");
  WeissScan out;
  for (double r : radii) out.samples.push_back({r, weiss_phi(u, x0, r, quad)});
  for (size_t i = 0; i + 1 < out.samples.size(); ++i)
    out.defects.push_back(std::max(0.0, out.samples[i].phi - out.samples[i + 1].phi));
  return out;
}

}  // namespace

WeissScan weiss_scan(const solutions::AnalyticSolution& u, Complex x0,
                     const std::vector<double>& radii, const QuadParams& quad) {
  return scan_impl(u, x0, radii, quad);
}

WeissScan weiss_scan(const GridField& u, Complex x0, const std::vector<double>& radii,
                     const QuadParams& quad) {
  return scan_impl(u, x0, radii, quad);
}

}  // namespace fbp::weiss
