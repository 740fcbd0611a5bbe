#pragma once

#include <cmath>
#include <complex>

#include "fbp/gridfield.hpp"
#include "fbp/solutions.hpp"
#include "fbp/types.hpp"

namespace testsup {

using fbp::Complex;

// Perturbed hairpin u = Re V_a(m(z)) with m(z) = z + delta * scale * (z/scale)^2,
// zero outside m^{-1}(Omega_a). Harmonic where positive; the free boundary
// condition is violated by O(delta), which is exactly what the detectors are
// asked to measure.
struct PerturbedHairpin {
  double a;
  double delta;
  double scale;  // curvature scale of the perturbation

  Complex warp(Complex z) const { return z + delta / scale * z * z; }

  double eval(Complex z) const {
    Complex w = warp(z);
    if (fbp::solutions::hairpin_margin(a, w) <= 0) return 0.0;
    double u = a * fbp::solutions::hairpin_V(w / a).real();
    return u > 0 ? u : 0.0;
  }

  fbp::GridField sample(const fbp::solutions::Window& win, double h) const {
    fbp::GridField f;
    f.origin = Complex(win.x0, win.y0);
    f.h = h;
    f.nx = static_cast<int>(std::floor((win.x1 - win.x0) / h + 1e-9)) + 1;
    f.ny = static_cast<int>(std::floor((win.y1 - win.y0) / h + 1e-9)) + 1;
    f.values.resize(static_cast<std::size_t>(f.nx) * f.ny);
    for (int j = 0; j < f.ny; ++j)
      for (int i = 0; i < f.nx; ++i) f.at(i, j) = eval(f.node(i, j));
    f.provenance = "perturbed hairpin";
    return f;
  }

  // Holomorphic extension U = V_a o m and its derivatives (for Weierstrass data).
  Complex U(Complex z) const { return a * fbp::solutions::hairpin_V(warp(z) / a); }
  Complex Up(Complex z) const {
    Complex mp = 1.0 + 2.0 * delta / scale * z;
    return fbp::solutions::hairpin_Vp(warp(z) / a) * mp;
  }
  Complex Upp(Complex z) const {
    Complex mp = 1.0 + 2.0 * delta / scale * z;
    Complex mpp = 2.0 * delta / scale;
    Complex w = warp(z) / a;
    return fbp::solutions::hairpin_Vpp(w) / a * mp * mp + fbp::solutions::hairpin_Vp(w) * mpp;
  }
};

}  // namespace testsup
