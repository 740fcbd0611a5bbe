#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace fbp {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

inline bool finite(Complex z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

inline void require_finite(Complex z, const char* what) {
  if (!finite(z)) throw std::domain_error(std::string(what) + ": non-finite argument");
}

// Rotation by theta followed by translation. theta stored reduced to [0, 2pi).
struct RigidMotion {
  double theta = 0.0;
  Complex shift{0.0, 0.0};

  RigidMotion() = default;
  RigidMotion(double th, Complex sh) : theta(reduce(th)), shift(sh) {}

  static double reduce(double th) {
    double t = std::fmod(th, 2.0 * kPi);
    if (t < 0) t += 2.0 * kPi;
    return t;
  }

  Complex rotor() const { return std::polar(1.0, theta); }

  // z  ->  e^{i theta} z + shift
  Complex apply(Complex z) const { return rotor() * z + shift; }
  // world -> body frame, inverse of apply
  Complex undo(Complex z) const { return (z - shift) * std::conj(rotor()); }

  // this after other:  apply(other.apply(z))
  RigidMotion compose(const RigidMotion& other) const {
    return RigidMotion(theta + other.theta, rotor() * other.shift + shift);
  }
  RigidMotion inverse() const {
    return RigidMotion(-theta, -std::conj(rotor()) * shift);
  }
};

// Error signalled when a field's zero phase has the wrong component structure.
struct structure_error : std::runtime_error {
  int count;
  explicit structure_error(const std::string& msg, int n) : std::runtime_error(msg), count(n) {}
};

struct resource_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct solver_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct fit_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace fbp
