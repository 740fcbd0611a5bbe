#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "fbp/types.hpp"

namespace fbp {

// Scalar field sampled on a uniform grid. Fields representing a candidate
// solution u are nonnegative; signed fields (harmonic conjugates) reuse the
// same container.
struct GridField {
  Complex origin{0.0, 0.0};
  double h = 1.0;
  int nx = 0;
  int ny = 0;
  std::vector<double> values;
  std::string provenance;

  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
  double at(int i, int j) const { return values[index(i, j)]; }
  double& at(int i, int j) { return values[index(i, j)]; }
  Complex node(int i, int j) const { return origin + Complex(i * h, j * h); }
  bool in_grid(int i, int j) const { return i >= 0 && i < nx && j >= 0 && j < ny; }

  double width() const { return (nx - 1) * h; }
  double height() const { return (ny - 1) * h; }
  bool contains(Complex z, double margin = 0.0) const {
    return z.real() >= origin.real() + margin && z.real() <= origin.real() + width() - margin &&
           z.imag() >= origin.imag() + margin && z.imag() <= origin.imag() + height() - margin;
  }

  // Bilinear interpolation; clamps to the grid hull.
  double bilinear(Complex z) const;

  // Central-difference gradient at a node (one-sided at grid edges).
  Complex grad_node(int i, int j) const;
  // Gradient at an arbitrary point, bilinear interpolation of node gradients.
  Complex grad_interp(Complex z) const;

  // 5-point Laplacian at an interior node.
  double laplacian_node(int i, int j) const;

  void check_shape() const {
    if (nx < 1 || ny < 1 || values.size() != static_cast<std::size_t>(nx) * ny || !(h > 0))
      throw std::invalid_argument("GridField: inconsistent shape");
  }
  void check_nonnegative() const;
};

}  // namespace fbp
