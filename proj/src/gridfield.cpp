#include "fbp/gridfield.hpp"

#include <algorithm>
#include <cmath>

namespace fbp {

double GridField::bilinear(Complex z) const {
  double fx = (z.real() - origin.real()) / h;
  double fy = (z.imag() - origin.imag()) / h;
  fx = std::clamp(fx, 0.0, static_cast<double>(nx - 1));
  fy = std::clamp(fy, 0.0, static_cast<double>(ny - 1));
  int i = std::min(static_cast<int>(fx), nx - 2);
  int j = std::min(static_cast<int>(fy), ny - 2);
  if (nx == 1) i = 0;
  if (ny == 1) j = 0;
  double tx = fx - i, ty = fy - j;
  double v00 = at(i, j);
  double v10 = nx > 1 ? at(i + 1, j) : v00;
  double v01 = ny > 1 ? at(i, j + 1) : v00;
  double v11 = (nx > 1 && ny > 1) ? at(i + 1, j + 1) : v00;
  return (1 - tx) * (1 - ty) * v00 + tx * (1 - ty) * v10 + (1 - tx) * ty * v01 + tx * ty * v11;
}

Complex GridField::grad_node(int i, int j) const {
  double gx, gy;
  if (i == 0)
    gx = (at(1, j) - at(0, j)) / h;
  else if (i == nx - 1)
    gx = (at(nx - 1, j) - at(nx - 2, j)) / h;
  else
    gx = (at(i + 1, j) - at(i - 1, j)) / (2 * h);
  if (j == 0)
    gy = (at(i, 1) - at(i, 0)) / h;
  else if (j == ny - 1)
    gy = (at(i, ny - 1) - at(i, ny - 2)) / h;
  else
    gy = (at(i, j + 1) - at(i, j - 1)) / (2 * h);
  return {gx, gy};
}

Complex GridField::grad_interp(Complex z) const {
  double fx = (z.real() - origin.real()) / h;
  double fy = (z.imag() - origin.imag()) / h;
  fx = std::clamp(fx, 0.0, static_cast<double>(nx - 1));
  fy = std::clamp(fy, 0.0, static_cast<double>(ny - 1));
  int i = std::min(static_cast<int>(fx), std::max(nx - 2, 0));
  int j = std::min(static_cast<int>(fy), std::max(ny - 2, 0));
  double tx = fx - i, ty = fy - j;
  Complex g00 = grad_node(i, j);
  Complex g10 = nx > 1 ? grad_node(i + 1, j) : g00;
  Complex g01 = ny > 1 ? grad_node(i, j + 1) : g00;
  Complex g11 = (nx > 1 && ny > 1) ? grad_node(i + 1, j + 1) : g00;
  return (1 - tx) * (1 - ty) * g00 + tx * (1 - ty) * g10 + (1 - tx) * ty * g01 + tx * ty * g11;
}

double GridField::laplacian_node(int i, int j) const {
  return (at(i + 1, j) + at(i - 1, j) + at(i, j + 1) + at(i, j - 1) - 4 * at(i, j)) / (h * h);
}

void GridField::check_nonnegative() const {
  for (double v : values)
    if (!(v >= 0) || !std::isfinite(v))
      throw std::invalid_argument("GridField: negative or non-finite value");
}

}  // namespace fbp
