#include "fbp/numerics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

namespace fbp::num {

static GaussRule make_gauss(int n) {
  GaussRule r;
  r.x.resize(n);
  r.w.resize(n);
  // Newton on Legendre polynomials, Chebyshev-node seeds.
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    double dp = n * (x * p1 - p0) / (x * x - 1.0);
    r.x[i] = x;
    r.w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

const GaussRule& gauss_legendre(int n) {
  static std::map<int, GaussRule> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_gauss(n)).first;
  return it->second;
}

double golden_min(const std::function<double(double)>& f, double a, double b, int iters) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

double periodic_min(const std::function<double(double)>& f, int coarse, int iters) {
  const double two_pi = 2.0 * std::numbers::pi;
  int best = 0;
  double fbest = f(0.0);
  for (int k = 1; k < coarse; ++k) {
    double v = f(two_pi * k / coarse);
    if (v < fbest) {
      fbest = v;
      best = k;
    }
  }
  double t0 = two_pi * (best - 1.0) / coarse;
  double t1 = two_pi * (best + 1.0) / coarse;
  return golden_min(f, t0, t1, iters);
}

double Quadratic2D::value(double x, double y) const {
  return c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * x * y + c[5] * y * y;
}

void Quadratic2D::gradient(double x, double y, double& gx, double& gy) const {
  gx = c[1] + 2 * c[3] * x + c[4] * y;
  gy = c[2] + c[4] * x + 2 * c[5] * y;
}

Quadratic2D fit_quadratic(const std::vector<double>& xs, const std::vector<double>& ys,
                          const std::vector<double>& vs) {
  if (xs.size() != ys.size() || xs.size() != vs.size() || xs.size() < 6)
    throw std::invalid_argument("fit_quadratic: need >= 6 samples");
  double A[6][6] = {};
  double b[6] = {};
  for (size_t k = 0; k < xs.size(); ++k) {
    double x = xs[k], y = ys[k];
    double row[6] = {1.0, x, y, x * x, x * y, y * y};
    for (int i = 0; i < 6; ++i) {
      b[i] += row[i] * vs[k];
      for (int j = 0; j < 6; ++j) A[i][j] += row[i] * row[j];
    }
  }
  // Gaussian elimination with partial pivoting.
  int idx[6] = {0, 1, 2, 3, 4, 5};
  for (int col = 0; col < 6; ++col) {
    int piv = col;
    for (int r = col + 1; r < 6; ++r)
      if (std::abs(A[idx[r]][col]) > std::abs(A[idx[piv]][col])) piv = r;
    std::swap(idx[col], idx[piv]);
    double d = A[idx[col]][col];
    if (std::abs(d) < 1e-300) throw std::runtime_error("fit_quadratic: singular system");
    for (int r = col + 1; r < 6; ++r) {
      double m = A[idx[r]][col] / d;
      for (int j = col; j < 6; ++j) A[idx[r]][j] -= m * A[idx[col]][j];
      b[idx[r]] -= m * b[idx[col]];
    }
  }
  Quadratic2D q;
  for (int col = 5; col >= 0; --col) {
    double s = b[idx[col]];
    for (int j = col + 1; j < 6; ++j) s -= A[idx[col]][j] * q.c[j];
    q.c[col] = s / A[idx[col]][col];
  }
  return q;
}

double conjugate_gradient(const std::function<void(const std::vector<double>&, std::vector<double>&)>& apply,
                          const std::vector<double>& rhs, std::vector<double>& x,
                          int max_iters, double tol) {
  const size_t n = rhs.size();
  x.assign(n, 0.0);
  std::vector<double> r = rhs, p = rhs, Ap(n);
  double rr = 0.0, bb = 0.0;
  for (size_t i = 0; i < n; ++i) {
    rr += r[i] * r[i];
    bb += rhs[i] * rhs[i];
  }
  if (bb == 0.0) return 0.0;
  for (int it = 0; it < max_iters; ++it) {
    apply(p, Ap);
    double pAp = 0.0;
    for (size_t i = 0; i < n; ++i) pAp += p[i] * Ap[i];
    if (pAp <= 0.0) break;
    double alpha = rr / pAp;
    double rr_new = 0.0;
    for (size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * Ap[i];
      rr_new += r[i] * r[i];
    }
    if (rr_new <= tol * tol * bb) {
      rr = rr_new;
      break;
    }
    double beta = rr_new / rr;
    rr = rr_new;
    for (size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
  }
  return std::sqrt(rr / bb);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace fbp::num
