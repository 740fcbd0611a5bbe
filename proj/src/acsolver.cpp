#include "fbp/acsolver.hpp"

#include <algorithm>
#include <cmath>

#include "fbp/geometry.hpp"
#include "fbp/numerics.hpp"

namespace fbp::acsolver {

BoundaryData boundary_from_family(const solutions::AnalyticSolution& sol,
                                  const solutions::Window& window, double h) {
  GridField shape;
  shape.origin = Complex(window.x0, window.y0);
  shape.h = h;
  shape.nx = static_cast<int>(std::floor((window.x1 - window.x0) / h + 1e-9)) + 1;
  shape.ny = static_cast<int>(std::floor((window.y1 - window.y0) / h + 1e-9)) + 1;
  BoundaryData bd;
  for (int j = 0; j < shape.ny; ++j)
    for (int i = 0; i < shape.nx; ++i) {
      if (i != 0 && i != shape.nx - 1 && j != 0 && j != shape.ny - 1) continue;
      bd.values.emplace_back(shape.index(i, j), solutions::eval(sol, shape.node(i, j)));
    }
  return bd;
}

namespace {

struct Grid {
  int nx, ny;
  double h;
  std::vector<char> fixed;

  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
};

double energy(const Grid& g, const std::vector<double>& u, double eps) {
  double e = 0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      std::size_t k = g.idx(i, j);
      if (i + 1 < g.nx) {
        double d = u[g.idx(i + 1, j)] - u[k];
        e += d * d;
      }
      if (j + 1 < g.ny) {
        double d = u[g.idx(i, j + 1)] - u[k];
        e += d * d;
      }
      e += g.h * g.h * std::min(u[k] / eps, 1.0);
    }
  return e;
}

void gradient(const Grid& g, const std::vector<double>& u, double eps, std::vector<double>& out) {
  out.assign(u.size(), 0.0);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      std::size_t k = g.idx(i, j);
      double acc = 0;
      if (i + 1 < g.nx) acc += 2 * (u[k] - u[g.idx(i + 1, j)]);
      if (i > 0) acc += 2 * (u[k] - u[g.idx(i - 1, j)]);
      if (j + 1 < g.ny) acc += 2 * (u[k] - u[g.idx(i, j + 1)]);
      if (j > 0) acc += 2 * (u[k] - u[g.idx(i, j - 1)]);
      if (u[k] < eps) acc += g.h * g.h / eps;
      out[k] = g.fixed[k] ? 0.0 : acc;
    }
}

}  // namespace

MinimizeResult minimize(const solutions::Window& window, double h, const BoundaryData& boundary,
                        const SolverParams& params) {
  if (!(h > 0) || window.empty()) throw std::invalid_argument("minimize: bad grid shape");
  Grid g;
  g.nx = static_cast<int>(std::floor((window.x1 - window.x0) / h + 1e-9)) + 1;
  g.ny = static_cast<int>(std::floor((window.y1 - window.y0) / h + 1e-9)) + 1;
  g.h = h;
  g.fixed.assign(static_cast<std::size_t>(g.nx) * g.ny, 0);

  std::vector<double> u(g.fixed.size(), 0.0);
  for (auto [k, v] : boundary.values) {
    if (k >= u.size()) throw std::invalid_argument("minimize: boundary index out of range");
    if (!(v >= 0) || !std::isfinite(v))
      throw std::invalid_argument("minimize: boundary data must be nonnegative and bounded");
    u[k] = v;
    g.fixed[k] = 1;
  }
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if ((i == 0 || i == g.nx - 1 || j == 0 || j == g.ny - 1) && !g.fixed[g.idx(i, j)])
        throw std::invalid_argument("minimize: boundary data must cover the window frame");

  double eps = params.epsilon_relax > 0 ? params.epsilon_relax : 2 * h;
  if (eps < h) throw std::invalid_argument("minimize: epsilon_relax must be >= h");

  // Harmonic-extension initialization (one linear solve).
  {
    std::vector<std::size_t> free_nodes;
    std::vector<int> slot(u.size(), -1);
    for (std::size_t k = 0; k < u.size(); ++k)
      if (!g.fixed[k]) {
        slot[k] = static_cast<int>(free_nodes.size());
        free_nodes.push_back(k);
      }
    std::vector<double> rhs(free_nodes.size(), 0.0), x0;
    auto neighbor = [&](std::size_t k, int d) -> long long {
      int i = static_cast<int>(k % g.nx), j = static_cast<int>(k / g.nx);
      const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
      int ni = i + di[d], nj = j + dj[d];
      if (ni < 0 || ni >= g.nx || nj < 0 || nj >= g.ny) return -1;
      return static_cast<long long>(g.idx(ni, nj));
    };
    for (std::size_t m = 0; m < free_nodes.size(); ++m)
      for (int d = 0; d < 4; ++d) {
        long long nk = neighbor(free_nodes[m], d);
        if (nk >= 0 && g.fixed[nk]) rhs[m] += u[nk];
      }
    auto apply = [&](const std::vector<double>& x, std::vector<double>& out) {
      for (std::size_t m = 0; m < free_nodes.size(); ++m) {
        double acc = 4 * x[m];
        for (int d = 0; d < 4; ++d) {
          long long nk = neighbor(free_nodes[m], d);
          if (nk >= 0 && !g.fixed[nk]) acc -= x[slot[nk]];
        }
        out[m] = acc;
      }
    };
    num::conjugate_gradient(apply, rhs, x0, 4 * (g.nx + g.ny), 1e-10);
    for (std::size_t m = 0; m < free_nodes.size(); ++m)
      u[free_nodes[m]] = std::max(x0[m], 0.0);
  }

  MinimizeResult res;
  double e = energy(g, u, eps);
  res.energy_trace.push_back(e);
  std::vector<double> grad_v, grad_prev, u_prev, trial(u.size());
  gradient(g, u, eps, grad_v);
  double step = params.step.init;
  const double scale = g.h * g.h * g.nx * g.ny;

  for (res.iters = 0; res.iters < params.max_iters; ++res.iters) {
    // Projected-gradient stationarity measure.
    double pg = 0;
    for (std::size_t k = 0; k < u.size(); ++k) {
      double moved = std::max(u[k] - grad_v[k], 0.0) - u[k];
      pg += moved * moved;
    }
    res.final_grad_norm = std::sqrt(pg / scale);
    if (res.final_grad_norm <= params.descent_tol) {
      res.converged = true;
      break;
    }

    double t = step;
    double e_new = 0;
    int bt = 0;
    for (; bt < params.step.max_backtrack; ++bt) {
      for (std::size_t k = 0; k < u.size(); ++k)
        trial[k] = g.fixed[k] ? u[k] : std::max(u[k] - t * grad_v[k], 0.0);
      e_new = energy(g, trial, eps);
      if (e_new <= e + 1e-12 * std::abs(e)) break;
      t *= params.step.shrink;
    }
    if (bt == params.step.max_backtrack)
      throw solver_error("minimize: energy increase persists after backtracking, trace tail e=" +
                         num::format_double(e) + " e_new=" + num::format_double(e_new));

    u_prev = u;
    grad_prev = grad_v;
    u = trial;
    e = e_new;
    res.energy_trace.push_back(e);
    gradient(g, u, eps, grad_v);

    // BB1 step from the accepted move.
    double sy = 0, ss = 0;
    for (std::size_t k = 0; k < u.size(); ++k) {
      double s = u[k] - u_prev[k];
      double y = grad_v[k] - grad_prev[k];
      ss += s * s;
      sy += s * y;
    }
    step = (sy > 1e-300) ? std::clamp(ss / sy, 1e-6, 1e3) : params.step.init;
  }

  res.field.origin = Complex(window.x0, window.y0);
  res.field.h = h;
  res.field.nx = g.nx;
  res.field.ny = g.ny;
  res.field.values = std::move(u);
  res.field.provenance = "acsolver eps=" + num::format_double(eps) +
                         " h=" + num::format_double(h) +
                         (res.converged ? "" : " (max_iters reached)");
  return res;
}

FbcStats verify_fbc(const GridField& field, double probe_offset, double baseline) {
  field.check_shape();
  const double h = field.h;
  const double t0 = probe_offset > 0 ? probe_offset : 2 * h;
  const double len = baseline > 0 ? baseline : 2 * h;
  const double L = geometry::contour_level(field);
  FbcStats stats;
  double sum = 0;
  for (const auto& raw : geometry::trace_free_boundary(field)) {
    // Smooth the normal direction over a few cells of arc length.
    const auto strand = geometry::resample(raw, std::max(4 * h, len / 4));
    FbcStrandStats ss;
    double ssum = 0;
    const auto& p = strand.points;
    for (size_t k = 1; k + 1 < p.size(); ++k) {
      Complex tan = p[k + 1] - p[k - 1];
      double tn = std::abs(tan);
      if (tn == 0) continue;
      Complex nu = Complex(0, 1) * tan / tn;
      if (field.bilinear(p[k] + 2 * h * nu) < field.bilinear(p[k] - 2 * h * nu)) nu = -nu;
      Complex q1 = p[k] + t0 * nu, q2 = p[k] + (t0 + len) * nu;
      if (!field.contains(q1, h) || !field.contains(q2, h)) continue;
      double u1 = field.bilinear(q1), u2 = field.bilinear(q2);
      if (u1 <= L || u2 <= L) continue;
      double defect = std::abs((u2 - u1) / len - 1.0);
      ss.max = std::max(ss.max, defect);
      ssum += defect;
      ++ss.count;
    }
    if (ss.count) ss.mean = ssum / ss.count;
    stats.max = std::max(stats.max, ss.max);
    sum += ssum;
    stats.count += ss.count;
    stats.per_strand.push_back(ss);
  }
  if (stats.count) stats.mean = sum / stats.count;
  return stats;
}

double discrete_energy(const GridField& field, double epsilon_relax) {
  field.check_shape();
  if (!(epsilon_relax > 0)) throw std::invalid_argument("discrete_energy: eps must be > 0");
  Grid g;
  g.nx = field.nx;
  g.ny = field.ny;
  g.h = field.h;
  g.fixed.assign(field.values.size(), 0);
  return energy(g, field.values, epsilon_relax);
}

RegularityReport regularity_diagnostics(const GridField& field, const Complex* fb_point) {
  field.check_shape();
  RegularityReport rep;

  Complex center = field.origin + 0.5 * Complex(field.width(), field.height());
  double half_x = field.width() / 4, half_y = field.height() / 4;
  for (int j = 1; j + 1 < field.ny; ++j)
    for (int i = 1; i + 1 < field.nx; ++i) {
      Complex z = field.node(i, j);
      if (std::abs(z.real() - center.real()) > half_x ||
          std::abs(z.imag() - center.imag()) > half_y)
        continue;
      rep.sup_grad_half_window = std::max(rep.sup_grad_half_window, std::abs(field.grad_node(i, j)));
    }

  if (fb_point) {
    rep.fb_point = *fb_point;
  } else {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : geometry::trace_free_boundary(field))
      for (Complex p : s.points) {
        double d = std::abs(p - center);
        if (d < best) {
          best = d;
          rep.fb_point = p;
        }
      }
    if (!std::isfinite(best)) throw std::domain_error("regularity_diagnostics: no free boundary");
  }

  double rmax = std::min({rep.fb_point.real() - field.origin.real(),
                          field.origin.real() + field.width() - rep.fb_point.real(),
                          rep.fb_point.imag() - field.origin.imag(),
                          field.origin.imag() + field.height() - rep.fb_point.imag()});
  rep.min_profile = std::numeric_limits<double>::infinity();
  const int n_radii = 10;
  for (int m = 0; m < n_radii; ++m) {
    double r = 4 * field.h * std::pow(rmax / (4 * field.h), static_cast<double>(m) / (n_radii - 1));
    if (r > rmax) break;
    double sup = 0;
    int span = static_cast<int>(std::ceil(r / field.h)) + 1;
    int ci = static_cast<int>(std::lround((rep.fb_point.real() - field.origin.real()) / field.h));
    int cj = static_cast<int>(std::lround((rep.fb_point.imag() - field.origin.imag()) / field.h));
    for (int j = std::max(0, cj - span); j <= std::min(field.ny - 1, cj + span); ++j)
      for (int i = std::max(0, ci - span); i <= std::min(field.nx - 1, ci + span); ++i)
        if (std::abs(field.node(i, j) - rep.fb_point) <= r) sup = std::max(sup, field.at(i, j));
    rep.profile.emplace_back(r, sup / r);
    rep.min_profile = std::min(rep.min_profile, sup / r);
  }
  return rep;
}

}  // namespace fbp::acsolver
