#include "fbp/traizet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>

#include "fbp/geometry.hpp"
#include "fbp/numerics.hpp"

namespace fbp::traizet {

using solutions::AnalyticSolution;
using solutions::HalfPlane;
using solutions::Hairpin;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

WeierstrassData weierstrass_data(const AnalyticSolution& sol) {
  WeierstrassData d;
  if (std::holds_alternative<HalfPlane>(sol.family)) {
    RigidMotion m = sol.motion;
    Complex rot_in = std::conj(m.rotor());
    d.u = [sol](Complex z) { return solutions::eval(sol, z); };
    d.in_domain = [m](Complex z) { return m.undo(z).imag() > 0; };
    d.g = [rot_in](Complex) { return rot_in * Complex(0, -1); };
    d.dg = [](Complex) { return Complex(0, 0); };
    return d;
  }
  if (auto* hp = std::get_if<Hairpin>(&sol.family)) {
    double a = hp->a;
    RigidMotion m = sol.motion;
    Complex rot_in = std::conj(m.rotor());
    d.u = [sol](Complex z) { return solutions::eval(sol, z); };
    d.in_domain = [m, a](Complex z) { return solutions::hairpin_margin(a, m.undo(z)) > 0; };
    d.g = [m, a, rot_in](Complex z) {
      return rot_in * solutions::hairpin_Vp(m.undo(z) / a);
    };
    d.dg = [m, a, rot_in](Complex z) {
      return rot_in * rot_in * solutions::hairpin_Vpp(m.undo(z) / a) / a;
    };
    return d;
  }
  throw std::invalid_argument(
      "weierstrass_data: unsupported family (extension is per-component for wedge/two-plane)");
}

namespace {

struct Lattice {
  Complex origin;
  double step;
  int nx, ny;
  std::vector<int> slot;  // -1 outside domain
  std::vector<std::size_t> nodes;

  Complex at(std::size_t k) const {
    int i = static_cast<int>(k % nx), j = static_cast<int>(k / nx);
    return origin + Complex(i * step, j * step);
  }
};

std::array<Complex, 3> omega(const WeierstrassData& d, Complex z) {
  Complex g = d.g(z);
  return {0.5 * (1.0 - g * g), Complex(0, 0.5) * (1.0 + g * g), g};
}

std::array<Complex, 3> edge_increment(const WeierstrassData& d, Complex za, Complex zb) {
  const auto& gl = num::gauss_legendre(3);
  std::array<Complex, 3> acc{Complex(0, 0), Complex(0, 0), Complex(0, 0)};
  Complex mid = 0.5 * (za + zb), half = 0.5 * (zb - za);
  for (int q = 0; q < 3; ++q) {
    auto w = omega(d, mid + gl.x[q] * half);
    for (int c = 0; c < 3; ++c) acc[c] += gl.w[q] * w[c];
  }
  for (int c = 0; c < 3; ++c) acc[c] *= half;
  return acc;
}

}  // namespace

SurfaceMesh immerse(const WeierstrassData& data, const solutions::Window& window, double step,
                    Complex basepoint) {
  if (!(step > 0) || window.empty()) throw std::invalid_argument("immerse: bad lattice");
  Lattice lat;
  lat.origin = Complex(window.x0, window.y0);
  lat.step = step;
  lat.nx = static_cast<int>(std::floor((window.x1 - window.x0) / step + 1e-9)) + 1;
  lat.ny = static_cast<int>(std::floor((window.y1 - window.y0) / step + 1e-9)) + 1;
  lat.slot.assign(static_cast<std::size_t>(lat.nx) * lat.ny, -1);
  for (int j = 0; j < lat.ny; ++j)
    for (int i = 0; i < lat.nx; ++i) {
      std::size_t k = static_cast<std::size_t>(j) * lat.nx + i;
      if (data.in_domain(lat.at(k))) {
        lat.slot[k] = static_cast<int>(lat.nodes.size());
        lat.nodes.push_back(k);
      }
    }
  const std::size_t n = lat.nodes.size();
  if (n < 4) throw std::invalid_argument("immerse: domain lattice is empty");

  // Nearest in-domain node to the basepoint.
  int b_slot = -1;
  {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < n; ++m) {
      double dd = std::abs(lat.at(lat.nodes[m]) - basepoint);
      if (dd < best) {
        best = dd;
        b_slot = static_cast<int>(m);
      }
    }
    if (best > 2 * step) throw std::invalid_argument("immerse: basepoint not among domain nodes");
  }

  struct Edge {
    int a, b;
    std::array<Complex, 3> d;
  };
  std::vector<Edge> edges;
  for (std::size_t m = 0; m < n; ++m) {
    std::size_t k = lat.nodes[m];
    int i = static_cast<int>(k % lat.nx), j = static_cast<int>(k / lat.nx);
    auto try_edge = [&](int ni, int nj) {
      if (ni >= lat.nx || nj >= lat.ny) return;
      std::size_t nk = static_cast<std::size_t>(nj) * lat.nx + ni;
      if (lat.slot[nk] < 0) return;
      edges.push_back({static_cast<int>(m), lat.slot[nk],
                       edge_increment(data, lat.at(k), lat.at(nk))});
    };
    try_edge(i + 1, j);
    try_edge(i, j + 1);
  }

  // Spanning tree integration of the three complex potentials.
  std::vector<std::array<Complex, 3>> F(n, {Complex(0, 0), Complex(0, 0), Complex(0, 0)});
  {
    std::vector<std::vector<std::pair<int, int>>> adj(n);  // (neighbor, +-edge)
    for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
      adj[edges[e].a].push_back({edges[e].b, e + 1});
      adj[edges[e].b].push_back({edges[e].a, -(e + 1)});
    }
    std::vector<char> seen(n, 0);
    std::queue<int> bfs;
    bfs.push(b_slot);
    seen[b_slot] = 1;
    while (!bfs.empty()) {
      int cur = bfs.front();
      bfs.pop();
      for (auto [nb, se] : adj[cur]) {
        if (seen[nb]) continue;
        seen[nb] = 1;
        const Edge& e = edges[std::abs(se) - 1];
        for (int c = 0; c < 3; ++c) F[nb][c] = F[cur][c] + (se > 0 ? e.d[c] : -e.d[c]);
        bfs.push(nb);
      }
    }
  }

  // Loop-closure least squares per potential (re and im independently).
  SurfaceMesh mesh;
  {
    auto apply = [&](const std::vector<double>& x, std::vector<double>& out) {
      std::fill(out.begin(), out.end(), 0.0);
      for (const auto& e : edges) {
        double diff = x[e.a] - x[e.b];
        out[e.a] += diff;
        out[e.b] -= diff;
      }
    };
    for (int c = 0; c < 3; ++c) {
      for (int part = 0; part < 2; ++part) {
        std::vector<double> rhs(n, 0.0), cur(n);
        for (const auto& e : edges) {
          double d = part == 0 ? e.d[c].real() : e.d[c].imag();
          rhs[e.a] -= d;
          rhs[e.b] += d;
        }
        for (std::size_t m = 0; m < n; ++m)
          cur[m] = part == 0 ? F[m][c].real() : F[m][c].imag();
        std::vector<double> resid(n);
        apply(cur, resid);
        for (std::size_t m = 0; m < n; ++m) resid[m] = rhs[m] - resid[m];
        std::vector<double> corr;
        num::conjugate_gradient(apply, resid, corr, 6000, 1e-12);
        for (std::size_t m = 0; m < n; ++m) {
          double val = cur[m] + corr[m];
          if (part == 0)
            F[m][c] = Complex(val, F[m][c].imag());
          else
            F[m][c] = Complex(F[m][c].real(), val);
        }
      }
    }
  }

  // Max elementary-loop defect of the raw increments (quadrature residual).
  {
    std::vector<std::array<Complex, 3>> inc(static_cast<std::size_t>(lat.nx) * lat.ny * 2,
                                            {Complex(kNaN, kNaN), Complex(kNaN, kNaN),
                                             Complex(kNaN, kNaN)});
    auto eid = [&](std::size_t k, bool vertical) { return 2 * k + (vertical ? 1 : 0); };
    for (const auto& e : edges) {
      std::size_t ka = lat.nodes[e.a], kb = lat.nodes[e.b];
      bool vertical = kb == ka + static_cast<std::size_t>(lat.nx);
      inc[eid(ka, vertical)] = e.d;
    }
    double worst = 0;
    for (int j = 0; j + 1 < lat.ny; ++j)
      for (int i = 0; i + 1 < lat.nx; ++i) {
        std::size_t k = static_cast<std::size_t>(j) * lat.nx + i;
        const auto& B = inc[eid(k, false)];
        const auto& R = inc[eid(k + 1, true)];
        const auto& T = inc[eid(k + lat.nx, false)];
        const auto& Lf = inc[eid(k, true)];
        if (!finite(B[0]) || !finite(R[0]) || !finite(T[0]) || !finite(Lf[0])) continue;
        for (int c = 0; c < 3; ++c)
          worst = std::max(worst, std::abs(B[c] + R[c] - T[c] - Lf[c]));
      }
    mesh.loop_residual = worst;
  }

  double u0 = data.u(lat.at(lat.nodes[b_slot]));
  mesh.vertices.resize(n);
  mesh.gauss_curvature.resize(n);
  mesh.metric_factor.resize(n);
  mesh.domain_z.resize(n);
  for (std::size_t m = 0; m < n; ++m) {
    Complex z = lat.at(lat.nodes[m]);
    mesh.domain_z[m] = z;
    mesh.vertices[m] = {F[m][0].real() - F[b_slot][0].real(),
                        F[m][1].real() - F[b_slot][1].real(),
                        F[m][2].real() - F[b_slot][2].real() + u0};
    Complex g = data.g(z), dg = data.dg(z);
    double den = 1.0 + std::norm(g);
    mesh.gauss_curvature[m] = -16.0 * std::norm(dg) / (den * den * den * den);
    mesh.metric_factor[m] = 0.5 * den;
  }
  mesh.basepoint_index = b_slot;
  mesh.basepoint_height = u0;

  for (int j = 0; j + 1 < lat.ny; ++j)
    for (int i = 0; i + 1 < lat.nx; ++i) {
      int s00 = lat.slot[static_cast<std::size_t>(j) * lat.nx + i];
      int s10 = lat.slot[static_cast<std::size_t>(j) * lat.nx + i + 1];
      int s01 = lat.slot[static_cast<std::size_t>(j + 1) * lat.nx + i];
      int s11 = lat.slot[static_cast<std::size_t>(j + 1) * lat.nx + i + 1];
      if (s00 < 0 || s10 < 0 || s01 < 0 || s11 < 0) continue;
      mesh.faces.push_back({s00, s10, s11});
      mesh.faces.push_back({s00, s11, s01});
    }

  // Boundary (X3 = 0) polylines: trace u on the lattice and push each contour
  // point through a one-segment integration from the nearest lattice node.
  {
    GridField uf;
    uf.origin = lat.origin;
    uf.h = step;
    uf.nx = lat.nx;
    uf.ny = lat.ny;
    uf.values.resize(static_cast<std::size_t>(lat.nx) * lat.ny);
    for (int j = 0; j < lat.ny; ++j)
      for (int i = 0; i < lat.nx; ++i) {
        std::size_t k = static_cast<std::size_t>(j) * lat.nx + i;
        uf.values[k] = std::max(data.u(lat.at(k)), 0.0);
      }
    for (const auto& strand : geometry::trace_free_boundary(uf)) {
      std::vector<Vec3> poly;
      for (Complex p : strand.points) {
        int pi = std::clamp(static_cast<int>(std::lround((p.real() - lat.origin.real()) / step)),
                            0, lat.nx - 1);
        int pj = std::clamp(static_cast<int>(std::lround((p.imag() - lat.origin.imag()) / step)),
                            0, lat.ny - 1);
        int best = -1;
        double bd = std::numeric_limits<double>::infinity();
        for (int dj = -2; dj <= 2; ++dj)
          for (int di = -2; di <= 2; ++di) {
            int ni = pi + di, nj = pj + dj;
            if (ni < 0 || ni >= lat.nx || nj < 0 || nj >= lat.ny) continue;
            std::size_t nk = static_cast<std::size_t>(nj) * lat.nx + ni;
            if (lat.slot[nk] < 0) continue;
            double d = std::abs(lat.at(nk) - p);
            if (d < bd) {
              bd = d;
              best = lat.slot[nk];
            }
          }
        if (best < 0) continue;
        auto dF = edge_increment(data, lat.at(lat.nodes[best]), p);
        const auto& v = mesh.vertices[best];
        poly.push_back({v[0] + dF[0].real(), v[1] + dF[1].real(), v[2] + dF[2].real()});
      }
      if (poly.size() >= 2) mesh.boundary.push_back(std::move(poly));
    }
  }
  return mesh;
}

void canonical_align(SurfaceMesh& mesh) {
  if (mesh.basepoint_index < 0) throw std::invalid_argument("canonical_align: no basepoint");
  const Vec3& b = mesh.vertices[mesh.basepoint_index];
  double tx = b[0], ty = b[1];
  auto translate = [&](Vec3& v) {
    v[0] -= tx;
    v[1] -= ty;
  };
  for (auto& v : mesh.vertices) translate(v);
  for (auto& poly : mesh.boundary)
    for (auto& v : poly) translate(v);

  if (mesh.boundary.size() >= 2) {
    // Tips: closest pair between the two longest boundary polylines.
    std::vector<std::size_t> order(mesh.boundary.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) {
      return mesh.boundary[a].size() > mesh.boundary[c].size();
    });
    const auto& A = mesh.boundary[order[0]];
    const auto& B = mesh.boundary[order[1]];
    double best = std::numeric_limits<double>::infinity();
    Vec3 pa{}, pb{};
    for (const auto& p : A)
      for (const auto& q : B) {
        double d = (p[0] - q[0]) * (p[0] - q[0]) + (p[1] - q[1]) * (p[1] - q[1]) +
                   (p[2] - q[2]) * (p[2] - q[2]);
        if (d < best) {
          best = d;
          pa = p;
          pb = q;
        }
      }
    double sx = pb[0] - pa[0], sy = pb[1] - pa[1];
    // Axis is perpendicular to the tip segment within the symmetry plane.
    double axx = -sy, axy = sx;
    double nrm = std::hypot(axx, axy);
    if (nrm > 0) {
      double ca = axx / nrm, sa = axy / nrm;
      auto rotate = [&](Vec3& v) {
        double x = ca * v[0] + sa * v[1];
        double y = -sa * v[0] + ca * v[1];
        v[0] = x;
        v[1] = y;
      };
      for (auto& v : mesh.vertices) rotate(v);
      for (auto& poly : mesh.boundary)
        for (auto& v : poly) rotate(v);
    }
  }
}

double catenoid_residual(const SurfaceMesh& mesh, double rho) {
  if (!(rho > 0)) throw std::invalid_argument("catenoid_residual: rho must be > 0");
  double worst = 0;
  for (const auto& v : mesh.vertices) {
    double lhs = (v[1] / rho) * (v[1] / rho) + (v[2] / rho) * (v[2] / rho);
    double rhs = std::cosh(v[0] / rho);
    worst = std::max(worst, std::abs(lhs - rhs * rhs));
  }
  return worst;
}

double fit_rho(const SurfaceMesh& mesh) {
  double seed = mesh.basepoint_height;
  if (!(seed > 0)) throw fit_error("fit_rho: nonpositive neck-top height");
  const int n = 33;
  std::vector<double> rhos(n), res(n);
  for (int k = 0; k < n; ++k) {
    rhos[k] = seed * std::pow(4.0, (k - (n - 1) / 2.0) / ((n - 1) / 2.0));
    res[k] = catenoid_residual(mesh, rhos[k]);
  }
  int best = static_cast<int>(std::min_element(res.begin(), res.end()) - res.begin());
  if (best == 0 || best == n - 1)
    throw fit_error("fit_rho: no interior bracket around rho=" + num::format_double(rhos[best]));
  return num::golden_min([&](double r) { return catenoid_residual(mesh, r); }, rhos[best - 1],
                         rhos[best + 1], 80);
}

std::vector<double> gauss_curvature(const WeierstrassData& data,
                                    const std::vector<Complex>& nodes) {
  std::vector<double> out;
  out.reserve(nodes.size());
  for (Complex z : nodes) {
    double den = 1.0 + std::norm(data.g(z));
    out.push_back(-16.0 * std::norm(data.dg(z)) / (den * den * den * den));
  }
  return out;
}

DefectProfile curvature_compare_3d(const WeierstrassData& data, double rho,
                                   const std::vector<Complex>& nodes) {
  if (!(rho > 0)) throw std::invalid_argument("curvature_compare_3d: rho must be > 0");
  DefectProfile prof;
  prof.rho = rho;
  prof.epsilon = 2 * kPi * rho;

  struct Item {
    double r;
    double kd;
    double md;
  };
  std::vector<Item> items;
  double rmax = 0;
  for (Complex z : nodes) {
    if (!data.in_domain(z)) continue;
    Complex zeta = solutions::phi_inv(z / rho).zeta;
    double y1 = zeta.real(), y2 = zeta.imag();
    Vec3 x = {-rho * std::cosh(y1) * std::sin(y2), -rho * y1, rho * std::cosh(y1) * std::cos(y2)};
    double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    double sech = 1.0 / std::cosh(y1);
    double k_model = -sech * sech * sech * sech / (rho * rho);
    double lam_model = 0.5 * (1.0 + std::norm(solutions::hairpin_Vp(z / rho)));
    double den = 1.0 + std::norm(data.g(z));
    double k_data = -16.0 * std::norm(data.dg(z)) / (den * den * den * den);
    double lam_data = 0.5 * den;
    items.push_back({r, std::abs(k_data - k_model), std::abs(lam_data / lam_model - 1.0)});
    rmax = std::max(rmax, r);
  }
  if (items.empty()) return prof;

  const int nbins = 12;
  double r_lo = rho / 2;
  for (int b = 0; b < nbins; ++b) {
    DefectBin bin;
    bin.r_lo = b == 0 ? 0.0 : r_lo * std::pow(rmax / r_lo, static_cast<double>(b) / nbins);
    bin.r_hi = r_lo * std::pow(rmax / r_lo, static_cast<double>(b + 1) / nbins);
    double rmid = std::max(bin.r_hi, 1e-12);
    bin.bound = rmid <= std::sqrt(prof.epsilon) ? prof.epsilon / (rmid * rmid) / 100.0 : 0.01;
    prof.bins.push_back(bin);
  }
  for (const auto& it : items) {
    for (auto& bin : prof.bins)
      if (it.r >= bin.r_lo && it.r <= bin.r_hi) {
        ++bin.count;
        bin.k_defect = std::max(bin.k_defect, it.kd);
        bin.metric_defect = std::max(bin.metric_defect, it.md);
        break;
      }
  }
  return prof;
}

std::vector<double> mean_curvature(const SurfaceMesh& mesh) {
  const std::size_t n = mesh.vertices.size();
  std::vector<double> area(n, 0.0);
  std::vector<Vec3> lap(n, {0, 0, 0});
  std::vector<int> edge_faces;  // boundary detection via open edges

  auto sub = [](const Vec3& a, const Vec3& b) { return Vec3{a[0] - b[0], a[1] - b[1], a[2] - b[2]}; };
  auto dot = [](const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; };
  auto cross_norm = [](const Vec3& a, const Vec3& b) {
    double cx = a[1] * b[2] - a[2] * b[1];
    double cy = a[2] * b[0] - a[0] * b[2];
    double cz = a[0] * b[1] - a[1] * b[0];
    return std::sqrt(cx * cx + cy * cy + cz * cz);
  };

  std::vector<char> boundary_vertex(n, 0);
  {
    std::map<std::pair<int, int>, int> edge_count;
    for (const auto& f : mesh.faces)
      for (int e = 0; e < 3; ++e) {
        int a = f[e], b = f[(e + 1) % 3];
        if (a > b) std::swap(a, b);
        ++edge_count[{a, b}];
      }
    for (const auto& [e, c] : edge_count)
      if (c == 1) {
        boundary_vertex[e.first] = 1;
        boundary_vertex[e.second] = 1;
      }
  }

  for (const auto& f : mesh.faces) {
    const Vec3 &p0 = mesh.vertices[f[0]], &p1 = mesh.vertices[f[1]], &p2 = mesh.vertices[f[2]];
    double a2 = cross_norm(sub(p1, p0), sub(p2, p0));
    if (a2 <= 0) continue;
    for (int e = 0; e < 3; ++e) {
      int i = f[e], j = f[(e + 1) % 3], k = f[(e + 2) % 3];
      const Vec3 &pi = mesh.vertices[i], &pj = mesh.vertices[j], &pk = mesh.vertices[k];
      double cot_k = dot(sub(pi, pk), sub(pj, pk)) / cross_norm(sub(pi, pk), sub(pj, pk));
      for (int c = 0; c < 3; ++c) {
        lap[i][c] += cot_k * (pj[c] - pi[c]);
        lap[j][c] += cot_k * (pi[c] - pj[c]);
      }
      area[i] += a2 / 6.0;  // a2 is twice the area; 1/3 of area per vertex
    }
  }
  std::vector<double> out(n, kNaN);
  for (std::size_t i = 0; i < n; ++i) {
    if (boundary_vertex[i] || area[i] <= 0) continue;
    double mag = std::sqrt(lap[i][0] * lap[i][0] + lap[i][1] * lap[i][1] + lap[i][2] * lap[i][2]);
    out[i] = mag / (4.0 * area[i]);
  }
  return out;
}

double mean_interior_mean_curvature(const SurfaceMesh& mesh) {
  std::vector<double> h = mean_curvature(mesh);
  double sum = 0;
  int cnt = 0;
  for (double v : h)
    if (std::isfinite(v)) {
      sum += v;
      ++cnt;
    }
  return cnt ? sum / cnt : kNaN;
}

}  // namespace fbp::traizet
