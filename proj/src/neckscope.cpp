#include "fbp/neckscope.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "fbp/numerics.hpp"
#include "fbp/solutions.hpp"

namespace fbp::neckscope {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

std::vector<Saddle> find_saddles(const GridField& field) {
  field.check_shape();
  const double h = field.h;
  const double L = geometry::contour_level(field);
  std::vector<Saddle> out;

  auto gx = [&](int i, int j) { return (field.at(i + 1, j) - field.at(i - 1, j)) / (2 * h); };
  auto gy = [&](int i, int j) { return (field.at(i, j + 1) - field.at(i, j - 1)) / (2 * h); };

  for (int j = 3; j + 3 < field.ny; ++j) {
    for (int i = 3; i + 3 < field.nx; ++i) {
      if (field.at(i, j) <= 2 * L) continue;
      bool stencil_pos = true;
      for (int dj = -3; dj <= 3 && stencil_pos; ++dj)
        for (int di = -3; di <= 3; ++di)
          if (field.at(i + di, j + dj) <= 0) {
            stencil_pos = false;
            break;
          }
      if (!stencil_pos) continue;
      double gxl = gx(i - 1, j), gxr = gx(i + 1, j);
      double gyd = gy(i, j - 1), gyu = gy(i, j + 1);
      if (gxl * gxr > 0 || gyd * gyu > 0) continue;

      // 5x5 local quadratic fit, Newton on its gradient.
      std::vector<double> xs, ys, vs;
      for (int dj = -2; dj <= 2; ++dj)
        for (int di = -2; di <= 2; ++di) {
          xs.push_back(di * h);
          ys.push_back(dj * h);
          vs.push_back(field.at(i + di, j + dj));
        }
      num::Quadratic2D q;
      try {
        q = num::fit_quadratic(xs, ys, vs);
      } catch (const std::exception&) {
        continue;
      }
      double det = q.hxx() * q.hyy() - q.hxy() * q.hxy();
      if (!(det < 0)) continue;  // non-degenerate saddle only
      // Solve grad q = 0.
      double rx = -q.c[1], ry = -q.c[2];
      double cx = (rx * q.hyy() - q.hxy() * ry) / det;
      double cy = (q.hxx() * ry - rx * q.hxy()) / det;
      if (std::abs(cx) > 1.5 * h || std::abs(cy) > 1.5 * h) continue;
      Complex z0 = field.node(i, j) + Complex(cx, cy);
      double a0 = q.value(cx, cy);
      if (!(a0 > 0)) continue;
      bool dup = false;
      for (const auto& s : out)
        if (std::abs(s.z0 - z0) < 4 * h) dup = true;
      if (!dup) out.push_back({z0, a0});
    }
  }
  return out;
}

Proximity hairpin_proximity(const GridField& field, Complex z0, double a0, double epsilon) {
  field.check_shape();
  if (!(a0 > 0) || !(epsilon > 0)) throw std::invalid_argument("hairpin_proximity: bad arguments");
  const double R = 2 * a0 / epsilon;
  if (!field.contains(z0 + Complex(R, R)) || !field.contains(z0 - Complex(R, R)))
    throw std::domain_error("hairpin_proximity: probe ball exits the window");

  std::vector<Complex> offs;
  std::vector<double> uvals;
  int span = static_cast<int>(std::ceil(R / field.h));
  int ci = static_cast<int>(std::lround((z0.real() - field.origin.real()) / field.h));
  int cj = static_cast<int>(std::lround((z0.imag() - field.origin.imag()) / field.h));
  for (int j = cj - span; j <= cj + span; ++j)
    for (int i = ci - span; i <= ci + span; ++i) {
      if (!field.in_grid(i, j)) continue;
      Complex x = field.node(i, j) - z0;
      if (std::abs(x) > R) continue;
      offs.push_back(x);
      uvals.push_back(field.at(i, j));
    }

  size_t stride = std::max<size_t>(1, offs.size() / 1500);
  auto delta_of = [&](double theta, size_t step) {
    solutions::AnalyticSolution model(solutions::Hairpin{a0}, RigidMotion(theta, {0, 0}));
    double worst = 0;
    for (size_t k = 0; k < offs.size(); k += step)
      worst = std::max(worst, std::abs(uvals[k] - solutions::eval(model, offs[k])));
    return worst / a0;
  };
  double theta = num::periodic_min([&](double t) { return delta_of(t, stride); }, 64, 40);
  theta = num::golden_min([&](double t) { return delta_of(t, 1); }, theta - 0.05, theta + 0.05, 40);
  return {delta_of(theta, 1), RigidMotion(theta, {0, 0})};
}

namespace {

struct NodeSet {
  const GridField* f;
  std::vector<int> slot;       // -1 when not in the component
  std::vector<std::size_t> nodes;
};

// Positive-phase component of the basepoint (u > 0 nodes).
NodeSet component_of(const GridField& field, Complex basepoint) {
  NodeSet set;
  set.f = &field;
  set.slot.assign(field.values.size(), -1);
  int bi = static_cast<int>(std::lround((basepoint.real() - field.origin.real()) / field.h));
  int bj = static_cast<int>(std::lround((basepoint.imag() - field.origin.imag()) / field.h));
  bi = std::clamp(bi, 0, field.nx - 1);
  bj = std::clamp(bj, 0, field.ny - 1);
  // Allow a basepoint on the closure: snap to the nearest positive node.
  std::size_t start = field.index(bi, bj);
  if (field.values[start] <= 0) {
    double best = std::numeric_limits<double>::infinity();
    for (int dj = -2; dj <= 2; ++dj)
      for (int di = -2; di <= 2; ++di) {
        int ni = bi + di, nj = bj + dj;
        if (!field.in_grid(ni, nj) || field.at(ni, nj) <= 0) continue;
        double d = std::abs(field.node(ni, nj) - basepoint);
        if (d < best) {
          best = d;
          start = field.index(ni, nj);
        }
      }
    if (!std::isfinite(best))
      throw std::domain_error("harmonic_conjugate: basepoint not in the closed positive phase");
  }
  std::queue<std::size_t> bfs;
  bfs.push(start);
  set.slot[start] = 0;
  set.nodes.push_back(start);
  while (!bfs.empty()) {
    std::size_t cur = bfs.front();
    bfs.pop();
    int i = static_cast<int>(cur % field.nx), j = static_cast<int>(cur / field.nx);
    const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
    for (int d = 0; d < 4; ++d) {
      int ni = i + di[d], nj = j + dj[d];
      if (!field.in_grid(ni, nj)) continue;
      std::size_t nid = field.index(ni, nj);
      if (field.values[nid] > 0 && set.slot[nid] < 0) {
        set.slot[nid] = static_cast<int>(set.nodes.size());
        set.nodes.push_back(nid);
        bfs.push(nid);
      }
    }
  }
  return set;
}

}  // namespace

GridField harmonic_conjugate(const GridField& field, Complex basepoint) {
  field.check_shape();
  const double h = field.h;
  NodeSet set = component_of(field, basepoint);
  const std::size_t n = set.nodes.size();
  if (n < 9) throw std::domain_error("harmonic_conjugate: positive component too small");

  auto uval = [&](int i, int j) { return field.in_grid(i, j) ? field.at(i, j) : kNaN; };

  // Edge list with Cauchy-Riemann increments at edge midpoints.
  struct Edge {
    int a, b;
    double d;
  };
  std::vector<Edge> edges;
  std::size_t n_faces = 0;
  for (std::size_t m = 0; m < n; ++m) {
    std::size_t k = set.nodes[m];
    int i = static_cast<int>(k % field.nx), j = static_cast<int>(k / field.nx);
    if (i + 1 < field.nx && set.slot[field.index(i + 1, j)] >= 0) {
      double d = -(uval(i, j + 1) + uval(i + 1, j + 1) - uval(i, j - 1) - uval(i + 1, j - 1)) / 4.0;
      if (std::isfinite(d)) edges.push_back({set.slot[k], set.slot[field.index(i + 1, j)], d});
    }
    if (j + 1 < field.ny && set.slot[field.index(i, j + 1)] >= 0) {
      double d = (uval(i + 1, j) + uval(i + 1, j + 1) - uval(i - 1, j) - uval(i - 1, j + 1)) / 4.0;
      if (std::isfinite(d)) edges.push_back({set.slot[k], set.slot[field.index(i, j + 1)], d});
    }
    if (i + 1 < field.nx && j + 1 < field.ny && set.slot[field.index(i + 1, j)] >= 0 &&
        set.slot[field.index(i, j + 1)] >= 0 && set.slot[field.index(i + 1, j + 1)] >= 0)
      ++n_faces;
  }

  // First Betti number of the component: E - V + 1 must match the face count,
  // otherwise the region has a hole and v would be multivalued.
  long long b1 = static_cast<long long>(edges.size()) - static_cast<long long>(n) + 1;
  if (b1 > static_cast<long long>(n_faces))
    throw structure_error("harmonic_conjugate: positive phase is multiply connected",
                          static_cast<int>(b1 - n_faces));

  // Spanning-tree integration for the initial guess.
  std::vector<double> v(n, 0.0);
  {
    std::vector<std::vector<std::pair<int, double>>> adj(n);
    for (const auto& e : edges) {
      adj[e.a].push_back({e.b, e.d});
      adj[e.b].push_back({e.a, -e.d});
    }
    std::vector<char> seen(n, 0);
    std::queue<int> bfs;
    bfs.push(0);
    seen[0] = 1;
    while (!bfs.empty()) {
      int cur = bfs.front();
      bfs.pop();
      for (auto [nb, d] : adj[cur])
        if (!seen[nb]) {
          seen[nb] = 1;
          v[nb] = v[cur] + d;
          bfs.push(nb);
        }
    }
  }

  // Loop-closure least squares: minimize sum (v_b - v_a - d)^2 over edges.
  {
    std::vector<double> rhs(n, 0.0);
    for (const auto& e : edges) {
      rhs[e.a] -= e.d;
      rhs[e.b] += e.d;
    }
    auto apply = [&](const std::vector<double>& x, std::vector<double>& out) {
      std::fill(out.begin(), out.end(), 0.0);
      for (const auto& e : edges) {
        double diff = x[e.a] - x[e.b];
        out[e.a] += diff;
        out[e.b] -= diff;
      }
    };
    // Warm start: shift tree potentials into the residual formulation.
    std::vector<double> resid(n, 0.0);
    apply(v, resid);
    for (std::size_t k = 0; k < n; ++k) resid[k] = rhs[k] - resid[k];
    std::vector<double> corr;
    num::conjugate_gradient(apply, resid, corr, 8000, 1e-11);
    for (std::size_t k = 0; k < n; ++k) v[k] += corr[k];
  }

  GridField out;
  out.origin = field.origin;
  out.h = h;
  out.nx = field.nx;
  out.ny = field.ny;
  out.values.assign(field.values.size(), 0.0);
  for (std::size_t m = 0; m < n; ++m) out.values[set.nodes[m]] = v[m];
  out.provenance = "harmonic_conjugate of [" + field.provenance + "]";

  double v0 = out.bilinear(basepoint);
  for (std::size_t m = 0; m < n; ++m) out.values[set.nodes[m]] -= v0;
  return out;
}

double PsiMap::side(Complex z) const {
  double best = std::numeric_limits<double>::infinity();
  double sgn = 0;
  for (size_t k = 1; k < beta.size(); ++k) {
    Complex a = beta[k - 1], b = beta[k];
    Complex ab = b - a;
    double len2 = std::norm(ab);
    if (len2 == 0) continue;
    double t = std::clamp(((z - a) * std::conj(ab)).real() / len2, 0.0, 1.0);
    Complex proj = a + t * ab;
    double d = std::abs(z - proj);
    if (d < best) {
      best = d;
      double cross = ab.real() * (z - proj).imag() - ab.imag() * (z - proj).real();
      sgn = cross >= 0 ? 1.0 : -1.0;
    }
  }
  return sgn * best;
}

Complex PsiMap::operator()(Complex z) const {
  Complex xi(u.bilinear(z), v.bilinear(z));
  Complex w = xi / a0;
  Complex zeta = std::acosh(w);
  if (side(z) < 0) zeta = -zeta;
  if (std::abs(zeta.imag()) > kPi / 2)
    zeta = Complex(zeta.real(), std::copysign(kPi / 2, zeta.imag()));
  return a0 * solutions::phi(zeta);
}

namespace {

// Steepest-descent cut through the saddle: RK4 on -grad u / |grad u| from both
// downhill directions until the zero phase (u <= level) is reached.
std::vector<Complex> descent_cut(const GridField& field, Complex saddle) {
  const double h = field.h;
  const double L = geometry::contour_level(field);
  const double step = h / 4;

  // Downhill eigature direction: quadratic fit around the saddle.
  int ci = static_cast<int>(std::lround((saddle.real() - field.origin.real()) / h));
  int cj = static_cast<int>(std::lround((saddle.imag() - field.origin.imag()) / h));
  std::vector<double> xs, ys, vs;
  for (int dj = -2; dj <= 2; ++dj)
    for (int di = -2; di <= 2; ++di) {
      if (!field.in_grid(ci + di, cj + dj)) continue;
      xs.push_back(di * h + field.node(ci, cj).real() - saddle.real());
      ys.push_back(dj * h + field.node(ci, cj).imag() - saddle.imag());
      vs.push_back(field.at(ci + di, cj + dj));
    }
  num::Quadratic2D q = num::fit_quadratic(xs, ys, vs);
  // Eigenvector of the negative eigenvalue of [hxx hxy; hxy hyy].
  double tr = q.hxx() + q.hyy();
  double det = q.hxx() * q.hyy() - q.hxy() * q.hxy();
  double lam = 0.5 * (tr - std::sqrt(std::max(tr * tr - 4 * det, 0.0)));
  Complex dir;
  if (std::abs(q.hxy()) > 1e-14)
    dir = Complex(lam - q.hyy(), q.hxy());
  else
    dir = q.hxx() < q.hyy() ? Complex(1, 0) : Complex(0, 1);
  dir /= std::abs(dir);

  auto flow = [&](Complex z) -> Complex {
    Complex g = field.grad_interp(z);
    double n = std::abs(g);
    return n > 1e-14 ? -g / n : Complex(0, 0);
  };

  std::vector<Complex> half[2];
  for (int s = 0; s < 2; ++s) {
    Complex z = saddle + (s == 0 ? -1.0 : 1.0) * 2.0 * step * dir;
    half[s].push_back(z);
    for (int it = 0; it < 100000; ++it) {
      Complex k1 = flow(z);
      Complex k2 = flow(z + 0.5 * step * k1);
      Complex k3 = flow(z + 0.5 * step * k2);
      Complex k4 = flow(z + step * k3);
      Complex dz = (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if (std::abs(dz) < 1e-14) break;
      z += dz;
      if (!field.contains(z, h)) break;
      half[s].push_back(z);
      if (field.bilinear(z) <= L) break;
    }
  }

  std::vector<Complex> beta(half[0].rbegin(), half[0].rend());
  beta.push_back(saddle);
  beta.insert(beta.end(), half[1].begin(), half[1].end());
  return beta;
}

}  // namespace

PsiBuild build_psi(const GridField& field, const GridField& v, double a0, Complex saddle,
                   double probe_radius, std::optional<double> orientation) {
  field.check_shape();
  v.check_shape();
  if (!(a0 > 0)) throw std::invalid_argument("build_psi: a0 must be > 0");
  const double h = field.h;

  PsiBuild out;
  out.map.u = field;
  out.map.v = v;
  out.map.a0 = a0;
  out.map.saddle = saddle;
  out.map.beta = descent_cut(field, saddle);
  if (out.map.beta.size() < 2) throw std::domain_error("build_psi: failed to build the cut");

  // Orient beta along the hairpin axis so the + branch maps north of the cut.
  double axis;
  if (orientation) {
    axis = *orientation;
  } else {
    Complex span = out.map.beta.back() - out.map.beta.front();
    axis = std::atan2(span.imag(), span.real());
  }
  Complex dir = std::polar(1.0, axis);
  if (((out.map.beta.back() - out.map.beta.front()) * std::conj(dir)).real() < 0)
    std::reverse(out.map.beta.begin(), out.map.beta.end());

  if (!(probe_radius > 0)) {
    probe_radius = std::min({saddle.real() - field.origin.real(),
                             field.origin.real() + field.width() - saddle.real(),
                             saddle.imag() - field.origin.imag(),
                             field.origin.imag() + field.height() - saddle.imag()}) -
                   3 * h;
  }
  out.sample.saddle = saddle;
  out.sample.a0 = a0;
  out.sample.probe_radius = probe_radius;

  int ci = static_cast<int>(std::lround((saddle.real() - field.origin.real()) / h));
  int cj = static_cast<int>(std::lround((saddle.imag() - field.origin.imag()) / h));
  int span = static_cast<int>(std::ceil(probe_radius / h));
  int i0 = std::max(0, ci - span), i1 = std::min(field.nx - 1, ci + span);
  int j0 = std::max(0, cj - span), j1 = std::min(field.ny - 1, cj + span);
  int mx = i1 - i0 + 1, my = j1 - j0 + 1;
  std::vector<Complex> psi_grid(static_cast<size_t>(mx) * my,
                                Complex(kNaN, kNaN));
  std::vector<char> cut_flag(psi_grid.size(), 0);

  for (int j = j0; j <= j1; ++j)
    for (int i = i0; i <= i1; ++i) {
      Complex z = field.node(i, j);
      if (field.at(i, j) <= 0 || std::abs(z - saddle) > probe_radius) continue;
      size_t k = static_cast<size_t>(j - j0) * mx + (i - i0);
      psi_grid[k] = out.map(z);
      if (std::abs(out.map.side(z)) < h / 4) cut_flag[k] = 1;
    }

  auto pg = [&](int i, int j) -> Complex {
    if (i < i0 || i > i1 || j < j0 || j > j1) return Complex(kNaN, kNaN);
    return psi_grid[static_cast<size_t>(j - j0) * mx + (i - i0)];
  };

  for (int j = j0; j <= j1; ++j)
    for (int i = i0; i <= i1; ++i) {
      Complex p0 = pg(i, j);
      if (!finite(p0)) continue;
      ConformalMapNode node;
      node.z = field.node(i, j);
      node.psi = p0;
      node.on_cut = cut_flag[static_cast<size_t>(j - j0) * mx + (i - i0)] != 0;
      Complex xp = pg(i + 2, j), xm = pg(i - 2, j);
      Complex yp = pg(i, j + 2), ym = pg(i, j - 2);
      if (finite(xp) && finite(xm) && finite(yp) && finite(ym)) {
        Complex dx = (xp - xm) / (4 * h);
        Complex dy = (yp - ym) / (4 * h);
        node.psi1 = 0.5 * (dx + Complex(0, -1) * dy);
        Complex dxx = (xp - 2.0 * p0 + xm) / (4 * h * h);
        Complex dyy = (yp - 2.0 * p0 + ym) / (4 * h * h);
        node.psi2 = 0.5 * (dxx - dyy);
      } else {
        node.psi1 = Complex(kNaN, kNaN);
        node.psi2 = Complex(kNaN, kNaN);
      }
      out.sample.nodes.push_back(node);
    }
  return out;
}

PsiEstimates psi_estimates(const ConformalMapSample& map, double a0, double r0) {
  if (map.nodes.empty()) throw std::invalid_argument("psi_estimates: empty sample");
  double sup2 = 0;
  std::vector<const ConformalMapNode*> usable;
  for (const auto& n : map.nodes) {
    if (std::abs(n.z - map.saddle) > r0 || n.on_cut) continue;
    if (finite(n.psi2)) sup2 = std::max(sup2, std::abs(n.psi2));
    if (finite(n.psi1)) usable.push_back(&n);
  }
  auto defect_of = [&](double theta) {
    Complex e = std::polar(1.0, theta);
    double worst = 0;
    for (const auto* n : usable)
      worst = std::max(worst, std::abs(n->psi1 - e) / (std::abs(n->z - map.saddle) + a0));
    return worst;
  };
  double theta = num::periodic_min(defect_of, 64, 60);
  return {sup2, defect_of(theta), theta};
}

double curvature_compare(const GridField& field, const PsiBuild& psi, double a0) {
  double worst = 0;
  for (const auto& strand : geometry::trace_free_boundary(field)) {
    std::vector<double> kap = geometry::fb_curvature_from_field(field, strand);
    for (size_t k = 0; k < strand.points.size(); ++k) {
      if (!std::isfinite(kap[k])) continue;
      Complex p = strand.points[k];
      if (std::abs(p - psi.sample.saddle) > psi.sample.probe_radius) continue;
      Complex w = psi.map(p);
      double y1 = w.imag() / a0;
      double sech = 1.0 / std::cosh(y1);
      double model = sech * sech / a0;
      worst = std::max(worst, std::abs(kap[k] - model));
    }
  }
  return worst;
}

NeckScan neck_pipeline(const GridField& field, const NeckParams& params) {
  field.check_shape();
  NeckScan scan;
  const double h = field.h;
  auto strands = geometry::trace_free_boundary(field);
  std::vector<Saddle> saddles = find_saddles(field);

  GridField v;
  bool have_v = false;

  for (const Saddle& s : saddles) {
    NeckReport rep;
    rep.center = s.z0;
    rep.a = s.a0;
    double edge = std::min({s.z0.real() - field.origin.real(),
                            field.origin.real() + field.width() - s.z0.real(),
                            s.z0.imag() - field.origin.imag(),
                            field.origin.imag() + field.height() - s.z0.imag()});
    double r_out = params.r_out > 0 ? params.r_out : 0.9 * edge;
    try {
      Proximity prox = hairpin_proximity(field, s.z0, s.a0, params.epsilon);
      rep.rotation = prox.rotation;
      rep.proximity_delta = prox.delta;

      double r_in = 2 * s.a0 / params.epsilon;
      rep.four_graph =
          geometry::four_graph_check(strands, s.z0, r_in, r_out, prox.rotation.theta);

      if (!have_v) {
        v = harmonic_conjugate(field, s.z0);
        have_v = true;
      }
      // v is determined up to a constant; re-anchor at this neck's saddle.
      GridField vloc = v;
      double v0 = vloc.bilinear(s.z0);
      for (size_t k = 0; k < vloc.values.size(); ++k)
        if (field.values[k] > 0) vloc.values[k] -= v0;

      double probe = params.psi_probe > 0 ? params.psi_probe : std::min(r_out, edge - 4 * h);
      PsiBuild psi = build_psi(field, vloc, s.a0, s.z0, probe, prox.rotation.theta);
      PsiEstimates est = psi_estimates(psi.sample, s.a0, probe);
      rep.psi_sup_second = est.sup_second;
      rep.psi_first_defect = est.first_defect;
      rep.curvature_defect = curvature_compare(field, psi, s.a0);
    } catch (const std::exception& ex) {
      rep.error = ex.what();
    }
    scan.necks.push_back(std::move(rep));
  }

  // Curvature bound away from the necks.
  for (const auto& strand : strands) {
    std::vector<double> kap = geometry::fb_curvature_from_field(field, strand);
    for (size_t k = 0; k < strand.points.size(); ++k) {
      if (!std::isfinite(kap[k])) continue;
      bool outside = true;
      for (const Saddle& s : saddles) {
        double edge = std::min({s.z0.real() - field.origin.real(),
                                field.origin.real() + field.width() - s.z0.real(),
                                s.z0.imag() - field.origin.imag(),
                                field.origin.imag() + field.height() - s.z0.imag()});
        double r_out = params.r_out > 0 ? params.r_out : 0.9 * edge;
        if (std::abs(strand.points[k] - s.z0) < r_out) outside = false;
      }
      if (outside) scan.outside_curvature_bound =
          std::max(scan.outside_curvature_bound, std::abs(kap[k]));
    }
  }
  return scan;
}

}  // namespace fbp::neckscope
