#include "fbp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "fbp/numerics.hpp"

namespace fbp::geometry {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Segment {
  long long ea, eb;
  Complex pa, pb;
};

long long h_edge(const GridField& f, int i, int j) { return 2ll * (static_cast<long long>(j) * f.nx + i); }
long long v_edge(const GridField& f, int i, int j) { return 2ll * (static_cast<long long>(j) * f.nx + i) + 1; }

Complex edge_point(const GridField& f, long long id, double level) {
  bool vertical = id & 1;
  long long cell = id / 2;
  int i = static_cast<int>(cell % f.nx);
  int j = static_cast<int>(cell / f.nx);
  double u0 = f.at(i, j);
  double u1 = vertical ? f.at(i, j + 1) : f.at(i + 1, j);
  double t = (level - u0) / (u1 - u0);
  t = std::clamp(t, 0.0, 1.0);
  return vertical ? f.node(i, j) + Complex(0, t * f.h) : f.node(i, j) + Complex(t * f.h, 0);
}

}  // namespace

double ContourStrand::length() const {
  double s = 0;
  for (size_t k = 1; k < points.size(); ++k) s += std::abs(points[k] - points[k - 1]);
  return s;
}

std::vector<ContourStrand> trace_free_boundary(const GridField& field) {
  field.check_shape();
  if (field.nx < 2 || field.ny < 2)
    throw std::invalid_argument("trace_free_boundary: need at least 2 nodes per direction");
  const double L = contour_level(field);

  std::vector<Segment> segs;
  for (int j = 0; j + 1 < field.ny; ++j) {
    for (int i = 0; i + 1 < field.nx; ++i) {
      int mask = (field.at(i, j) > L ? 1 : 0) | (field.at(i + 1, j) > L ? 2 : 0) |
                 (field.at(i + 1, j + 1) > L ? 4 : 0) | (field.at(i, j + 1) > L ? 8 : 0);
      if (mask == 0 || mask == 15) continue;
      long long B = h_edge(field, i, j), T = h_edge(field, i, j + 1);
      long long Lf = v_edge(field, i, j), R = v_edge(field, i + 1, j);
      auto add = [&](long long a, long long b) {
        segs.push_back({a, b, edge_point(field, a, L), edge_point(field, b, L)});
      };
      switch (mask) {
        case 1: case 14: add(Lf, B); break;
        case 2: case 13: add(B, R); break;
        case 3: case 12: add(Lf, R); break;
        case 4: case 11: add(R, T); break;
        case 6: case 9: add(B, T); break;
        case 7: case 8: add(Lf, T); break;
        case 5: case 10: {
          double c = 0.25 * (field.at(i, j) + field.at(i + 1, j) + field.at(i + 1, j + 1) +
                             field.at(i, j + 1));
          bool diag = (c > L) == (mask == 5);
          if (diag) {
            add(Lf, T);
            add(B, R);
          } else {
            add(Lf, B);
            add(R, T);
          }
          break;
        }
      }
    }
  }

  std::unordered_map<long long, std::vector<int>> by_edge;
  by_edge.reserve(segs.size() * 2);
  for (int k = 0; k < static_cast<int>(segs.size()); ++k) {
    by_edge[segs[k].ea].push_back(k);
    by_edge[segs[k].eb].push_back(k);
  }

  std::vector<char> used(segs.size(), 0);
  std::vector<ContourStrand> strands;

  auto walk = [&](int start_seg, long long start_edge) {
    ContourStrand s;
    s.points.push_back(edge_point(field, start_edge, L));
    int cur = start_seg;
    long long edge = start_edge;
    while (true) {
      used[cur] = 1;
      long long next_edge = segs[cur].ea == edge ? segs[cur].eb : segs[cur].ea;
      s.points.push_back(edge_point(field, next_edge, L));
      if (next_edge == start_edge) {
        s.closed = true;
        break;
      }
      const auto& inc = by_edge[next_edge];
      int nxt = -1;
      for (int k : inc)
        if (!used[k]) nxt = k;
      if (nxt < 0) break;
      cur = nxt;
      edge = next_edge;
    }
    // Drop duplicate consecutive points (crossings through a shared node).
    std::vector<Complex> pts;
    for (Complex p : s.points)
      if (pts.empty() || std::abs(p - pts.back()) > 1e-14 * field.h) pts.push_back(p);
    if (s.closed && pts.size() > 1 && std::abs(pts.front() - pts.back()) <= 1e-14 * field.h)
      pts.pop_back();
    s.points = std::move(pts);
    return s;
  };

  // Open strands first: start from edges with a single incident segment.
  for (int k = 0; k < static_cast<int>(segs.size()); ++k) {
    if (used[k]) continue;
    long long open_edge = -1;
    if (by_edge[segs[k].ea].size() == 1)
      open_edge = segs[k].ea;
    else if (by_edge[segs[k].eb].size() == 1)
      open_edge = segs[k].eb;
    if (open_edge < 0) continue;
    strands.push_back(walk(k, open_edge));
  }
  for (int k = 0; k < static_cast<int>(segs.size()); ++k) {
    if (used[k]) continue;
    strands.push_back(walk(k, segs[k].ea));
  }

  // Orient so the positive phase lies to the left of the direction of travel.
  for (auto& s : strands) {
    if (s.points.size() < 2) continue;
    size_t m = s.points.size() / 2;
    Complex tan = s.points[m] - s.points[m - 1];
    double tn = std::abs(tan);
    if (tn == 0) continue;
    Complex nu = Complex(0, 1) * tan / tn;
    Complex mid = 0.5 * (s.points[m] + s.points[m - 1]);
    double off = 0.75 * field.h;
    if (field.bilinear(mid + off * nu) < field.bilinear(mid - off * nu))
      std::reverse(s.points.begin(), s.points.end());
  }
  return strands;
}

std::vector<double> fb_curvature_from_field(const GridField& field, const ContourStrand& strand) {
  const double h = field.h;
  const double L = contour_level(field);
  const size_t n = strand.points.size();
  std::vector<double> kappa(n, kNaN);
  if (n < 3) return kappa;

  auto sample_g2 = [&](Complex q) -> double {
    Complex g = field.grad_interp(q);
    return std::norm(g);
  };

  for (size_t k = 0; k < n; ++k) {
    bool endpoint = !strand.closed && (k == 0 || k == n - 1);
    if (endpoint) continue;  // one-sided stencils at window edges are unreliable
    size_t kp = k + 1 < n ? k + 1 : (strand.closed ? 0 : k);
    size_t km = k > 0 ? k - 1 : (strand.closed ? n - 1 : k);
    Complex tan = strand.points[kp] - strand.points[km];
    double tn = std::abs(tan);
    if (tn == 0) continue;
    Complex nu = Complex(0, 1) * tan / tn;
    Complex p = strand.points[k];
    // Point nu into the positive phase.
    if (field.bilinear(p + 2 * h * nu) < field.bilinear(p - 2 * h * nu)) nu = -nu;

    const double s = 2 * h;
    double f[3];
    bool ok = true;
    for (int m = 1; m <= 3; ++m) {
      Complex q = p + static_cast<double>(m) * s * nu;
      if (!field.contains(q, 2 * h) || field.bilinear(q) <= L) {
        ok = false;
        break;
      }
      f[m - 1] = sample_g2(q);
    }
    if (!ok) continue;
    double d = (-5 * f[0] + 8 * f[1] - 3 * f[2]) / (2 * s);
    kappa[k] = -0.5 * d;
  }
  return kappa;
}

double hausdorff(const std::vector<Complex>& A, const std::vector<Complex>& B) {
  if (A.empty() || B.empty()) throw std::domain_error("hausdorff: empty point set");
  auto one_sided = [](const std::vector<Complex>& X, const std::vector<Complex>& Y) {
    double worst = 0;
    for (Complex x : X) {
      double best = std::numeric_limits<double>::infinity();
      for (Complex y : Y) best = std::min(best, std::norm(x - y));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::sqrt(std::max(one_sided(A, B), one_sided(B, A)));
}

FlatnessReport flatness(const GridField& field, Complex center, double r) {
  field.check_shape();
  if (!(r > 0)) throw std::invalid_argument("flatness: r must be > 0");
  if (!field.contains(center + Complex(r, r)) || !field.contains(center - Complex(r, r)))
    throw std::domain_error("flatness: ball exits the window");

  double step = std::min(field.h, r / 12);
  std::vector<Complex> offsets;
  int m = static_cast<int>(std::floor(r / step));
  for (int j = -m; j <= m; ++j)
    for (int i = -m; i <= m; ++i) {
      Complex x(i * step, j * step);
      if (std::abs(x) <= r) offsets.push_back(x);
    }

  auto delta_of = [&](double theta) {
    Complex rot = std::polar(1.0, theta);
    double worst = 0;
    for (Complex x : offsets) {
      double u = field.bilinear(center + rot * x);
      double model = x.imag() > 0 ? x.imag() : 0.0;
      worst = std::max(worst, std::abs(u - model));
    }
    return worst / r;
  };

  double theta = num::periodic_min(delta_of, 64, 60);
  return {delta_of(theta), RigidMotion(theta, center)};
}

namespace {

ZeroComponents components_impl(const GridField& field, bool positive) {
  const double L = contour_level(field);
  ZeroComponents out;
  out.label.assign(static_cast<size_t>(field.nx) * field.ny, -1);
  std::vector<size_t> stack;
  for (int j = 0; j < field.ny; ++j) {
    for (int i = 0; i < field.nx; ++i) {
      size_t id = field.index(i, j);
      bool member = positive ? field.values[id] > L : field.values[id] <= L;
      if (!member || out.label[id] >= 0) continue;
      int lab = out.count++;
      stack.push_back(id);
      out.label[id] = lab;
      while (!stack.empty()) {
        size_t cur = stack.back();
        stack.pop_back();
        int ci = static_cast<int>(cur % field.nx);
        int cj = static_cast<int>(cur / field.nx);
        const int di[4] = {1, -1, 0, 0};
        const int dj[4] = {0, 0, 1, -1};
        for (int d = 0; d < 4; ++d) {
          int ni = ci + di[d], nj = cj + dj[d];
          if (!field.in_grid(ni, nj)) continue;
          size_t nid = field.index(ni, nj);
          bool nm = positive ? field.values[nid] > L : field.values[nid] <= L;
          if (nm && out.label[nid] < 0) {
            out.label[nid] = lab;
            stack.push_back(nid);
          }
        }
      }
    }
  }
  return out;
}

}  // namespace

ZeroComponents zero_components(const GridField& field) { return components_impl(field, false); }
ZeroComponents positive_components(const GridField& field) { return components_impl(field, true); }

Separation separation(const GridField& field) {
  field.check_shape();
  const double L = contour_level(field);
  ZeroComponents zc = zero_components(field);
  if (zc.count != 2)
    throw structure_error("separation: zero phase has " + std::to_string(zc.count) +
                              " components, expected 2",
                          zc.count);
  // Boundary nodes (a positive 4-neighbor) of each component.
  std::vector<Complex> bd[2];
  for (int j = 0; j < field.ny; ++j)
    for (int i = 0; i < field.nx; ++i) {
      int lab = zc.label[field.index(i, j)];
      if (lab < 0) continue;
      const int di[4] = {1, -1, 0, 0};
      const int dj[4] = {0, 0, 1, -1};
      bool boundary = false;
      for (int d = 0; d < 4; ++d) {
        int ni = i + di[d], nj = j + dj[d];
        if (field.in_grid(ni, nj) && field.at(ni, nj) > L) boundary = true;
      }
      if (boundary) bd[lab].push_back(field.node(i, j));
    }
  if (bd[0].empty() || bd[1].empty())
    throw structure_error("separation: a zero component has no free boundary", zc.count);
  double best = std::numeric_limits<double>::infinity();
  Complex bp, bq;
  for (Complex p : bd[0])
    for (Complex q : bd[1]) {
      double d2 = std::norm(p - q);
      if (d2 < best) {
        best = d2;
        bp = p;
        bq = q;
      }
    }
  return {std::sqrt(best), bp, bq};
}

namespace {

struct Run {
  std::vector<Complex> pts;
};

// Max slope of a run treated as a graph over the rotated abscissa; +inf when
// the run folds back.
double run_lip(const Run& run, double theta, Complex center, double min_dx) {
  std::vector<Complex> q;
  q.reserve(run.pts.size());
  Complex rot = std::polar(1.0, -theta);
  for (Complex p : run.pts) q.push_back(rot * (p - center));
  std::sort(q.begin(), q.end(), [](Complex a, Complex b) { return a.real() < b.real(); });
  double lip = 0;
  size_t anchor = 0;
  for (size_t k = 1; k < q.size(); ++k) {
    double dx = q[k].real() - q[anchor].real();
    double dy = std::abs(q[k].imag() - q[anchor].imag());
    if (dx >= min_dx) {
      lip = std::max(lip, dy / dx);
      anchor = k;
    } else if (dy > 6 * min_dx) {
      return std::numeric_limits<double>::infinity();
    }
  }
  return lip;
}

}  // namespace

FourGraphReport four_graph_check(const std::vector<ContourStrand>& strands, Complex center,
                                 double r_in, double r_out, std::optional<double> rotation_hint) {
  if (!(r_in < r_out) || !(r_in >= 0))
    throw std::invalid_argument("four_graph_check: need 0 <= r_in < r_out");
  std::vector<Run> runs;
  double spacing = 0;
  size_t spacing_n = 0;
  for (const auto& s : strands) {
    Run cur;
    for (size_t k = 0; k < s.points.size(); ++k) {
      double d = std::abs(s.points[k] - center);
      if (d >= r_in && d <= r_out) {
        if (k > 0 && !cur.pts.empty()) {
          spacing += std::abs(s.points[k] - s.points[k - 1]);
          ++spacing_n;
        }
        cur.pts.push_back(s.points[k]);
      } else if (!cur.pts.empty()) {
        runs.push_back(std::move(cur));
        cur = Run{};
      }
    }
    if (!cur.pts.empty()) runs.push_back(std::move(cur));
  }

  FourGraphReport rep;
  rep.branches = static_cast<int>(runs.size());
  if (runs.size() != 4) {
    rep.diagnostic = "expected 4 strand branches in annulus, found " + std::to_string(runs.size());
    // Still report a rotation estimate and lip over whatever is present.
  }
  size_t total = 0;
  for (const auto& r : runs) total += r.pts.size();
  if (total < 8) {
    rep.diagnostic = "too few points in annulus";
    return rep;
  }
  double h_est = spacing_n ? spacing / spacing_n : (r_out - r_in) / 64;
  double min_dx = 2 * h_est;

  double theta0;
  if (rotation_hint) {
    theta0 = *rotation_hint;
  } else {
    // Principal direction of the annulus point cloud.
    double sxx = 0, sxy = 0, syy = 0, mx = 0, my = 0;
    for (const auto& r : runs)
      for (Complex p : r.pts) {
        mx += p.real() - center.real();
        my += p.imag() - center.imag();
      }
    mx /= total;
    my /= total;
    for (const auto& r : runs)
      for (Complex p : r.pts) {
        double x = p.real() - center.real() - mx, y = p.imag() - center.imag() - my;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
      }
    theta0 = 0.5 * std::atan2(2 * sxy, sxx - syy);
  }

  auto lip_of = [&](double th) {
    double lip = 0;
    for (const auto& r : runs) lip = std::max(lip, run_lip(r, th, center, min_dx));
    return lip;
  };
  double theta = num::golden_min(lip_of, theta0 - kPi / 16, theta0 + kPi / 16, 50);
  rep.lip = lip_of(theta);
  rep.rotation = RigidMotion(theta, {0, 0});
  rep.pass = runs.size() == 4 && std::isfinite(rep.lip);
  return rep;
}

double strand_turning(const ContourStrand& strand) {
  const auto& p = strand.points;
  if (p.size() < 3) return 0.0;
  double total = 0;
  for (size_t k = 1; k + 1 < p.size(); ++k) {
    Complex a = p[k] - p[k - 1];
    Complex b = p[k + 1] - p[k];
    double na = std::abs(a), nb = std::abs(b);
    if (na == 0 || nb == 0) continue;
    double cross = a.real() * b.imag() - a.imag() * b.real();
    double dot = a.real() * b.real() + a.imag() * b.imag();
    total += std::abs(std::atan2(cross, dot));
  }
  return total;
}

ContourStrand resample(const ContourStrand& strand, double step) {
  if (!(step > 0) || strand.points.size() < 2) return strand;
  ContourStrand out;
  out.closed = strand.closed;
  out.points.push_back(strand.points.front());
  double carried = 0;
  for (size_t k = 1; k < strand.points.size(); ++k) {
    Complex a = strand.points[k - 1], b = strand.points[k];
    double seg = std::abs(b - a);
    if (seg == 0) continue;
    double t = step - carried;
    while (t <= seg) {
      out.points.push_back(a + (b - a) * (t / seg));
      t += step;
    }
    carried = seg - (t - step);
  }
  if (std::abs(out.points.back() - strand.points.back()) > 1e-12)
    out.points.push_back(strand.points.back());
  return out;
}

double perimeter_diagnostic(const GridField& field, int component_label) {
  field.check_shape();
  const double L = contour_level(field);
  ZeroComponents pc = positive_components(field);
  if (component_label < 0 || component_label >= pc.count)
    throw std::invalid_argument("perimeter_diagnostic: no such component");

  GridField masked = field;
  for (size_t k = 0; k < masked.values.size(); ++k)
    if (masked.values[k] > L && pc.label[k] != component_label) masked.values[k] = 0.0;

  double fb_len = 0;
  for (const auto& s : trace_free_boundary(masked)) fb_len += s.length();

  auto frame_len = [&]() {
    double len = 0;
    auto member = [&](int i, int j) {
      return masked.at(i, j) > L && pc.label[masked.index(i, j)] == component_label;
    };
    auto edge = [&](int i0, int j0, int i1, int j1) {
      bool a = member(i0, j0), b = member(i1, j1);
      if (a && b) {
        len += masked.h;
      } else if (a != b) {
        double ua = masked.at(i0, j0), ub = masked.at(i1, j1);
        double t = (L - ua) / (ub - ua);
        len += masked.h * (a ? t : 1 - t);
      }
    };
    for (int i = 0; i + 1 < masked.nx; ++i) {
      edge(i, 0, i + 1, 0);
      edge(i, masked.ny - 1, i + 1, masked.ny - 1);
    }
    for (int j = 0; j + 1 < masked.ny; ++j) {
      edge(0, j, 0, j + 1);
      edge(masked.nx - 1, j, masked.nx - 1, j + 1);
    }
    return len;
  };

  double open_len = frame_len();
  if (fb_len == 0) return 0.0;
  if (open_len == 0) return std::numeric_limits<double>::infinity();
  return fb_len / open_len;
}

}  // namespace fbp::geometry
