#include "fbp/rescale.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "fbp/numerics.hpp"

namespace fbp::rescale {

using solutions::AnalyticSolution;
using solutions::Family;
using solutions::HalfPlane;
using solutions::Hairpin;
using solutions::TwoPlane;
using solutions::Wedge;

AnalyticSolution rescaled(const AnalyticSolution& u, Complex center, double lambda) {
  if (!(lambda > 0)) throw std::invalid_argument("rescale: lambda must be > 0");
  require_finite(center, "rescale");
  Family fam = u.family;
  if (auto* tp = std::get_if<TwoPlane>(&fam)) fam = TwoPlane{tp->b / lambda};
  if (auto* hp = std::get_if<Hairpin>(&fam)) fam = Hairpin{hp->a / lambda};
  // u(z) = base(e^{-i t}(z - s));  v(x) = u(center + lambda x)/lambda
  //       = base'(e^{-i t}(x - (s - center)/lambda))
  RigidMotion m(u.motion.theta, (u.motion.shift - center) / lambda);
  return AnalyticSolution(fam, m);
}

GridField rescaled(const GridField& u, Complex center, double lambda) {
  if (!(lambda > 0)) throw std::invalid_argument("rescale: lambda must be > 0");
  u.check_shape();
  if (!u.contains(center)) throw std::domain_error("rescale: center outside the window");
  GridField v = u;
  v.origin = (u.origin - center) / lambda;
  v.h = u.h / lambda;
  if (!(v.h > 0) || !std::isfinite(v.h)) throw std::domain_error("rescale: grid window underflow");
  for (double& val : v.values) val /= lambda;
  v.provenance = u.provenance + " rescaled(lambda=" + num::format_double(lambda) + ")";
  return v;
}

namespace {

enum class Kind { Half = 0, Wedge = 1, Two = 2, Pin = 3 };

struct Candidate {
  Kind kind;
  double param = 0;  // s, b or a; unused for Half
  double theta = 0;
  Complex shift{0, 0};
};

AnalyticSolution to_solution(const Candidate& c) {
  Family f;
  switch (c.kind) {
    case Kind::Half: f = HalfPlane{}; break;
    case Kind::Wedge: f = Wedge{std::clamp(c.param, 1e-12, 1.0)}; break;
    case Kind::Two: f = TwoPlane{std::max(c.param, 0.0)}; break;
    case Kind::Pin: f = Hairpin{std::max(c.param, 1e-12)}; break;
  }
  return AnalyticSolution(f, RigidMotion(c.theta, c.shift));
}

struct Probe {
  std::vector<Complex> pts;
  std::vector<double> u;
};

double residual_on(const Probe& probe, const Candidate& c, double pr) {
  AnalyticSolution sol = to_solution(c);
  double worst = 0;
  for (size_t k = 0; k < probe.pts.size(); ++k)
    worst = std::max(worst, std::abs(probe.u[k] - solutions::eval(sol, probe.pts[k])));
  return worst / pr;
}

// Family parameters are kept commensurate with the probe: scales above the
// probe radius or below the probe resolution are represented by their limit
// family there (the fewer-parameters tie-break covers the exact ties).
struct ParamBox {
  double pr;        // probe radius
  double res;       // probe grid resolution
};

double clamp_param(Kind kind, double p, const ParamBox& box) {
  if (!std::isfinite(p)) p = box.pr;
  switch (kind) {
    case Kind::Wedge: return std::clamp(p, 1e-6, 1.0);
    case Kind::Two: return std::clamp(p, 0.0, 2 * box.pr);
    case Kind::Pin: return std::clamp(p, box.res, 2 * box.pr);
    default: return 0.0;
  }
}

Candidate decode(const Candidate& proto, const std::vector<double>& p, const ParamBox& box) {
  Candidate c = proto;
  c.theta = p[0];
  double sx = std::clamp(p[1], -2.5 * box.pr, 2.5 * box.pr);
  double sy = std::clamp(p[2], -2.5 * box.pr, 2.5 * box.pr);
  c.shift = Complex(sx, sy);
  if (c.kind != Kind::Half) c.param = clamp_param(c.kind, std::exp(p[3]), box);
  return c;
}

// Nelder-Mead on (theta, shift, log-param); the sup-norm objective is a
// piecewise-linear cone near an exact fit, where axis-wise searches stall.
Candidate refine(const Probe& probe, Candidate seed, const ParamBox& box, int max_evals) {
  const double pr = box.pr;
  const int dim = seed.kind == Kind::Half ? 3 : 4;
  std::vector<std::vector<double>> simplex;
  std::vector<double> p0 = {seed.theta, seed.shift.real(), seed.shift.imag()};
  if (dim == 4) p0.push_back(std::log(std::max(seed.param, 1e-6 * pr)));
  simplex.push_back(p0);
  const double steps[4] = {0.08, 0.15 * pr, 0.15 * pr, 0.3};
  for (int d = 0; d < dim; ++d) {
    auto v = p0;
    v[d] += steps[d];
    simplex.push_back(v);
  }
  int evals = 0;
  auto fval = [&](const std::vector<double>& p) {
    ++evals;
    return residual_on(probe, decode(seed, p, box), pr);
  };
  std::vector<double> f(simplex.size());
  for (size_t k = 0; k < simplex.size(); ++k) f[k] = fval(simplex[k]);

  while (evals < max_evals) {
    // Order the simplex (stable: lexicographic tie-break keeps determinism).
    std::vector<size_t> idx(simplex.size());
    for (size_t k = 0; k < idx.size(); ++k) idx[k] = k;
    std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return f[a] < f[b]; });
    std::vector<std::vector<double>> s2;
    std::vector<double> f2;
    for (size_t k : idx) {
      s2.push_back(simplex[k]);
      f2.push_back(f[k]);
    }
    simplex = s2;
    f = f2;
    if (f.back() - f.front() < 1e-15 && f.front() < 1e-13) break;
    double diam = 0;
    for (int d = 0; d < dim; ++d)
      diam = std::max(diam, std::abs(simplex.back()[d] - simplex.front()[d]));
    if (diam < 1e-13) break;

    std::vector<double> centroid(dim, 0.0);
    for (size_t k = 0; k + 1 < simplex.size(); ++k)
      for (int d = 0; d < dim; ++d) centroid[d] += simplex[k][d] / (simplex.size() - 1);
    auto combine = [&](double t) {
      std::vector<double> p(dim);
      for (int d = 0; d < dim; ++d) p[d] = centroid[d] + t * (centroid[d] - simplex.back()[d]);
      return p;
    };
    auto refl = combine(1.0);
    double fr = fval(refl);
    if (fr < f.front()) {
      auto exp_p = combine(2.0);
      double fe = fval(exp_p);
      if (fe < fr) {
        simplex.back() = exp_p;
        f.back() = fe;
      } else {
        simplex.back() = refl;
        f.back() = fr;
      }
    } else if (fr < f[f.size() - 2]) {
      simplex.back() = refl;
      f.back() = fr;
    } else {
      auto con = combine(fr < f.back() ? 0.5 : -0.5);
      double fc = fval(con);
      if (fc < std::min(fr, f.back())) {
        simplex.back() = con;
        f.back() = fc;
      } else {
        for (size_t k = 1; k < simplex.size(); ++k) {
          for (int d = 0; d < dim; ++d)
            simplex[k][d] = simplex[0][d] + 0.5 * (simplex[k][d] - simplex[0][d]);
          f[k] = fval(simplex[k]);
        }
      }
    }
  }
  size_t best = 0;
  for (size_t k = 1; k < f.size(); ++k)
    if (f[k] < f[best]) best = k;
  return decode(seed, simplex[best], box);
}

ClassificationResult classify_impl(const std::function<double(Complex)>& usample,
                                   double probe_radius, const ClassifyParams& params) {
  if (!(probe_radius > 0)) throw std::invalid_argument("classify: probe_radius must be > 0");
  const double pr = probe_radius;
  Probe full, coarse;
  const int n = params.probe_n;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      Complex x((i + 0.5) * 2 * pr / n - pr, (j + 0.5) * 2 * pr / n - pr);
      if (std::abs(x) > pr) continue;
      full.pts.push_back(x);
      full.u.push_back(usample(x));
      if (i % 4 == 1 && j % 4 == 1) {
        coarse.pts.push_back(x);
        coarse.u.push_back(full.u.back());
      }
    }

  const ParamBox box{pr, 2 * pr / params.probe_n};

  std::vector<double> thetas(params.coarse_theta);
  for (int k = 0; k < params.coarse_theta; ++k) thetas[k] = 2 * kPi * k / params.coarse_theta;
  auto log_params = [&](double lo, double hi) {
    std::vector<double> v(params.coarse_param);
    for (int k = 0; k < params.coarse_param; ++k)
      v[k] = lo * std::pow(hi / lo, static_cast<double>(k) / (params.coarse_param - 1));
    return v;
  };

  std::vector<Candidate> seeds;
  for (Kind kind : {Kind::Half, Kind::Wedge, Kind::Two, Kind::Pin}) {
    if (!(params.family_mask & (1u << static_cast<int>(kind)))) continue;
    Candidate best;
    best.kind = kind;
    double best_res = std::numeric_limits<double>::infinity();
    std::vector<double> ps;
    switch (kind) {
      case Kind::Half: ps = {0.0}; break;
      case Kind::Wedge: ps = log_params(0.05, 1.0); break;
      case Kind::Two: ps = log_params(1e-3 * pr, 2 * pr); break;
      case Kind::Pin: ps = log_params(box.res, 2 * pr); break;
    }
    for (double p : ps)
      for (double th : thetas) {
        Candidate c{kind, p, th, {0, 0}};
        double r = residual_on(coarse, c, pr);
        if (r < best_res) {
          best_res = r;
          best = c;
        }
      }
    seeds.push_back(best);
  }

  if (seeds.empty()) throw std::invalid_argument("classify: empty family mask");
  Candidate winner;
  double winner_res = std::numeric_limits<double>::infinity();
  for (const Candidate& seed : seeds) {
    Candidate c = refine(coarse, seed, box, 60 * params.descent_budget);
    c = refine(full, c, box, 12 * params.descent_budget);
    double r = residual_on(full, c, pr);
    // Tie-break toward fewer parameters (Half < Wedge < Two < Pin).
    if (r < winner_res - 1e-12 ||
        (r < winner_res + 1e-12 && static_cast<int>(c.kind) < static_cast<int>(winner.kind))) {
      winner_res = r;
      winner = c;
    }
  }

  if (winner.kind == Kind::Wedge && winner.param >= 1.0 - 1e-6) {
    winner.kind = Kind::Two;
    winner.param = 0.0;
    winner_res = residual_on(full, winner, pr);
  }

  return {to_solution(winner), winner_res, pr};
}

}  // namespace

ClassificationResult classify(const AnalyticSolution& u, double probe_radius,
                              const ClassifyParams& params) {
  return classify_impl([&u](Complex x) { return solutions::eval(u, x); }, probe_radius, params);
}

ClassificationResult classify(const GridField& u, double probe_radius,
                              const ClassifyParams& params) {
  u.check_shape();
  if (!u.contains(Complex(probe_radius, probe_radius)) ||
      !u.contains(-Complex(probe_radius, probe_radius)))
    throw std::domain_error("classify: probe disk exits the window");
  return classify_impl([&u](Complex x) { return u.bilinear(x); }, probe_radius, params);
}

}  // namespace fbp::rescale
