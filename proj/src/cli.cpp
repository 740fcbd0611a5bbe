#include "fbp/cli.hpp"

#include <filesystem>
#include <iostream>

#include <json.hpp>

#include "fbp/acsolver.hpp"
#include "fbp/geometry.hpp"
#include "fbp/io.hpp"
#include "fbp/neckscope.hpp"
#include "fbp/numerics.hpp"
#include "fbp/rescale.hpp"
#include "fbp/solutions.hpp"
#include "fbp/traizet.hpp"
#include "fbp/weiss.hpp"

namespace fbp::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

solutions::AnalyticSolution parse_family(const json& j) {
  std::string name = j.at("family").get<std::string>();
  solutions::Family fam;
  if (name == "half_plane")
    fam = solutions::HalfPlane{};
  else if (name == "two_plane")
    fam = solutions::TwoPlane{j.value("b", 0.0)};
  else if (name == "wedge")
    fam = solutions::Wedge{j.value("s", 1.0)};
  else if (name == "hairpin")
    fam = solutions::Hairpin{j.value("a", 1.0)};
  else
    throw std::invalid_argument("unknown family: " + name);
  RigidMotion m;
  if (j.contains("theta")) m = RigidMotion(j["theta"].get<double>(), m.shift);
  if (j.contains("shift"))
    m = RigidMotion(m.theta, Complex(j["shift"][0].get<double>(), j["shift"][1].get<double>()));
  return solutions::AnalyticSolution(fam, m);
}

solutions::Window parse_window(const json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>(),
          j.at(3).get<double>()};
}

struct Check {
  std::string name;
  double value;
  double threshold;
  bool has_threshold;
  bool pass;
};

class Manifest {
 public:
  Manifest(const json& config, std::string kind) : kind_(std::move(kind)) {
    config_ = config;
    hash_ = num::fnv1a(config.dump());
  }

  void measure(const std::string& name, double value) { measured_[name] = value; }

  void check(const std::string& name, double value, const json& thresholds, bool less_equal = true) {
    Check c{name, value, 0.0, false, true};
    if (thresholds.contains(name)) {
      c.threshold = thresholds[name].get<double>();
      c.has_threshold = true;
      c.pass = less_equal ? value <= c.threshold : value >= c.threshold;
    }
    checks_.push_back(c);
    measured_[name] = value;
  }

  void note(const std::string& key, const json& value) { notes_[key] = value; }
  void artifact(const std::string& path) { artifacts_.push_back(path); }

  bool all_pass() const {
    for (const auto& c : checks_)
      if (c.has_threshold && !c.pass) return false;
    return true;
  }

  void write(const fs::path& dir) const {
    json checks = json::array();
    for (const auto& c : checks_) {
      json jc = {{"name", c.name}, {"value", c.value}, {"pass", c.pass}};
      if (c.has_threshold) jc["threshold"] = c.threshold;
      checks.push_back(jc);
    }
    json j = {{"kind", kind_},
              {"config_hash", hash_},
              {"config", config_},
              {"status", all_pass() ? "ok" : "failed"},
              {"measured", measured_},
              {"checks", checks},
              {"notes", notes_},
              {"artifacts", artifacts_}};
    io::write_text((dir / "manifest.json").string(), j.dump(2) + "\n");
  }

 private:
  std::string kind_;
  json config_;
  std::uint64_t hash_;
  json measured_ = json::object();
  json notes_ = json::object();
  std::vector<Check> checks_;
  std::vector<std::string> artifacts_;
};

GridField field_from_config(const json& cfg) {
  if (cfg.contains("field")) return io::read_field(cfg["field"].get<std::string>());
  auto sol = parse_family(cfg.at("input"));
  auto window = parse_window(cfg.at("window"));
  return solutions::sample_to_grid(sol, window, cfg.at("h").get<double>());
}

void run_families(const json& cfg, const fs::path& out, Manifest& man) {
  auto sol = parse_family(cfg.at("input"));
  auto window = parse_window(cfg.at("window"));
  double h = cfg.at("h").get<double>();
  GridField field = solutions::sample_to_grid(sol, window, h);
  io::write_field(field, (out / "field").string());
  man.artifact("field.json");
  man.artifact("field.bin");

  const json thresholds = cfg.value("thresholds", json::object());

  auto strands = geometry::trace_free_boundary(field);
  man.measure("strand_count", static_cast<double>(strands.size()));
  for (size_t k = 0; k < strands.size(); ++k) {
    auto kap = geometry::fb_curvature_from_field(field, strands[k]);
    std::string name = "strand_" + std::to_string(k) + ".csv";
    io::write_strand_csv(strands[k], kap, (out / name).string());
    man.artifact(name);
  }

  // Interior harmonicity of the sample.
  double lap_sup = 0;
  for (int j = 1; j + 1 < field.ny; ++j)
    for (int i = 1; i + 1 < field.nx; ++i) {
      bool interior = true;
      for (int dj = -2; dj <= 2 && interior; ++dj)
        for (int di = -2; di <= 2; ++di) {
          int ni = i + di, nj = j + dj;
          if (!field.in_grid(ni, nj) || field.at(ni, nj) <= 0) {
            interior = false;
            break;
          }
        }
      if (interior) lap_sup = std::max(lap_sup, std::abs(field.laplacian_node(i, j)));
    }
  man.check("laplacian_sup", lap_sup, thresholds);

  if (auto* hp = std::get_if<solutions::Hairpin>(&sol.family)) {
    double a = hp->a;
    man.measure("saddle_value", solutions::eval(sol, sol.motion.apply(Complex(0, 0))));
    auto sep = geometry::separation(field);
    man.measure("separation", sep.s);
    man.check("separation_error", std::abs(sep.s - a * (2 + kPi)), thresholds);
    double grad_defect = 0;
    for (int k = -40; k <= 40; ++k) {
      for (auto side : {solutions::Side::Left, solutions::Side::Right}) {
        auto bp = solutions::boundary_param(a, 0.1 * k, side);
        Complex z = sol.motion.apply(bp.point);
        grad_defect = std::max(grad_defect, std::abs(std::abs(solutions::grad(sol, z)) - 1.0));
      }
    }
    man.check("boundary_grad_defect", grad_defect, thresholds);
  }
}

void run_weiss(const json& cfg, const fs::path& out, Manifest& man) {
  const json thresholds = cfg.value("thresholds", json::object());
  Complex center(cfg.at("center")[0].get<double>(), cfg.at("center")[1].get<double>());
  std::vector<double> radii = cfg.at("radii").get<std::vector<double>>();
  weiss::WeissScan scan;
  if (cfg.contains("field")) {
    GridField f = io::read_field(cfg["field"].get<std::string>());
    scan = weiss::weiss_scan(f, center, radii);
  } else {
    scan = weiss::weiss_scan(parse_family(cfg.at("input")), center, radii);
  }
  io::write_weiss_csv(scan, (out / "weiss.csv").string());
  man.artifact("weiss.csv");
  double max_defect = 0;
  for (double d : scan.defects) max_defect = std::max(max_defect, d);
  man.check("max_defect", max_defect, thresholds);
  man.measure("phi_first", scan.samples.front().phi);
  man.measure("phi_last", scan.samples.back().phi);
}

void run_classify(const json& cfg, const fs::path& out, Manifest& man) {
  const json thresholds = cfg.value("thresholds", json::object());
  double pr = cfg.value("probe_radius", 1.0);
  rescale::ClassificationResult res;
  if (cfg.contains("field")) {
    GridField f = io::read_field(cfg["field"].get<std::string>());
    res = rescale::classify(f, pr);
  } else {
    auto sol = parse_family(cfg.at("input"));
    if (cfg.contains("rescale")) {
      const json& rs = cfg["rescale"];
      Complex c(rs.at("center")[0].get<double>(), rs.at("center")[1].get<double>());
      sol = rescale::rescaled(sol, c, rs.at("lambda").get<double>());
    }
    res = rescale::classify(sol, pr);
  }
  io::write_classification(res, (out / "classification.json").string());
  man.artifact("classification.json");
  man.note("family", solutions::family_name(res.family.family));
  man.check("residual", res.residual, thresholds);
}

void run_neck(const json& cfg, const fs::path& out, Manifest& man) {
  const json thresholds = cfg.value("thresholds", json::object());
  GridField field = field_from_config(cfg);
  neckscope::NeckParams params;
  params.epsilon = cfg.value("epsilon", 0.125);
  params.r_out = cfg.value("r_out", 0.0);
  auto scan = neckscope::neck_pipeline(field, params);
  io::write_neck_reports(scan.necks, scan.outside_curvature_bound,
                         (out / "neck_reports.json").string());
  man.artifact("neck_reports.json");
  man.measure("neck_count", static_cast<double>(scan.necks.size()));
  man.measure("outside_curvature_bound", scan.outside_curvature_bound);
  if (!scan.necks.empty()) {
    man.measure("a0", scan.necks.front().a);
    man.check("proximity_delta", scan.necks.front().proximity_delta, thresholds);
    man.check("curvature_defect", scan.necks.front().curvature_defect, thresholds);
  }
}

void run_traizet(const json& cfg, const fs::path& out, Manifest& man) {
  const json thresholds = cfg.value("thresholds", json::object());
  auto sol = parse_family(cfg.at("input"));
  auto window = parse_window(cfg.at("window"));
  double step = cfg.at("step").get<double>();
  auto data = traizet::weierstrass_data(sol);
  Complex basepoint(0, 0);
  if (cfg.contains("basepoint"))
    basepoint = Complex(cfg["basepoint"][0].get<double>(), cfg["basepoint"][1].get<double>());
  auto mesh = traizet::immerse(data, window, step, basepoint);

  double x3_defect = 0;
  for (size_t k = 0; k < mesh.vertices.size(); ++k)
    x3_defect = std::max(x3_defect, std::abs(mesh.vertices[k][2] - data.u(mesh.domain_z[k])));
  man.check("x3_defect", x3_defect, thresholds);
  man.measure("loop_residual", mesh.loop_residual);

  traizet::canonical_align(mesh);
  double rho = traizet::fit_rho(mesh);
  man.measure("rho", rho);
  man.check("catenoid_residual", traizet::catenoid_residual(mesh, rho), thresholds);

  io::write_obj(mesh, (out / "surface.obj").string(), (out / "surface_data.json").string());
  man.artifact("surface.obj");
  man.artifact("surface_data.json");
  auto profile = traizet::curvature_compare_3d(data, rho, mesh.domain_z);
  io::write_defect_csv(profile, (out / "defect_profile.csv").string());
  man.artifact("defect_profile.csv");
}

void run_solve(const json& cfg, const fs::path& out, Manifest& man) {
  const json thresholds = cfg.value("thresholds", json::object());
  auto window = parse_window(cfg.at("window"));
  double h = cfg.at("h").get<double>();
  acsolver::SolverParams params;
  params.max_iters = cfg.value("max_iters", params.max_iters);
  params.descent_tol = cfg.value("descent_tol", params.descent_tol);
  params.epsilon_relax = cfg.value("epsilon_relax", 0.0);

  acsolver::BoundaryData bd;
  if (cfg.contains("boundary_csv")) {
    std::istringstream is(io::read_text(cfg["boundary_csv"].get<std::string>()));
    std::string line;
    std::getline(is, line);  // header: index,value
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      auto comma = line.find(',');
      bd.values.emplace_back(std::stoull(line.substr(0, comma)),
                             std::stod(line.substr(comma + 1)));
    }
  } else {
    bd = acsolver::boundary_from_family(parse_family(cfg.at("input")), window, h);
  }

  auto res = acsolver::minimize(window, h, bd, params);
  io::write_field(res.field, (out / "field").string());
  man.artifact("field.json");
  man.artifact("field.bin");
  man.measure("iterations", res.iters);
  man.measure("converged", res.converged ? 1.0 : 0.0);
  man.measure("energy_final", res.energy_trace.back());

  double eps = params.epsilon_relax > 0 ? params.epsilon_relax : 2 * h;
  auto fbc = acsolver::verify_fbc(res.field, 3 * eps, cfg.value("fbc_baseline", 0.0));
  man.check("fbc_max_defect", fbc.max, thresholds);
  man.measure("fbc_mean_defect", fbc.mean);

  if (cfg.contains("input")) {
    auto sol = parse_family(cfg.at("input"));
    double sup = 0;
    for (int j = 0; j < res.field.ny; ++j)
      for (int i = 0; i < res.field.nx; ++i)
        sup = std::max(sup,
                       std::abs(res.field.at(i, j) - solutions::eval(sol, res.field.node(i, j))));
    man.check("sup_distance", sup, thresholds);
  }
}

}  // namespace

int run(const std::string& config_json_text, const std::string& out_dir, bool verbose) {
  fs::create_directories(out_dir);
  json cfg;
  try {
    cfg = json::parse(config_json_text);
    std::string kind = cfg.at("kind").get<std::string>();
    Manifest man(cfg, kind);
    fs::path out(out_dir);
    if (kind == "families")
      run_families(cfg, out, man);
    else if (kind == "weiss")
      run_weiss(cfg, out, man);
    else if (kind == "classify")
      run_classify(cfg, out, man);
    else if (kind == "neck")
      run_neck(cfg, out, man);
    else if (kind == "traizet")
      run_traizet(cfg, out, man);
    else if (kind == "solve")
      run_solve(cfg, out, man);
    else
      throw std::invalid_argument("unknown scenario kind: " + kind);
    man.write(out);
    if (verbose) std::cerr << "wrote " << (out / "manifest.json").string() << "\n";
    return man.all_pass() ? 0 : 3;
  } catch (const std::exception& ex) {
    json err = {{"error", ex.what()}};
    try {
      io::write_text((fs::path(out_dir) / "error.json").string(), err.dump(2) + "\n");
    } catch (...) {
    }
    std::cerr << err.dump() << "\n";
    return 2;
  }
}

std::string report_summary(const std::string& directory) {
  json checks = json::array();
  json missing = json::array();
  int manifests = 0;
  bool all_pass = true;

  auto consume = [&](const fs::path& p, const std::string& label) {
    json man = json::parse(io::read_text(p.string()));
    ++manifests;
    if (man.value("status", "failed") != std::string("ok")) all_pass = false;
    for (const auto& c : man.value("checks", json::array())) {
      json jc = c;
      jc["run"] = label;
      checks.push_back(jc);
      if (c.contains("pass") && !c["pass"].get<bool>()) all_pass = false;
    }
  };

  fs::path root(directory);
  if (fs::exists(root / "manifest.json")) consume(root / "manifest.json", ".");
  std::vector<fs::path> subs;
  if (fs::exists(root))
    for (const auto& entry : fs::directory_iterator(root))
      if (entry.is_directory()) subs.push_back(entry.path());
  std::sort(subs.begin(), subs.end());
  for (const auto& sub : subs) {
    if (fs::exists(sub / "manifest.json"))
      consume(sub / "manifest.json", sub.filename().string());
    else
      missing.push_back(sub.filename().string());
  }

  json j = {{"success", manifests > 0 && all_pass && missing.empty()},
            {"manifests", manifests},
            {"checks", checks},
            {"missing", missing}};
  return j.dump(2) + "\n";
}

}  // namespace fbp::cli
