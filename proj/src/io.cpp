#include "fbp/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fbp/numerics.hpp"
#include "fbp/solutions.hpp"

namespace fbp::io {

using nlohmann::json;
using num::format_double;

void write_text(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << content;
}

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

void write_field(const GridField& field, const std::string& base_path) {
  field.check_shape();
  json header = {
      {"origin", {field.origin.real(), field.origin.imag()}},
      {"h", field.h},
      {"nx", field.nx},
      {"ny", field.ny},
      {"provenance", field.provenance},
  };
  write_text(base_path + ".json", header.dump(2) + "\n");
  std::ofstream bin(base_path + ".bin", std::ios::binary);
  if (!bin) throw std::runtime_error("cannot open for writing: " + base_path + ".bin");
  bin.write(reinterpret_cast<const char*>(field.values.data()),
            static_cast<std::streamsize>(field.values.size() * sizeof(double)));
}

GridField read_field(const std::string& base_path) {
  json header = json::parse(read_text(base_path + ".json"));
  GridField f;
  f.origin = Complex(header["origin"][0].get<double>(), header["origin"][1].get<double>());
  f.h = header["h"].get<double>();
  f.nx = header["nx"].get<int>();
  f.ny = header["ny"].get<int>();
  f.provenance = header.value("provenance", "");
  std::ifstream bin(base_path + ".bin", std::ios::binary);
  if (!bin) throw std::runtime_error("cannot open for reading: " + base_path + ".bin");
  f.values.resize(static_cast<std::size_t>(f.nx) * f.ny);
  bin.read(reinterpret_cast<char*>(f.values.data()),
           static_cast<std::streamsize>(f.values.size() * sizeof(double)));
  if (!bin) throw std::runtime_error("truncated field data: " + base_path + ".bin");
  f.check_shape();
  return f;
}

void write_strand_csv(const geometry::ContourStrand& strand, const std::vector<double>& kappa,
                      const std::string& path) {
  std::ostringstream os;
  os << "x,y,kappa\n";
  for (size_t k = 0; k < strand.points.size(); ++k) {
    os << format_double(strand.points[k].real()) << "," << format_double(strand.points[k].imag())
       << ",";
    if (k < kappa.size() && std::isfinite(kappa[k]))
      os << format_double(kappa[k]);
    else
      os << "nan";
    os << "\n";
  }
  write_text(path, os.str());
}

void write_weiss_csv(const weiss::WeissScan& scan, const std::string& path) {
  std::ostringstream os;
  os << "r,phi,defect\n";
  for (size_t k = 0; k < scan.samples.size(); ++k) {
    double defect = k == 0 ? 0.0 : scan.defects[k - 1];
    os << format_double(scan.samples[k].r) << "," << format_double(scan.samples[k].phi) << ","
       << format_double(defect) << "\n";
  }
  write_text(path, os.str());
}

namespace {

json motion_json(const RigidMotion& m) {
  return {{"theta", m.theta}, {"shift", {m.shift.real(), m.shift.imag()}}};
}

json family_json(const solutions::AnalyticSolution& sol) {
  json j = {{"family", solutions::family_name(sol.family)}};
  if (auto* tp = std::get_if<solutions::TwoPlane>(&sol.family)) j["b"] = tp->b;
  if (auto* w = std::get_if<solutions::Wedge>(&sol.family)) j["s"] = w->s;
  if (auto* hp = std::get_if<solutions::Hairpin>(&sol.family)) j["a"] = hp->a;
  j["motion"] = motion_json(sol.motion);
  return j;
}

}  // namespace

std::string classification_json(const rescale::ClassificationResult& result) {
  json j = family_json(result.family);
  j["residual"] = result.residual;
  j["probe_radius"] = result.probe_radius;
  return j.dump(2) + "\n";
}

void write_classification(const rescale::ClassificationResult& result, const std::string& path) {
  write_text(path, classification_json(result));
}

std::string neck_report_json(const neckscope::NeckReport& report) {
  json j = {
      {"center", {report.center.real(), report.center.imag()}},
      {"a", report.a},
      {"rotation", motion_json(report.rotation)},
      {"proximity_delta", report.proximity_delta},
      {"four_graph",
       {{"pass", report.four_graph.pass},
        {"lip", report.four_graph.lip},
        {"rotation", motion_json(report.four_graph.rotation)},
        {"branches", report.four_graph.branches},
        {"diagnostic", report.four_graph.diagnostic}}},
      {"psi_sup_second", report.psi_sup_second},
      {"psi_first_defect", report.psi_first_defect},
      {"curvature_defect", report.curvature_defect},
  };
  if (!report.error.empty()) j["error"] = report.error;
  return j.dump(2) + "\n";
}

void write_neck_reports(const std::vector<neckscope::NeckReport>& reports,
                        double outside_curvature_bound, const std::string& path) {
  json arr = json::array();
  for (const auto& r : reports) arr.push_back(json::parse(neck_report_json(r)));
  json j = {{"necks", arr}, {"outside_curvature_bound", outside_curvature_bound}};
  write_text(path, j.dump(2) + "\n");
}

void write_conformal_csv(const neckscope::ConformalMapSample& sample, const std::string& path) {
  std::ostringstream os;
  os << "z_re,z_im,psi_re,psi_im,psi1_re,psi1_im,psi2_re,psi2_im\n";
  auto put = [&os](Complex c) {
    if (finite(c))
      os << format_double(c.real()) << "," << format_double(c.imag());
    else
      os << "nan,nan";
  };
  for (const auto& n : sample.nodes) {
    put(n.z);
    os << ",";
    put(n.psi);
    os << ",";
    put(n.psi1);
    os << ",";
    put(n.psi2);
    os << "\n";
  }
  write_text(path, os.str());
}

void write_obj(const traizet::SurfaceMesh& mesh, const std::string& obj_path,
               const std::string& sidecar_json_path) {
  std::ostringstream os;
  for (const auto& v : mesh.vertices)
    os << "v " << format_double(v[0]) << " " << format_double(v[1]) << " " << format_double(v[2])
       << "\n";
  for (const auto& f : mesh.faces)
    os << "f " << f[0] + 1 << " " << f[1] + 1 << " " << f[2] + 1 << "\n";
  write_text(obj_path, os.str());

  json j = {{"gauss_curvature", mesh.gauss_curvature},
            {"metric_factor", mesh.metric_factor},
            {"basepoint_index", mesh.basepoint_index},
            {"basepoint_height", mesh.basepoint_height},
            {"loop_residual", mesh.loop_residual}};
  write_text(sidecar_json_path, j.dump() + "\n");
}

void write_defect_csv(const traizet::DefectProfile& profile, const std::string& path) {
  std::ostringstream os;
  os << "r_lo,r_hi,count,k_defect,metric_defect,bound\n";
  for (const auto& b : profile.bins)
    os << format_double(b.r_lo) << "," << format_double(b.r_hi) << "," << b.count << ","
       << format_double(b.k_defect) << "," << format_double(b.metric_defect) << ","
       << format_double(b.bound) << "\n";
  write_text(path, os.str());
}

}  // namespace fbp::io
