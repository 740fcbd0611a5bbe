#pragma once

#include <string>
#include <vector>

#include "fbp/geometry.hpp"
#include "fbp/gridfield.hpp"
#include "fbp/neckscope.hpp"
#include "fbp/rescale.hpp"
#include "fbp/traizet.hpp"
#include "fbp/weiss.hpp"

namespace fbp::io {

// GridField as <base>.json (origin, h, nx, ny, provenance) + <base>.bin
// (row-major little-endian doubles).
void write_field(const GridField& field, const std::string& base_path);
GridField read_field(const std::string& base_path);

void write_strand_csv(const geometry::ContourStrand& strand, const std::vector<double>& kappa,
                      const std::string& path);

void write_weiss_csv(const weiss::WeissScan& scan, const std::string& path);

std::string classification_json(const rescale::ClassificationResult& result);
void write_classification(const rescale::ClassificationResult& result, const std::string& path);

std::string neck_report_json(const neckscope::NeckReport& report);
void write_neck_reports(const std::vector<neckscope::NeckReport>& reports,
                        double outside_curvature_bound, const std::string& path);

void write_conformal_csv(const neckscope::ConformalMapSample& sample, const std::string& path);

void write_obj(const traizet::SurfaceMesh& mesh, const std::string& obj_path,
               const std::string& sidecar_json_path);

void write_defect_csv(const traizet::DefectProfile& profile, const std::string& path);

void write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

}  // namespace fbp::io
