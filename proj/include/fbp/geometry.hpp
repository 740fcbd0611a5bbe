#pragma once

#include <optional>
#include <vector>

#include "fbp/gridfield.hpp"
#include "fbp/types.hpp"

namespace fbp::geometry {

// Contour level factor: the free boundary is traced as {u = tau * h}.
inline constexpr double kLevelFactor = 0.5;

inline double contour_level(const GridField& f) { return kLevelFactor * f.h; }

struct ContourStrand {
  std::vector<Complex> points;
  std::vector<double> curvature;  // NaN where flagged / not computed
  bool closed = false;

  double length() const;
};

// Marching-squares trace of {u = tau*h}; strands ordered by discovery in a
// row-major cell scan. Open strands end on the window edge.
std::vector<ContourStrand> trace_free_boundary(const GridField& field);

// Signed curvature at strand points via kappa = -1/2 d/dnu |grad u|^2, with nu
// the inward (positive-phase) normal; one-sided stencil at offsets 2h..6h.
// Flagged points (stencil exits window or touches the zero phase) get NaN.
std::vector<double> fb_curvature_from_field(const GridField& field, const ContourStrand& strand);

double hausdorff(const std::vector<Complex>& A, const std::vector<Complex>& B);

struct FlatnessReport {
  double delta = 0.0;
  RigidMotion rotation;
};

FlatnessReport flatness(const GridField& field, Complex center, double r);

// Zero-phase connected components (4-neighbor on nodes with u <= tau*h).
struct ZeroComponents {
  std::vector<int> label;  // -1 for positive nodes
  int count = 0;
};
ZeroComponents zero_components(const GridField& field);

struct Separation {
  double s;
  Complex p;
  Complex q;
};
// Requires exactly two zero-phase components; throws structure_error otherwise.
Separation separation(const GridField& field);

struct FourGraphReport {
  bool pass = false;
  double lip = std::numeric_limits<double>::infinity();
  RigidMotion rotation;
  int branches = 0;
  std::string diagnostic;
};

FourGraphReport four_graph_check(const std::vector<ContourStrand>& strands, Complex center,
                                 double r_in, double r_out,
                                 std::optional<double> rotation_hint = std::nullopt);

// Sum of unsigned exterior angles along the polyline, in radians.
double strand_turning(const ContourStrand& strand);

// Arc-length resampling at the given step; endpoints kept.
ContourStrand resample(const ContourStrand& strand, double step);

// Positive-phase connected components (4-neighbor on nodes with u > tau*h).
ZeroComponents positive_components(const GridField& field);

// H^1(dU cap F(u)) / H^1(dU \ F(u)) for the positive component with the given
// label; +inf when the component never meets the window frame.
double perimeter_diagnostic(const GridField& field, int component_label);

}  // namespace fbp::geometry
