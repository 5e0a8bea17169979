#pragma once

#include <span>
#include <vector>

#include "riscim/masks.hpp"
#include "riscim/scene.hpp"

namespace riscim {

struct FieldMeta {
  int mask_index = -1;
  double frequency = 0.0;
  Side side = Side::Tx;
};

/// Complex field samples at a list of points.
struct FieldMap {
  std::vector<Vec3> points;
  CVector values;
  FieldMeta meta;
};

/// Scalar point-source re-radiation: incident * exp(i*applied_phase) *
/// exp(-i*k0*d)/d with d = |point - element| (outgoing e^{-ikd}
/// convention, 1/d spherical spreading).
Complex element_field(const Vec3& element_pos, double applied_phase,
                      Complex incident, const Vec3& point, double frequency);

/// Coherent sum of element_field over one panel; each element is fed by
/// the unit-amplitude spherical wave from the side's antenna.
FieldMap panel_field(const Scene& scene, const Mask& mask, int panel_id,
                     std::span<const Vec3> points, double frequency);

/// Sum of panel_field over all panels of a side: the speckle pattern.
FieldMap aggregate_field(const Scene& scene, const Mask& mask, Side side,
                         std::span<const Vec3> points, double frequency);

/// Per-element complex weights incident(e) * exp(i*psi_e) for one
/// (mask, side, frequency); aggregate_field(p) = sum_e w_e * G(e, p).
CVector mask_weights(const Scene& scene, const Mask& mask, Side side,
                     double frequency);

/// Green's factor table G(e, p) = exp(-i*k*d)/d, elements x points.
/// Columns are evaluated in parallel; each column is a sequential loop so
/// results do not depend on the thread count.
CMatrix greens_table(std::span<const Vec3> elements,
                     std::span<const Vec3> points, double k);

/// Regular sampling of a z = const plane, row-major in (y, x) with
/// inclusive endpoints.
struct PlaneGrid {
  std::vector<Vec3> points;
  std::vector<double> xs;
  std::vector<double> ys;
  double z = 0.0;

  int nx() const { return static_cast<int>(xs.size()); }
  int ny() const { return static_cast<int>(ys.size()); }
  double pitch_x() const { return xs.size() > 1 ? xs[1] - xs[0] : 0.0; }
  double pitch_y() const { return ys.size() > 1 ? ys[1] - ys[0] : 0.0; }
  int index(int iy, int ix) const { return iy * nx() + ix; }
};

PlaneGrid plane_grid(double x0, double x1, int nx, double y0, double y1,
                     int ny, double z);
/// Grid over the ROI plane.
PlaneGrid roi_grid(const RoiBox& roi, int nx, int ny);
/// Grid over the ROI plane scaled about its center (e.g. the 3x window
/// used by the confinement metric).
PlaneGrid window_grid(const RoiBox& roi, double scale, int nx, int ny);

/// Normalized correlation of two magnitude patterns (cosine similarity;
/// 0 by convention if either is all-zero).
double pattern_correlation(const CVector& a, const CVector& b);

/// Fraction of |field|^2 falling inside the ROI rectangle.
double energy_fraction_inside(const FieldMap& field, const RoiBox& roi);

/// |field|^2-weighted centroid of the samples.
Vec3 energy_centroid(const FieldMap& field);

}  // namespace riscim
