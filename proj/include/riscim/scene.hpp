#pragma once

#include <span>
#include <vector>

#include "riscim/common.hpp"

namespace riscim {

enum class Side { Tx, Rx };

inline const char* side_name(Side s) { return s == Side::Tx ? "tx" : "rx"; }

/// Axis-aligned imaging window. extent_z == 0 means a planar (2-D) ROI at
/// z = center.z(); extent_z > 0 describes a box.
struct RoiBox {
  Vec3 center{0.0, 1.9, 8.0};
  double extent_x = 3.0;
  double extent_y = 2.0;
  double extent_z = 0.0;

  bool planar() const { return extent_z <= 0.0; }
  double x_min() const { return center.x() - extent_x / 2; }
  double x_max() const { return center.x() + extent_x / 2; }
  double y_min() const { return center.y() - extent_y / 2; }
  double y_max() const { return center.y() + extent_y / 2; }
  double z_min() const { return center.z() - extent_z / 2; }
  double z_max() const { return center.z() + extent_z / 2; }

  bool contains_xy(double x, double y) const {
    return x >= x_min() && x <= x_max() && y >= y_min() && y <= y_max();
  }
};

/// One reconfigurable panel: a rows x cols element grid in the z = 0
/// aperture plane, centered on `center`.
struct RisPanel {
  int id = 0;
  Side side = Side::Tx;
  int rows = 20;
  int cols = 20;
  double spacing = 0.02;
  Vec3 center{0, 0, 0};

  int element_count() const { return rows * cols; }
  double width() const { return cols * spacing; }
  double height() const { return rows * spacing; }

  /// Element (r, c); the grid is centered on the panel center.
  Vec3 element_position(int r, int c) const {
    return {center.x() + (c - (cols - 1) / 2.0) * spacing,
            center.y() + (r - (rows - 1) / 2.0) * spacing, center.z()};
  }
};

struct Scatterer {
  Vec3 position{0, 0, 0};
  Complex reflectivity{1.0, 0.0};
};

struct TargetMap {
  std::vector<Scatterer> scatterers;
};

/// All geometry inputs; defaults reproduce the reference configuration
/// (six 20x20 panels per side, 2 cm pitch, collocated antennas at
/// (0, -3, 3) m, five frequencies across 5.9-6.1 GHz).
struct SceneConfig {
  int panel_rows = 20;
  int panel_cols = 20;
  double element_spacing = 0.02;
  int tx_grid_rows = 3;  // panel-block layout, rows along y
  int tx_grid_cols = 2;  // columns along x
  int rx_grid_rows = 3;
  int rx_grid_cols = 2;
  double gap_x = 0.0;  // edge-to-edge inter-panel gaps (S_x, S_y)
  double gap_y = 0.0;
  Vec3 tx_antenna{0.0, -3.0, 3.0};
  Vec3 rx_antenna{0.0, -3.0, 3.0};
  RoiBox roi;
  std::vector<double> frequencies{5.90e9, 5.95e9, 6.00e9, 6.05e9, 6.10e9};
  double design_frequency = 6.0e9;  // masks are synthesized at this frequency
};

/// Immutable geometric description shared by every other module. The Tx
/// panel block and the Rx panel block are tiled edge-to-edge (plus gaps)
/// side by side along x in the z = 0 plane, centered on the origin as a
/// whole; panels within a block are row-major bottom-up.
class Scene {
 public:
  static Scene build(const SceneConfig& config);

  const SceneConfig& config() const { return config_; }
  const std::vector<RisPanel>& panels() const { return panels_; }
  const RisPanel& panel(int id) const { return panels_.at(id); }
  std::vector<const RisPanel*> side_panels(Side side) const;
  std::size_t panel_count(Side side) const;

  /// Flattened element positions of one side, panel-major then row-major.
  const std::vector<Vec3>& elements(Side side) const {
    return side == Side::Tx ? tx_elements_ : rx_elements_;
  }
  std::size_t element_count(Side side) const { return elements(side).size(); }

  Vec3 antenna(Side side) const {
    return side == Side::Tx ? config_.tx_antenna : config_.rx_antenna;
  }
  /// Centroid of one side's panel block.
  Vec3 block_center(Side side) const {
    return side == Side::Tx ? tx_block_center_ : rx_block_center_;
  }

  const RoiBox& roi() const { return config_.roi; }
  const std::vector<double>& frequencies() const { return config_.frequencies; }
  double design_frequency() const { return config_.design_frequency; }

 private:
  SceneConfig config_;
  std::vector<RisPanel> panels_;
  std::vector<Vec3> tx_elements_;
  std::vector<Vec3> rx_elements_;
  Vec3 tx_block_center_{0, 0, 0};
  Vec3 rx_block_center_{0, 0, 0};
};

/// The nine-scatterer reference target: unit reflectivities on a 3x3 grid,
/// 0.5 m pitch, centered (0, 1.9) m at z = 8 m.
TargetMap paper_target();

TargetMap add_clutter(const TargetMap& target, double clutter_y,
                      Complex reflectivity = Complex(1.0, 0.0));
/// Drops the most recently appended scatterer (inverse of add_clutter).
TargetMap remove_clutter(const TargetMap& target);

/// Steering direction measured from the z axis. The pair is defined so
/// that an Eq.-1-form gradient k0*(x sin(theta) cos(phi) + y sin(theta)
/// sin(phi)), applied as exp(+i*psi) with exp(-i*k*d) propagation,
/// redirects the beam through the point used to construct it.
struct SteerAngles {
  double theta = 0.0;
  double phi = 0.0;
};

/// Angles of `point` as seen from `reference`, in the gradient convention
/// above. Requires point to lie in front of the aperture plane (z above
/// the reference).
SteerAngles steering_to_point(const Vec3& reference, const Vec3& point);

/// Elevation/azimuth intervals subtended by the ROI from a reference
/// point, plus the angles of the ROI center (the unperturbed steering).
struct AngleBounds {
  double theta_min = 0.0;
  double theta_max = 0.0;
  double phi_min = 0.0;
  double phi_max = 0.0;
  double base_theta = 0.0;
  double base_phi = 0.0;

  double theta_span() const { return theta_max - theta_min; }
  double phi_span() const { return phi_max - phi_min; }
  bool contains(const SteerAngles& a, double tol = 1e-12) const {
    return a.theta >= theta_min - tol && a.theta <= theta_max + tol &&
           a.phi >= phi_min - tol && a.phi <= phi_max + tol;
  }
};

AngleBounds angle_bounds(const RisPanel& panel, const RoiBox& roi);
AngleBounds angle_bounds_from(const Vec3& reference, const RoiBox& roi);

}  // namespace riscim
