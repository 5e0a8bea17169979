#include "riscim/scene.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace riscim {

namespace {

void validate(const SceneConfig& c) {
  auto fail = [](const std::string& msg) { throw ConfigError("scene: " + msg); };
  if (c.panel_rows <= 0 || c.panel_cols <= 0) fail("element counts must be positive");
  if (c.element_spacing <= 0) fail("element spacing must be positive");
  if (c.tx_grid_rows <= 0 || c.tx_grid_cols <= 0 || c.rx_grid_rows <= 0 ||
      c.rx_grid_cols <= 0)
    fail("panel grid dimensions must be positive");
  if (c.gap_x < 0 || c.gap_y < 0) fail("panel gaps must be non-negative");
  if (c.frequencies.empty()) fail("frequency list must be non-empty");
  for (double f : c.frequencies)
    if (!(f > 0)) fail("frequencies must be positive");
  if (!std::is_sorted(c.frequencies.begin(), c.frequencies.end(),
                      std::less_equal<>()))
    fail("frequencies must be strictly increasing");
  if (!(c.design_frequency > 0)) fail("design frequency must be positive");
  if (c.roi.extent_x <= 0 || c.roi.extent_y <= 0)
    fail("ROI extents must be positive");
  if (c.roi.extent_z < 0) fail("ROI z extent must be non-negative");
  // The panels live in the z = 0 aperture plane; an ROI touching it would
  // make steering angles ill-defined.
  if (c.roi.z_min() <= 0.0)
    fail("ROI must lie strictly in front of the aperture plane z = 0");
}

}  // namespace

Scene Scene::build(const SceneConfig& config) {
  validate(config);
  Scene scene;
  scene.config_ = config;

  const double w = config.panel_cols * config.element_spacing;
  const double h = config.panel_rows * config.element_spacing;
  auto block_size = [&](int rows, int cols) {
    return std::pair<double, double>{cols * w + (cols - 1) * config.gap_x,
                                     rows * h + (rows - 1) * config.gap_y};
  };
  auto [tx_w, tx_h] = block_size(config.tx_grid_rows, config.tx_grid_cols);
  auto [rx_w, rx_h] = block_size(config.rx_grid_rows, config.rx_grid_cols);

  // Tx block on the left, Rx on the right, separated by one x gap; the
  // whole array is centered on the origin, each block centered in y.
  const double total_w = tx_w + config.gap_x + rx_w;
  const double tx_left = -total_w / 2;
  const double rx_left = tx_left + tx_w + config.gap_x;
  scene.tx_block_center_ = Vec3(tx_left + tx_w / 2, 0.0, 0.0);
  scene.rx_block_center_ = Vec3(rx_left + rx_w / 2, 0.0, 0.0);

  int id = 0;
  auto add_block = [&](Side side, int grid_rows, int grid_cols, double left,
                       double block_h) {
    for (int gr = 0; gr < grid_rows; ++gr) {
      for (int gc = 0; gc < grid_cols; ++gc) {
        RisPanel p;
        p.id = id++;
        p.side = side;
        p.rows = config.panel_rows;
        p.cols = config.panel_cols;
        p.spacing = config.element_spacing;
        p.center = Vec3(left + gc * (w + config.gap_x) + w / 2,
                        -block_h / 2 + gr * (h + config.gap_y) + h / 2, 0.0);
        scene.panels_.push_back(p);
      }
    }
  };
  add_block(Side::Tx, config.tx_grid_rows, config.tx_grid_cols, tx_left, tx_h);
  add_block(Side::Rx, config.rx_grid_rows, config.rx_grid_cols, rx_left, rx_h);

  for (const RisPanel& p : scene.panels_) {
    auto& dst = p.side == Side::Tx ? scene.tx_elements_ : scene.rx_elements_;
    for (int r = 0; r < p.rows; ++r)
      for (int c = 0; c < p.cols; ++c) dst.push_back(p.element_position(r, c));
  }
  return scene;
}

std::vector<const RisPanel*> Scene::side_panels(Side side) const {
  std::vector<const RisPanel*> out;
  for (const RisPanel& p : panels_)
    if (p.side == side) out.push_back(&p);
  return out;
}

std::size_t Scene::panel_count(Side side) const {
  return static_cast<std::size_t>(
      std::count_if(panels_.begin(), panels_.end(),
                    [&](const RisPanel& p) { return p.side == side; }));
}

TargetMap paper_target() {
  TargetMap t;
  for (double y : {1.4, 1.9, 2.4})
    for (double x : {-0.5, 0.0, 0.5})
      t.scatterers.push_back({Vec3(x, y, 8.0), Complex(1.0, 0.0)});
  return t;
}

TargetMap add_clutter(const TargetMap& target, double clutter_y,
                      Complex reflectivity) {
  TargetMap out = target;
  out.scatterers.push_back({Vec3(0.0, clutter_y, 8.0), reflectivity});
  return out;
}

TargetMap remove_clutter(const TargetMap& target) {
  TargetMap out = target;
  if (!out.scatterers.empty()) out.scatterers.pop_back();
  return out;
}

SteerAngles steering_to_point(const Vec3& reference, const Vec3& point) {
  const Vec3 d = point - reference;
  if (!(d.z() > 0))
    throw std::invalid_argument(
        "steering_to_point: point must lie in front of the aperture plane");
  const double rho = std::hypot(d.x(), d.y());
  // phi is the azimuth of the negated transverse direction: with the
  // e^{-ikd} propagation convention this makes the Eq.-1-form gradient
  // (positive sign) redirect the beam through `point`.
  return {std::atan2(rho, d.z()), std::atan2(-d.y(), -d.x())};
}

AngleBounds angle_bounds_from(const Vec3& reference, const RoiBox& roi) {
  const double x1 = roi.x_min(), x2 = roi.x_max();
  const double y1 = roi.y_min(), y2 = roi.y_max();
  const double cx = reference.x(), cy = reference.y();

  // Azimuth is ill-defined if the reference's boresight axis pierces the
  // ROI footprint (the ROI would subtend a full 2*pi azimuth range).
  if (cx >= x1 && cx <= x2 && cy >= y1 && cy <= y2)
    throw std::invalid_argument(
        "angle_bounds: reference boresight axis intersects the ROI footprint");

  std::array<double, 2> zfaces{roi.z_min(), roi.z_max()};
  const SteerAngles base = steering_to_point(reference, roi.center);

  AngleBounds b;
  b.base_theta = base.theta;
  b.base_phi = base.phi;
  b.theta_min = std::numeric_limits<double>::infinity();
  b.theta_max = -std::numeric_limits<double>::infinity();
  b.phi_min = std::numeric_limits<double>::infinity();
  b.phi_max = -std::numeric_limits<double>::infinity();

  // For a planar face at height h the angle extremes sit on the boundary:
  // theta is monotone in the transverse distance (min at the clamped
  // closest point, max at a corner) and the azimuth is monotone along
  // every edge, so the corners carry its extremes.
  const double rho_min = std::hypot(std::max({0.0, x1 - cx, cx - x2}),
                                    std::max({0.0, y1 - cy, cy - y2}));
  double rho_max = 0.0;
  for (double xc : {x1, x2})
    for (double yc : {y1, y2})
      rho_max = std::max(rho_max, std::hypot(xc - cx, yc - cy));

  for (double zf : zfaces) {
    const double hgt = zf - reference.z();
    if (!(hgt > 0))
      throw std::invalid_argument(
          "angle_bounds: ROI must lie in front of the reference plane");
    b.theta_min = std::min(b.theta_min, std::atan2(rho_min, hgt));
    b.theta_max = std::max(b.theta_max, std::atan2(rho_max, hgt));
  }
  for (double xc : {x1, x2}) {
    for (double yc : {y1, y2}) {
      const double phi = std::atan2(-(yc - cy), -(xc - cx));
      // Unwrap relative to the center azimuth so intervals never straddle
      // the atan2 branch cut.
      const double rel = wrap_phase(phi - base.phi);
      b.phi_min = std::min(b.phi_min, base.phi + rel);
      b.phi_max = std::max(b.phi_max, base.phi + rel);
    }
  }
  if (b.phi_span() >= kPi)
    throw std::invalid_argument(
        "angle_bounds: ROI subtends an ambiguous azimuth interval");
  return b;
}

AngleBounds angle_bounds(const RisPanel& panel, const RoiBox& roi) {
  return angle_bounds_from(panel.center, roi);
}

}  // namespace riscim
