#include "riscim/fields.hpp"

#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace riscim {

Complex element_field(const Vec3& element_pos, double applied_phase,
                      Complex incident, const Vec3& point, double frequency) {
  const double d = (point - element_pos).norm();
  if (!(d > 0))
    throw std::invalid_argument("element_field: point coincides with element");
  const double k0 = wavenumber(frequency);
  return incident * std::polar(1.0, applied_phase) *
         (std::polar(1.0, -k0 * d) / d);
}

namespace {

// Flattened per-element applied phases of one side, matching the
// Scene::elements ordering (panel-major, then row-major).
std::vector<double> side_phases(const Scene& scene, const Mask& mask,
                                Side side) {
  std::vector<double> out;
  out.reserve(scene.element_count(side));
  for (const RisPanel* p : scene.side_panels(side)) {
    const RMatrix& ph = mask.profiles.at(p->id).phases;
    for (int r = 0; r < p->rows; ++r)
      for (int c = 0; c < p->cols; ++c) out.push_back(ph(r, c));
  }
  return out;
}

}  // namespace

CVector mask_weights(const Scene& scene, const Mask& mask, Side side,
                     double frequency) {
  const auto& elems = scene.elements(side);
  const Vec3 ant = scene.antenna(side);
  const double k0 = wavenumber(frequency);
  const auto phases = side_phases(scene, mask, side);
  CVector w(elems.size());
  for (std::size_t e = 0; e < elems.size(); ++e) {
    const double d = (elems[e] - ant).norm();
    w[static_cast<Eigen::Index>(e)] =
        std::polar(1.0 / d, -k0 * d + phases[e]);
  }
  return w;
}

CMatrix greens_table(std::span<const Vec3> elements,
                     std::span<const Vec3> points, double k) {
  CMatrix g(elements.size(), points.size());
  const auto np = static_cast<std::int64_t>(points.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t j = 0; j < np; ++j) {
    const Vec3 p = points[static_cast<std::size_t>(j)];
    for (std::size_t e = 0; e < elements.size(); ++e) {
      const double d = (p - elements[e]).norm();
      g(static_cast<Eigen::Index>(e), j) = std::polar(1.0 / d, -k * d);
    }
  }
  return g;
}

FieldMap panel_field(const Scene& scene, const Mask& mask, int panel_id,
                     std::span<const Vec3> points, double frequency) {
  if (points.empty())
    throw std::invalid_argument("panel_field: empty point list");
  const RisPanel& panel = scene.panel(panel_id);
  const Vec3 ant = scene.antenna(panel.side);
  const double k0 = wavenumber(frequency);
  const RMatrix& phases = mask.profiles.at(panel_id).phases;

  FieldMap out;
  out.points.assign(points.begin(), points.end());
  out.values = CVector::Zero(static_cast<Eigen::Index>(points.size()));
  out.meta = {-1, frequency, panel.side};

  const auto np = static_cast<std::int64_t>(points.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t j = 0; j < np; ++j) {
    const Vec3 p = points[static_cast<std::size_t>(j)];
    Complex acc = 0.0;
    for (int r = 0; r < panel.rows; ++r) {
      for (int c = 0; c < panel.cols; ++c) {
        const Vec3 e = panel.element_position(r, c);
        const double ds = (e - ant).norm();
        const Complex inc = std::polar(1.0 / ds, -k0 * ds);
        const double dp = (p - e).norm();
        acc += inc * std::polar(1.0, phases(r, c)) *
               (std::polar(1.0, -k0 * dp) / dp);
      }
    }
    out.values[j] = acc;
  }
  return out;
}

FieldMap aggregate_field(const Scene& scene, const Mask& mask, Side side,
                         std::span<const Vec3> points, double frequency) {
  if (points.empty())
    throw std::invalid_argument("aggregate_field: empty point list");
  const auto& elems = scene.elements(side);
  const CVector w = mask_weights(scene, mask, side, frequency);
  const double k0 = wavenumber(frequency);

  FieldMap out;
  out.points.assign(points.begin(), points.end());
  out.values = CVector::Zero(static_cast<Eigen::Index>(points.size()));
  out.meta = {-1, frequency, side};

  const auto np = static_cast<std::int64_t>(points.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t j = 0; j < np; ++j) {
    const Vec3 p = points[static_cast<std::size_t>(j)];
    Complex acc = 0.0;
    for (std::size_t e = 0; e < elems.size(); ++e) {
      const double d = (p - elems[e]).norm();
      acc += w[static_cast<Eigen::Index>(e)] * (std::polar(1.0, -k0 * d) / d);
    }
    out.values[j] = acc;
  }
  return out;
}

PlaneGrid plane_grid(double x0, double x1, int nx, double y0, double y1,
                     int ny, double z) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("plane_grid: nx, ny >= 1");
  PlaneGrid g;
  g.z = z;
  g.xs.resize(nx);
  g.ys.resize(ny);
  for (int i = 0; i < nx; ++i)
    g.xs[i] = nx == 1 ? (x0 + x1) / 2 : x0 + (x1 - x0) * i / (nx - 1);
  for (int j = 0; j < ny; ++j)
    g.ys[j] = ny == 1 ? (y0 + y1) / 2 : y0 + (y1 - y0) * j / (ny - 1);
  g.points.reserve(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) g.points.emplace_back(g.xs[i], g.ys[j], z);
  return g;
}

PlaneGrid roi_grid(const RoiBox& roi, int nx, int ny) {
  return plane_grid(roi.x_min(), roi.x_max(), nx, roi.y_min(), roi.y_max(), ny,
                    roi.center.z());
}

PlaneGrid window_grid(const RoiBox& roi, double scale, int nx, int ny) {
  const double wx = roi.extent_x * scale / 2, wy = roi.extent_y * scale / 2;
  return plane_grid(roi.center.x() - wx, roi.center.x() + wx, nx,
                    roi.center.y() - wy, roi.center.y() + wy, ny,
                    roi.center.z());
}

double pattern_correlation(const CVector& a, const CVector& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("pattern_correlation: size mismatch");
  const RVector ma = a.cwiseAbs(), mb = b.cwiseAbs();
  const double na = ma.norm(), nb = mb.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return ma.dot(mb) / (na * nb);
}

double energy_fraction_inside(const FieldMap& field, const RoiBox& roi) {
  double inside = 0.0, total = 0.0;
  for (Eigen::Index i = 0; i < field.values.size(); ++i) {
    const double e = std::norm(field.values[i]);
    total += e;
    const Vec3& p = field.points[static_cast<std::size_t>(i)];
    if (roi.contains_xy(p.x(), p.y())) inside += e;
  }
  return total > 0 ? inside / total : 0.0;
}

Vec3 energy_centroid(const FieldMap& field) {
  Vec3 acc = Vec3::Zero();
  double total = 0.0;
  for (Eigen::Index i = 0; i < field.values.size(); ++i) {
    const double e = std::norm(field.values[i]);
    acc += e * field.points[static_cast<std::size_t>(i)];
    total += e;
  }
  return total > 0 ? Vec3(acc / total) : Vec3::Zero();
}

}  // namespace riscim
