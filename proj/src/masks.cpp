#include "riscim/masks.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

namespace riscim {

const char* mask_kind_name(MaskKind kind) {
  switch (kind) {
    case MaskKind::FocusedSpeckle: return "focused_speckle";
    case MaskKind::RasterScan: return "raster_scan";
    case MaskKind::RandomPattern: return "random_pattern";
  }
  return "?";
}

MaskKind mask_kind_from_name(const std::string& name) {
  if (name == "focused_speckle") return MaskKind::FocusedSpeckle;
  if (name == "raster_scan") return MaskKind::RasterScan;
  if (name == "random_pattern") return MaskKind::RandomPattern;
  throw ConfigError("unknown mask strategy: " + name);
}

PhaseProfile compensation_phase(const RisPanel& panel, const Vec3& source,
                                double frequency) {
  if (std::abs(source.z() - panel.center.z()) < 1e-12)
    throw std::invalid_argument(
        "compensation_phase: source lies in the panel plane");
  const double k0 = wavenumber(frequency);
  PhaseProfile p;
  p.panel_id = panel.id;
  p.phases.resize(panel.rows, panel.cols);
  for (int r = 0; r < panel.rows; ++r)
    for (int c = 0; c < panel.cols; ++c)
      p.phases(r, c) =
          wrap_phase(k0 * (source - panel.element_position(r, c)).norm());
  return p;
}

PhaseProfile steering_gradient(const RisPanel& panel, double theta, double phi,
                               double frequency) {
  const double k0 = wavenumber(frequency);
  const double ux = std::sin(theta) * std::cos(phi);
  const double uy = std::sin(theta) * std::sin(phi);
  PhaseProfile p;
  p.panel_id = panel.id;
  p.phases.resize(panel.rows, panel.cols);
  for (int r = 0; r < panel.rows; ++r) {
    for (int c = 0; c < panel.cols; ++c) {
      const Vec3 e = panel.element_position(r, c);
      p.phases(r, c) = wrap_phase(k0 * (e.x() * ux + e.y() * uy));
    }
  }
  return p;
}

RedirectionDraw random_redirection(const AngleBounds& bounds, double c_max,
                                   Rng& rng) {
  if (c_max < 0.0 || c_max > 1.0)
    throw std::invalid_argument("random_redirection: c_max must be in [0, 1]");
  RedirectionDraw d;
  d.theta_rnd = rng.uniform(0.0, c_max) * bounds.theta_span();
  d.sign_theta = rng.sign();
  d.phi_rnd = rng.uniform(0.0, c_max) * bounds.phi_span();
  d.sign_phi = rng.sign();
  d.angles.theta = std::clamp(bounds.base_theta + d.sign_theta * d.theta_rnd,
                              bounds.theta_min, bounds.theta_max);
  d.angles.phi = std::clamp(bounds.base_phi + d.sign_phi * d.phi_rnd,
                            bounds.phi_min, bounds.phi_max);
  return d;
}

std::pair<int, int> raster_grid_dims(const RoiBox& roi, int count, int rows,
                                     int cols) {
  if (count < 1) throw std::invalid_argument("raster_grid_dims: count < 1");
  if (rows <= 0 || cols <= 0) {
    // Pick the factoring whose cells are closest to square.
    double best = std::numeric_limits<double>::infinity();
    for (int r = 1; r <= count; ++r) {
      if (count % r != 0) continue;
      const int c = count / r;
      const double cell_w = roi.extent_x / c, cell_h = roi.extent_y / r;
      const double badness = std::abs(std::log(cell_w / cell_h));
      if (badness < best) {
        best = badness;
        rows = r;
        cols = c;
      }
    }
  }
  if (rows * cols != count)
    throw std::invalid_argument(
        "raster_grid_dims: rows*cols must equal the scan count");
  return {rows, cols};
}

std::vector<Vec3> raster_scan_points(const RoiBox& roi, int count, int rows,
                                     int cols) {
  std::tie(rows, cols) = raster_grid_dims(roi, count, rows, cols);
  std::vector<Vec3> pts;
  pts.reserve(count);
  const double z = roi.center.z();
  for (int j = 0; j < rows; ++j)
    for (int i = 0; i < cols; ++i)
      pts.emplace_back(roi.x_min() + (i + 0.5) * roi.extent_x / cols,
                       roi.y_min() + (j + 0.5) * roi.extent_y / rows, z);
  return pts;
}

namespace {

PhaseProfile zero_profile(const RisPanel& panel) {
  PhaseProfile p;
  p.panel_id = panel.id;
  p.phases = RMatrix::Zero(panel.rows, panel.cols);
  return p;
}

void add_wrapped(PhaseProfile& dst, const PhaseProfile& src) {
  dst.phases = (dst.phases + src.phases)
                   .unaryExpr([](double x) { return wrap_phase(x); });
}

void add_scalar_wrapped(PhaseProfile& dst, double offset) {
  dst.phases = dst.phases.unaryExpr(
      [offset](double x) { return wrap_phase(x + offset); });
}

Mask empty_mask(const Scene& scene, SeedRecord seed) {
  Mask m;
  m.seed = seed;
  m.profiles.reserve(scene.panels().size());
  for (const RisPanel& p : scene.panels()) m.profiles.push_back(zero_profile(p));
  m.steering.assign(scene.panels().size(), SteerAngles{});
  m.offsets.assign(scene.panels().size(), 0.0);
  return m;
}

Mask focused_speckle_mask(const Scene& scene, const MaskStrategy& strategy,
                          SeedRecord seed) {
  Mask m = empty_mask(scene, seed);
  Rng rng = Rng::for_stream(seed);
  const double f0 = scene.design_frequency();
  for (const RisPanel& p : scene.panels()) {
    const AngleBounds bounds = angle_bounds(p, scene.roi());
    SteerAngles angles{bounds.base_theta, bounds.base_phi};
    if (strategy.randomize_angles)
      angles = random_redirection(bounds, strategy.c_max, rng).angles;
    const double offset =
        strategy.randomize_offsets ? rng.uniform(0.0, kTwoPi) : 0.0;
    PhaseProfile prof = compensation_phase(p, scene.antenna(p.side), f0);
    add_wrapped(prof, steering_gradient(p, angles.theta, angles.phi, f0));
    add_scalar_wrapped(prof, offset);
    m.profiles[p.id] = std::move(prof);
    m.steering[p.id] = angles;
    m.offsets[p.id] = offset;
  }
  return m;
}

Mask random_pattern_mask(const Scene& scene, SeedRecord seed) {
  Mask m = empty_mask(scene, seed);
  Rng rng = Rng::for_stream(seed);
  for (const RisPanel& p : scene.panels()) {
    RMatrix& ph = m.profiles[p.id].phases;
    for (int r = 0; r < p.rows; ++r)
      for (int c = 0; c < p.cols; ++c)
        ph(r, c) = wrap_phase(rng.uniform(0.0, kTwoPi));
  }
  return m;
}

// Shared gradient for one scan point, referenced to `reference`; applied
// on global element coordinates so all panels of a side form one
// coherently phased aperture.
Mask pointed_mask(const Scene& scene, const Vec3& point,
                  const Vec3& tx_reference, const Vec3& rx_reference,
                  SeedRecord seed) {
  Mask m = empty_mask(scene, seed);
  const double f0 = scene.design_frequency();
  const SteerAngles tx = steering_to_point(tx_reference, point);
  const SteerAngles rx = steering_to_point(rx_reference, point);
  for (const RisPanel& p : scene.panels()) {
    const SteerAngles a = p.side == Side::Tx ? tx : rx;
    PhaseProfile prof = compensation_phase(p, scene.antenna(p.side), f0);
    add_wrapped(prof, steering_gradient(p, a.theta, a.phi, f0));
    m.profiles[p.id] = std::move(prof);
    m.steering[p.id] = a;
  }
  return m;
}

}  // namespace

std::vector<Mask> make_masks(const Scene& scene, const MaskStrategy& strategy,
                             int count, std::uint64_t root_seed) {
  if (count < 1) throw std::invalid_argument("make_masks: count must be >= 1");
  std::vector<Mask> masks;
  masks.reserve(count);
  switch (strategy.kind) {
    case MaskKind::FocusedSpeckle:
      for (int k = 0; k < count; ++k)
        masks.push_back(focused_speckle_mask(scene, strategy,
                                             {root_seed, std::uint64_t(k)}));
      break;
    case MaskKind::RandomPattern:
      for (int k = 0; k < count; ++k)
        masks.push_back(
            random_pattern_mask(scene, {root_seed, std::uint64_t(k)}));
      break;
    case MaskKind::RasterScan: {
      const auto points = raster_scan_points(scene.roi(), count,
                                             strategy.scan_rows,
                                             strategy.scan_cols);
      // Both sides share the array-center steering direction so that a
      // raster mask carries one scan direction (Tx steering == Rx
      // steering).
      const Vec3 origin(0.0, 0.0, 0.0);
      for (int k = 0; k < count; ++k)
        masks.push_back(pointed_mask(scene, points[k], origin, origin,
                                     {root_seed, std::uint64_t(k)}));
      break;
    }
  }
  return masks;
}

Mask focus_mask(const Scene& scene, const Vec3& point) {
  return pointed_mask(scene, point, scene.block_center(Side::Tx),
                      scene.block_center(Side::Rx), {0, 0});
}

// ---- replay container -------------------------------------------------
//
// magic "RCIMSK01" | u32 mask_count | u32 panel_count | u64 root_seed
// then per mask: u64 stream
//   per panel: u32 panel_id | u32 rows | u32 cols
//              f64 theta | f64 phi | f64 offset | f64 phases[rows*cols]
// All integers little-endian, phases row-major.

namespace {
constexpr char kMaskMagic[8] = {'R', 'C', 'I', 'M', 'S', 'K', '0', '1'};

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}
}  // namespace

void save_masks(const std::vector<Mask>& masks, const std::string& path) {
  if (masks.empty()) throw std::invalid_argument("save_masks: empty mask list");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("save_masks: cannot open " + path);
  os.write(kMaskMagic, sizeof(kMaskMagic));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(masks.size()));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(masks[0].profiles.size()));
  put<std::uint64_t>(os, masks[0].seed.root_seed);
  for (const Mask& m : masks) {
    put<std::uint64_t>(os, m.seed.stream);
    for (std::size_t pid = 0; pid < m.profiles.size(); ++pid) {
      const PhaseProfile& p = m.profiles[pid];
      put<std::uint32_t>(os, static_cast<std::uint32_t>(p.panel_id));
      put<std::uint32_t>(os, static_cast<std::uint32_t>(p.phases.rows()));
      put<std::uint32_t>(os, static_cast<std::uint32_t>(p.phases.cols()));
      put<double>(os, m.steering[pid].theta);
      put<double>(os, m.steering[pid].phi);
      put<double>(os, m.offsets[pid]);
      for (Eigen::Index r = 0; r < p.phases.rows(); ++r)
        for (Eigen::Index c = 0; c < p.phases.cols(); ++c)
          put<double>(os, p.phases(r, c));
    }
  }
  if (!os) throw IoError("save_masks: write failed for " + path);
}

std::vector<Mask> load_masks(const Scene& scene, const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("load_masks: cannot open " + path);
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMaskMagic, sizeof(magic)) != 0)
    throw IoError("load_masks: bad magic in " + path);
  const auto n_masks = get<std::uint32_t>(is);
  const auto n_panels = get<std::uint32_t>(is);
  const auto root_seed = get<std::uint64_t>(is);
  if (n_panels != scene.panels().size())
    throw IoError("load_masks: panel count does not match the scene");
  std::vector<Mask> masks;
  masks.reserve(n_masks);
  for (std::uint32_t k = 0; k < n_masks; ++k) {
    Mask m = Mask{};
    m.seed = {root_seed, get<std::uint64_t>(is)};
    m.profiles.resize(n_panels);
    m.steering.resize(n_panels);
    m.offsets.resize(n_panels);
    for (std::uint32_t j = 0; j < n_panels; ++j) {
      const auto panel_id = get<std::uint32_t>(is);
      const auto rows = get<std::uint32_t>(is);
      const auto cols = get<std::uint32_t>(is);
      if (panel_id >= n_panels) throw IoError("load_masks: panel id out of range");
      const RisPanel& p = scene.panel(static_cast<int>(panel_id));
      if (static_cast<int>(rows) != p.rows || static_cast<int>(cols) != p.cols)
        throw IoError("load_masks: profile shape does not match the scene");
      PhaseProfile prof;
      prof.panel_id = static_cast<int>(panel_id);
      m.steering[panel_id].theta = get<double>(is);
      m.steering[panel_id].phi = get<double>(is);
      m.offsets[panel_id] = get<double>(is);
      prof.phases.resize(rows, cols);
      for (std::uint32_t r = 0; r < rows; ++r)
        for (std::uint32_t c = 0; c < cols; ++c)
          prof.phases(r, c) = get<double>(is);
      m.profiles[panel_id] = std::move(prof);
    }
    if (!is) throw IoError("load_masks: truncated file " + path);
    masks.push_back(std::move(m));
  }
  return masks;
}

}  // namespace riscim
