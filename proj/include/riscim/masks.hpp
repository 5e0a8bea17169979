#pragma once

#include <string>
#include <vector>

#include "riscim/rng.hpp"
#include "riscim/scene.hpp"

namespace riscim {

/// Per-panel applied phase pattern, wrapped to (-pi, pi]. Entry (r, c)
/// matches RisPanel::element_position(r, c).
struct PhaseProfile {
  int panel_id = 0;
  RMatrix phases;  // rows x cols, radians
};

/// One measurement configuration: a phase profile, steering angles and a
/// scalar offset for every panel of both sides.
struct Mask {
  std::vector<PhaseProfile> profiles;  // indexed by panel id
  std::vector<SteerAngles> steering;   // indexed by panel id
  std::vector<double> offsets;         // indexed by panel id
  SeedRecord seed;
};

enum class MaskKind { FocusedSpeckle, RasterScan, RandomPattern };

const char* mask_kind_name(MaskKind kind);
MaskKind mask_kind_from_name(const std::string& name);

struct MaskStrategy {
  MaskKind kind = MaskKind::FocusedSpeckle;
  // FocusedSpeckle knobs. c_max bounds the Eq.-2 scale factors C_theta,
  // C_phi; angle/offset randomization can be disabled independently to
  // isolate either diversity mechanism.
  double c_max = 0.25;
  bool randomize_angles = true;
  bool randomize_offsets = true;
  // RasterScan grid; 0 = derive rows x cols = count with near-square cells.
  int scan_rows = 0;
  int scan_cols = 0;
};

/// Compensation for the spherical wave accumulated from `source` to each
/// element: +k0*|source - element|, i.e. the negation of the propagation
/// phase, so compensated re-radiation is phase-aligned at broadside.
PhaseProfile compensation_phase(const RisPanel& panel, const Vec3& source,
                                double frequency);

/// Steering gradient k0*(x*sin(theta)*cos(phi) + y*sin(theta)*sin(phi))
/// evaluated on global element coordinates.
PhaseProfile steering_gradient(const RisPanel& panel, double theta, double phi,
                               double frequency);

struct RedirectionDraw {
  double theta_rnd = 0.0;  // C_theta * (theta_max - theta_min)
  double phi_rnd = 0.0;
  double sign_theta = 1.0;
  double sign_phi = 1.0;
  SteerAngles angles;  // base +/- rnd, clamped into the bounds
};

/// Perturbs the base (ROI-center) steering by a bounded random component:
/// theta_rnd = C*(theta_max - theta_min) with C uniform in [0, c_max],
/// signed symmetrically per axis; the result never leaves the bounds.
RedirectionDraw random_redirection(const AngleBounds& bounds, double c_max,
                                   Rng& rng);

/// Scan-grid factoring rows x cols = count; (0, 0) picks the factoring
/// whose cells are closest to square on this ROI.
std::pair<int, int> raster_grid_dims(const RoiBox& roi, int count,
                                     int rows = 0, int cols = 0);

/// Uniform scan positions (cell centers) over the ROI plane, row-major in
/// (y, x). rows and cols must multiply to count; pass 0 to auto-factor.
std::vector<Vec3> raster_scan_points(const RoiBox& roi, int count, int rows = 0,
                                     int cols = 0);

/// Generates `count` masks. FocusedSpeckle: per panel compensation +
/// randomized-steering gradient + scalar offset. RasterScan: one shared
/// array-center gradient per scan point, both sides, no offsets.
/// RandomPattern: i.i.d. uniform element phases. Mask k draws from the
/// (root_seed, k) stream, independent of count.
std::vector<Mask> make_masks(const Scene& scene, const MaskStrategy& strategy,
                             int count, std::uint64_t root_seed);

/// Compensation + gradient steering every panel of each side through
/// `point`, referenced to the side's block center so the side's beams add
/// coherently there (the Fig.-2c construction). No offsets.
Mask focus_mask(const Scene& scene, const Vec3& point);

/// Binary mask container (replay format, little-endian; layout documented
/// in the README).
void save_masks(const std::vector<Mask>& masks, const std::string& path);
std::vector<Mask> load_masks(const Scene& scene, const std::string& path);

}  // namespace riscim
