#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "riscim/fields.hpp"

namespace riscim {

struct RowMeta {
  int mask_index = 0;
  double frequency = 0.0;
};

/// Linear map from grid reflectivities to measurements,
/// h(i, j) = E_tx^i(r_j) * E_rx^i(r_j). Rows are mask-major,
/// frequency-minor: row = mask_index * n_frequencies + frequency_index.
struct SensingMatrix {
  CMatrix entries;                // M x K
  std::vector<RowMeta> row_meta;  // length M
  std::vector<Vec3> grid;         // length K

  Eigen::Index rows() const { return entries.rows(); }
  Eigen::Index cols() const { return entries.cols(); }
};

SensingMatrix build_sensing_matrix(const Scene& scene,
                                   const std::vector<Mask>& masks,
                                   std::span<const Vec3> grid_points);

struct Measurement {
  CVector g;
  double snr_db = 0.0;
  SeedRecord noise_seed;
};

/// Reflectivity vector on the matrix grid: scatterers snap to the nearest
/// grid point (warning to stderr if the snap moves a scatterer by more
/// than `snap_warn_tol`). Throws if every scatterer lies outside the
/// grid's bounding box grown by one median grid pitch.
CVector project_targets(const SensingMatrix& h, const TargetMap& target,
                        double snap_warn_tol = 1e-9);

/// ||H sigma||^2 for the projected target.
double signal_power(const SensingMatrix& h, const TargetMap& target);

/// g = H sigma + n with n circular complex gaussian scaled so that
/// 10*log10(||H sigma||^2 / E||n||^2) = snr_db. A zero-signal target uses
/// the documented fallback reference ||s||^2 = M (unit average power per
/// measurement). snr_db = +infinity disables noise.
Measurement simulate_measurement(const SensingMatrix& h,
                                 const TargetMap& target, double snr_db,
                                 Rng& rng, SeedRecord noise_seed = {});

/// Same forward model with an explicitly fixed total noise power
/// E||n||^2 = noise_power (used by method comparisons where the noise
/// floor must not rescale per method).
Measurement simulate_with_noise_power(const SensingMatrix& h,
                                      const TargetMap& target,
                                      double noise_power, Rng& rng,
                                      SeedRecord noise_seed = {});

/// Binary container (magic RCIMTX01, little-endian, complex128 or
/// complex64 payload; layout documented in the README).
void save_matrix(const SensingMatrix& h, const std::string& path,
                 bool single_precision = false);
SensingMatrix load_matrix(const std::string& path);
void save_matrix_csv(const SensingMatrix& h, const std::string& path);

}  // namespace riscim
