#include "riscim/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <limits>

namespace riscim {

SensingMatrix build_sensing_matrix(const Scene& scene,
                                   const std::vector<Mask>& masks,
                                   std::span<const Vec3> grid_points) {
  if (masks.empty())
    throw std::invalid_argument("build_sensing_matrix: no masks");
  if (grid_points.empty())
    throw std::invalid_argument("build_sensing_matrix: empty grid");

  const auto& freqs = scene.frequencies();
  const auto n_masks = static_cast<Eigen::Index>(masks.size());
  const auto n_freq = static_cast<Eigen::Index>(freqs.size());
  const auto n_pts = static_cast<Eigen::Index>(grid_points.size());

  SensingMatrix h;
  h.entries.resize(n_masks * n_freq, n_pts);
  h.grid.assign(grid_points.begin(), grid_points.end());
  h.row_meta.resize(static_cast<std::size_t>(n_masks * n_freq));

  // Per frequency: the Green's tables are shared by every mask, and the
  // per-mask aggregate fields become weight-vector x table products
  // E = W^T G. Rows of W are filled in parallel (one sequential GEMV per
  // mask keeps results independent of the thread count).
  for (Eigen::Index fi = 0; fi < n_freq; ++fi) {
    const double f = freqs[static_cast<std::size_t>(fi)];
    const double k = wavenumber(f);
    const CMatrix g_tx = greens_table(scene.elements(Side::Tx), grid_points, k);
    const CMatrix g_rx = greens_table(scene.elements(Side::Rx), grid_points, k);
#pragma omp parallel for schedule(static)
    for (std::int64_t m = 0; m < n_masks; ++m) {
      const Mask& mask = masks[static_cast<std::size_t>(m)];
      const CVector w_tx = mask_weights(scene, mask, Side::Tx, f);
      const CVector w_rx = mask_weights(scene, mask, Side::Rx, f);
      const Eigen::Index row = m * n_freq + fi;  // mask-major, freq-minor
      h.entries.row(row) = (w_tx.transpose() * g_tx)
                               .cwiseProduct(w_rx.transpose() * g_rx);
      h.row_meta[static_cast<std::size_t>(row)] = {static_cast<int>(m), f};
    }
  }
  return h;
}

CVector project_targets(const SensingMatrix& h, const TargetMap& target,
                        double snap_warn_tol) {
  if (target.scatterers.empty())
    return CVector::Zero(h.cols());

  // Coverage box: grid bounding box grown by one median nearest-pitch.
  Vec3 lo = h.grid[0], hi = h.grid[0];
  for (const Vec3& p : h.grid) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  double pitch = 0.0;
  if (h.grid.size() > 1) {
    // median spacing estimate from a subsample of nearest neighbours
    std::vector<double> nn;
    const std::size_t step = std::max<std::size_t>(1, h.grid.size() / 64);
    for (std::size_t i = 0; i < h.grid.size(); i += step) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < h.grid.size(); ++j)
        if (j != i) best = std::min(best, (h.grid[i] - h.grid[j]).norm());
      nn.push_back(best);
    }
    std::nth_element(nn.begin(), nn.begin() + nn.size() / 2, nn.end());
    pitch = nn[nn.size() / 2];
  }
  const Vec3 margin = Vec3::Constant(pitch > 0 ? pitch : 1.0);
  const Vec3 clo = lo - margin, chi = hi + margin;

  CVector sigma = CVector::Zero(h.cols());
  bool any_covered = false;
  for (const Scatterer& s : target.scatterers) {
    Eigen::Index best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < h.grid.size(); ++j) {
      const double d = (h.grid[j] - s.position).norm();
      if (d < best_d) {
        best_d = d;
        best = static_cast<Eigen::Index>(j);
      }
    }
    const bool covered = (s.position.array() >= clo.array()).all() &&
                         (s.position.array() <= chi.array()).all();
    any_covered = any_covered || covered;
    if (best_d > snap_warn_tol)
      std::cerr << "[riscim] warning: scatterer (" << s.position.transpose()
                << ") snapped " << best_d << " m to the nearest grid point\n";
    sigma[best] += s.reflectivity;
  }
  if (!any_covered)
    throw std::invalid_argument(
        "project_targets: target lies entirely outside the grid coverage");
  return sigma;
}

double signal_power(const SensingMatrix& h, const TargetMap& target) {
  return (h.entries * project_targets(h, target)).squaredNorm();
}

namespace {

Measurement measure(const SensingMatrix& h, const TargetMap& target,
                    double noise_power, double snr_db_label, Rng& rng,
                    SeedRecord noise_seed) {
  Measurement m;
  m.snr_db = snr_db_label;
  m.noise_seed = noise_seed;
  m.g = h.entries * project_targets(h, target);
  if (noise_power > 0.0) {
    const double per_sample = noise_power / static_cast<double>(h.rows());
    const double scale = std::sqrt(per_sample);
    for (Eigen::Index i = 0; i < m.g.size(); ++i)
      m.g[i] += scale * rng.complex_gaussian();
  }
  return m;
}

}  // namespace

Measurement simulate_measurement(const SensingMatrix& h,
                                 const TargetMap& target, double snr_db,
                                 Rng& rng, SeedRecord noise_seed) {
  if (std::isinf(snr_db) && snr_db > 0)
    return measure(h, target, 0.0, snr_db, rng, noise_seed);
  double ref = (h.entries * project_targets(h, target)).squaredNorm();
  // Zero-signal convention: unit average power per measurement.
  if (ref <= 0.0) ref = static_cast<double>(h.rows());
  const double noise_power = ref / std::pow(10.0, snr_db / 10.0);
  return measure(h, target, noise_power, snr_db, rng, noise_seed);
}

Measurement simulate_with_noise_power(const SensingMatrix& h,
                                      const TargetMap& target,
                                      double noise_power, Rng& rng,
                                      SeedRecord noise_seed) {
  if (noise_power < 0.0)
    throw std::invalid_argument("simulate_with_noise_power: negative power");
  const double sig = (h.entries * project_targets(h, target)).squaredNorm();
  const double label =
      noise_power > 0.0 ? 10.0 * std::log10(sig / noise_power)
                        : std::numeric_limits<double>::infinity();
  return measure(h, target, noise_power, label, rng, noise_seed);
}

// ---- container ---------------------------------------------------------
//
// magic "RCIMTX01" | u8 dtype (0 = complex128, 1 = complex64)
// u32 rows | u32 cols | u8 has_grid
// per row: u32 mask_index | f64 frequency
// grid (if has_grid): cols * 3 f64
// entries row-major, interleaved (re, im), in the stored precision.

namespace {
constexpr char kMatrixMagic[8] = {'R', 'C', 'I', 'M', 'T', 'X', '0', '1'};

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

void save_matrix(const SensingMatrix& h, const std::string& path,
                 bool single_precision) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("save_matrix: cannot open " + path);
  os.write(kMatrixMagic, sizeof(kMatrixMagic));
  put<std::uint8_t>(os, single_precision ? 1 : 0);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(h.rows()));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(h.cols()));
  put<std::uint8_t>(os, h.grid.empty() ? 0 : 1);
  for (const RowMeta& rm : h.row_meta) {
    put<std::uint32_t>(os, static_cast<std::uint32_t>(rm.mask_index));
    put<double>(os, rm.frequency);
  }
  for (const Vec3& p : h.grid) {
    put<double>(os, p.x());
    put<double>(os, p.y());
    put<double>(os, p.z());
  }
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    for (Eigen::Index j = 0; j < h.cols(); ++j) {
      const Complex v = h.entries(i, j);
      if (single_precision) {
        put<float>(os, static_cast<float>(v.real()));
        put<float>(os, static_cast<float>(v.imag()));
      } else {
        put<double>(os, v.real());
        put<double>(os, v.imag());
      }
    }
  }
  if (!os) throw IoError("save_matrix: write failed for " + path);
}

SensingMatrix load_matrix(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("load_matrix: cannot open " + path);
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMatrixMagic, sizeof(magic)) != 0)
    throw IoError("load_matrix: bad magic in " + path);
  const auto dtype = get<std::uint8_t>(is);
  const auto rows = get<std::uint32_t>(is);
  const auto cols = get<std::uint32_t>(is);
  const auto has_grid = get<std::uint8_t>(is);
  SensingMatrix h;
  h.row_meta.resize(rows);
  for (auto& rm : h.row_meta) {
    rm.mask_index = static_cast<int>(get<std::uint32_t>(is));
    rm.frequency = get<double>(is);
  }
  if (has_grid) {
    h.grid.resize(cols);
    for (auto& p : h.grid) {
      const double x = get<double>(is), y = get<double>(is),
                   z = get<double>(is);
      p = Vec3(x, y, z);
    }
  }
  h.entries.resize(rows, cols);
  for (std::uint32_t i = 0; i < rows; ++i) {
    for (std::uint32_t j = 0; j < cols; ++j) {
      double re, im;
      if (dtype == 1) {
        re = get<float>(is);
        im = get<float>(is);
      } else {
        re = get<double>(is);
        im = get<double>(is);
      }
      h.entries(i, j) = Complex(re, im);
    }
  }
  if (!is) throw IoError("load_matrix: truncated file " + path);
  return h;
}

void save_matrix_csv(const SensingMatrix& h, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("save_matrix_csv: cannot open " + path);
  os << "row,mask_index,frequency_hz";
  for (Eigen::Index j = 0; j < h.cols(); ++j) os << ",re" << j << ",im" << j;
  os << "\n";
  os.precision(17);
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    const auto& rm = h.row_meta[static_cast<std::size_t>(i)];
    os << i << "," << rm.mask_index << "," << rm.frequency;
    for (Eigen::Index j = 0; j < h.cols(); ++j)
      os << "," << h.entries(i, j).real() << "," << h.entries(i, j).imag();
    os << "\n";
  }
}

}  // namespace riscim
