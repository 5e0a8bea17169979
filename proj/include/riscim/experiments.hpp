#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "riscim/recon.hpp"

namespace riscim {

struct FieldsConfig {
  // Which figure-style studies the `fields` run renders.
  bool panels = true;        // per-panel patterns + interference
  int offset_variants = 3;   // offset-only masks sharing angles
  int angle_variants = 3;    // angle-only masks, zero offsets
  bool frequency_sweep = true;
  double window_scale = 3.0;  // evaluation window relative to the ROI
  int window_nx = 121;
  int window_ny = 81;
};

struct SvdConfig {
  int mask_count = 60;
  bool single_frequency = true;  // design frequency only (mask diversity in
                                 // isolation); false = full frequency set
  bool include_random = false;   // add a RandomPattern curve
};

struct ExperimentConfig {
  SceneConfig scene;
  TargetMap target;  // defaults to paper_target()
  MaskStrategy strategy;
  int mask_count = 20;
  double snr_db = 20.0;
  std::uint64_t seed = 1;
  int inverse_nx = 31;
  int inverse_ny = 31;
  SolverOptions solver{ReconMethod::Cgnr, 1e-6, 25, 0.0};
  std::vector<double> clutter_y{3.0, 5.0, 10.0};
  Complex clutter_reflectivity{1.0, 0.0};
  double clutter_snr_db = 50.0;
  int clutter_mask_count = 30;
  std::vector<RoiBox> roi_sweep;
  FieldsConfig fields;
  SvdConfig svd;
};

/// Parse a JSON config (all keys optional; absent keys keep the
/// reference-configuration defaults). Throws ConfigError on bad input.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config_file(const std::string& path);
/// Canonical serialization used for the ledger config hash.
std::string canonical_config(const ExperimentConfig& config);

/// Deterministic one-record-per-line results log. Records carry the
/// config hash, seed, metrics and artifact paths only (no wall-clock
/// values), so identical runs produce byte-identical files.
class Ledger {
 public:
  explicit Ledger(const std::filesystem::path& path);
  void append(const std::string& json_line);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

struct MethodOutcome {
  std::string method;
  ImageMetrics metrics;
  ReconResult recon;
  std::map<std::string, std::string> artifacts;  // name -> relative path
};

struct ComparisonReport {
  std::map<std::string, MethodOutcome> methods;
  std::uint64_t config_hash = 0;
  double runtime_seconds = 0.0;
};

/// Fig.-9 protocol: proposed / raster / random under an identical
/// frequency grid, measurement budget, target and absolute noise power
/// (calibrated on the proposed method's clean signal at snr_db).
ComparisonReport run_compare(const ExperimentConfig& config,
                             const std::filesystem::path& out_dir);

/// Single-strategy imaging run (strategy/solver from the config).
MethodOutcome run_image(const ExperimentConfig& config,
                        const std::filesystem::path& out_dir);

/// Fig.-6 protocol: normalized singular-value curves for offset-only,
/// offset+angle and optionally random configurations over the ROI grid.
/// Returns normalized curves keyed by configuration label.
std::map<std::string, RVector> run_svd_study(
    const ExperimentConfig& config, const std::filesystem::path& out_dir);

struct ClutterCaseReport {
  double clutter_y = 0.0;
  std::map<std::string, ImageMetrics> methods;          // with clutter
  std::map<std::string, double> correlation_drop;       // baseline - cluttered
};

struct ClutterStudyReport {
  std::map<std::string, ImageMetrics> baseline;  // clutter-free
  std::vector<ClutterCaseReport> cases;
  std::uint64_t config_hash = 0;
  double runtime_seconds = 0.0;
};

/// Fig.-11 protocol: proposed vs random-pattern robustness to an
/// out-of-grid scatterer at (0, y, 8) for each configured y. Noise power
/// is calibrated per method on the clutter-free signal and held fixed.
ClutterStudyReport run_clutter_study(const ExperimentConfig& config,
                                     const std::filesystem::path& out_dir);

struct RoiSweepCase {
  RoiBox roi;
  double confinement = 0.0;  // energy fraction inside own ROI
  Vec3 centroid{0, 0, 0};
  bool centroid_inside = false;
};

/// Fig.-4 protocol: regenerate masks per ROI, render the aggregate
/// pattern, record confinement metrics.
std::vector<RoiSweepCase> run_roi_sweep(const ExperimentConfig& config,
                                        const std::filesystem::path& out_dir);

/// Fig.-3/5/7/8 analogue pattern gallery.
void run_fields(const ExperimentConfig& config,
                const std::filesystem::path& out_dir);

/// Generate masks per config and write the replay container + manifest.
void run_masks(const ExperimentConfig& config,
               const std::filesystem::path& out_dir);

}  // namespace riscim
