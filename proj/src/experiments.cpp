#include "riscim/experiments.hpp"

#include <json.hpp>

#include <chrono>
#include <fstream>

#include "riscim/io.hpp"

namespace riscim {

namespace {

using ordered_json = nlohmann::ordered_json;

std::uint64_t substream(std::uint64_t root, const std::string& key) {
  return splitmix64(root ^ fnv1a64(key));
}

std::string hash_hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

ordered_json metrics_json(const ImageMetrics& m) {
  return {{"normalized_correlation", m.normalized_correlation},
          {"peak_localization_error_m", m.peak_localization_error},
          {"background_energy_ratio", m.background_energy_ratio},
          {"peaks_matched", m.peaks_matched}};
}

struct RunContext {
  const ExperimentConfig& cfg;
  Scene scene;
  std::filesystem::path out;
  std::uint64_t config_hash;
  Ledger ledger;

  RunContext(const ExperimentConfig& c, const std::filesystem::path& dir)
      : cfg(c),
        scene(Scene::build(c.scene)),
        out(dir),
        config_hash(fnv1a64(canonical_config(c))),
        ledger((ensure_directory(dir), dir / "metrics.jsonl")) {}

  ordered_json header(const std::string& experiment) const {
    return {{"record", "header"},
            {"experiment", experiment},
            {"config_hash", hash_hex(config_hash)},
            {"seed", cfg.seed}};
  }
};

MaskStrategy method_strategy(const ExperimentConfig& cfg,
                             const std::string& method) {
  MaskStrategy s = cfg.strategy;
  if (method == "proposed") {
    s.kind = MaskKind::FocusedSpeckle;
  } else if (method == "raster") {
    s.kind = MaskKind::RasterScan;
  } else if (method == "random") {
    s.kind = MaskKind::RandomPattern;
  } else {
    throw std::invalid_argument("unknown method " + method);
  }
  return s;
}

struct ImagedMethod {
  std::vector<Mask> masks;
  SensingMatrix h_fwd;   // on the scatterer locations
  SensingMatrix h_inv;   // on the ROI grid
  Measurement g;
  ReconResult recon;
  ImageMetrics metrics;
};

void write_image_artifacts(const CVector& sigma, const PlaneGrid& grid,
                           const std::filesystem::path& dir,
                           const std::string& stem,
                           std::map<std::string, std::string>& artifacts) {
  write_image_csv(sigma, grid, dir / (stem + "_image.csv"));
  write_magnitude_pgm(sigma, grid, dir / (stem + "_image.pgm"));
  artifacts["image_csv"] = stem + "_image.csv";
  artifacts["image_pgm"] = stem + "_image.pgm";
}

}  // namespace

Ledger::Ledger(const std::filesystem::path& path) : path_(path) {
  std::ofstream os(path_, std::ios::trunc);  // fresh file per run
  if (!os) throw IoError("cannot open ledger " + path_.string());
}

void Ledger::append(const std::string& json_line) {
  std::ofstream os(path_, std::ios::app);
  if (!os) throw IoError("cannot append to ledger " + path_.string());
  os << json_line << "\n";
}

// ---- compare -----------------------------------------------------------

ComparisonReport run_compare(const ExperimentConfig& cfg,
                             const std::filesystem::path& out_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  RunContext ctx(cfg, out_dir);
  ctx.ledger.append(ctx.header("compare").dump());

  const PlaneGrid grid = roi_grid(ctx.scene.roi(), cfg.inverse_nx, cfg.inverse_ny);
  std::vector<Vec3> fwd_points;
  for (const Scatterer& s : cfg.target.scatterers)
    fwd_points.push_back(s.position);

  const std::vector<std::string> methods{"proposed", "raster", "random"};
  std::map<std::string, ImagedMethod> runs;
  for (const std::string& m : methods) {
    ImagedMethod im;
    im.masks = make_masks(ctx.scene, method_strategy(cfg, m), cfg.mask_count,
                          substream(cfg.seed, "masks:" + m));
    im.h_fwd = build_sensing_matrix(ctx.scene, im.masks, fwd_points);
    im.h_inv = build_sensing_matrix(ctx.scene, im.masks, grid.points);
    runs[m] = std::move(im);
  }

  // One absolute noise floor for all methods, calibrated on the proposed
  // method's clean signal at the requested SNR.
  const double noise_power =
      signal_power(runs["proposed"].h_fwd, cfg.target) /
      std::pow(10.0, cfg.snr_db / 10.0);

  ComparisonReport report;
  report.config_hash = ctx.config_hash;
  for (const std::string& m : methods) {
    ImagedMethod& im = runs[m];
    const SeedRecord noise_seed{substream(cfg.seed, "noise:" + m), 0};
    Rng rng = Rng::for_stream(noise_seed);
    im.g = simulate_with_noise_power(im.h_fwd, cfg.target, noise_power, rng,
                                     noise_seed);
    im.recon = reconstruct_iterative(im.h_inv.entries, im.g.g, cfg.solver);
    im.metrics = compute_metrics(im.recon.sigma, cfg.target, grid);
  }

  auto emit = [&](const std::string& name, const ImageMetrics& metrics,
                  const ReconResult* recon, double snr_db,
                  std::map<std::string, std::string> artifacts) {
    MethodOutcome outcome;
    outcome.method = name;
    outcome.metrics = metrics;
    if (recon) outcome.recon = *recon;
    outcome.artifacts = std::move(artifacts);
    ordered_json rec{{"record", "method"},
                     {"experiment", "compare"},
                     {"method", name},
                     {"rows", runs["proposed"].h_inv.rows()},
                     {"snr_db", snr_db},
                     {"metrics", metrics_json(metrics)},
                     {"artifacts", outcome.artifacts}};
    if (recon) {
      rec["solver"] = recon_method_name(recon->method);
      rec["iterations"] = recon->iterations;
      rec["converged"] = recon->converged;
    }
    ctx.ledger.append(rec.dump());
    report.methods[name] = std::move(outcome);
  };

  // Proposed and random report their inverse-grid reconstructions.
  for (const std::string& m : {std::string("proposed"), std::string("random")}) {
    ImagedMethod& im = runs[m];
    std::map<std::string, std::string> artifacts;
    write_image_artifacts(im.recon.sigma, grid, ctx.out, m, artifacts);
    emit(m, im.metrics, &im.recon, im.g.snr_db, std::move(artifacts));
  }

  // Raster reports its classical readout: per scan position the mean
  // measured magnitude across the frequency rows, resampled onto the
  // inverse grid so the correlation is comparable across methods. The
  // CGS inversion of the same raster measurements is kept alongside.
  {
    ImagedMethod& rast = runs["raster"];
    const auto [rows, cols] =
        raster_grid_dims(ctx.scene.roi(), cfg.mask_count,
                         cfg.strategy.scan_rows, cfg.strategy.scan_cols);
    const RoiBox& roi = ctx.scene.roi();
    const double cw = roi.extent_x / cols, ch = roi.extent_y / rows;
    const PlaneGrid scan_grid =
        plane_grid(roi.x_min() + cw / 2, roi.x_max() - cw / 2, cols,
                   roi.y_min() + ch / 2, roi.y_max() - ch / 2, rows,
                   roi.center.z());
    const auto n_freq = static_cast<Eigen::Index>(ctx.scene.frequencies().size());
    CVector bf = CVector::Zero(rows * cols);
    for (int k = 0; k < cfg.mask_count; ++k) {
      double acc = 0.0;
      for (Eigen::Index f = 0; f < n_freq; ++f)
        acc += std::abs(rast.g.g[k * n_freq + f]);
      bf[k] = acc / static_cast<double>(n_freq);
    }
    CVector upsampled(static_cast<Eigen::Index>(grid.points.size()));
    for (std::size_t j = 0; j < grid.points.size(); ++j) {
      const Vec3& p = grid.points[j];
      const int ix = std::clamp(
          static_cast<int>(std::floor((p.x() - roi.x_min()) / cw)), 0, cols - 1);
      const int iy = std::clamp(
          static_cast<int>(std::floor((p.y() - roi.y_min()) / ch)), 0, rows - 1);
      upsampled[static_cast<Eigen::Index>(j)] = bf[iy * cols + ix];
    }
    std::map<std::string, std::string> artifacts;
    write_image_artifacts(upsampled, grid, ctx.out, "raster", artifacts);
    write_image_csv(bf, scan_grid, ctx.out / "raster_scan_image.csv");
    write_magnitude_pgm(bf, scan_grid, ctx.out / "raster_scan_image.pgm");
    artifacts["scan_image_csv"] = "raster_scan_image.csv";
    artifacts["scan_image_pgm"] = "raster_scan_image.pgm";
    emit("raster", compute_metrics(upsampled, cfg.target, grid), nullptr,
         rast.g.snr_db, std::move(artifacts));

    std::map<std::string, std::string> cgs_artifacts;
    write_image_artifacts(rast.recon.sigma, grid, ctx.out, "raster_cgs",
                          cgs_artifacts);
    emit("raster_cgs", rast.metrics, &rast.recon, rast.g.snr_db,
         std::move(cgs_artifacts));
  }

  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  ordered_json rep{{"experiment", "compare"},
                   {"config_hash", hash_hex(ctx.config_hash)},
                   {"runtime_seconds", report.runtime_seconds}};
  write_text_file(ctx.out / "report.json", rep.dump(2) + "\n");
  return report;
}

// ---- image -------------------------------------------------------------

MethodOutcome run_image(const ExperimentConfig& cfg,
                        const std::filesystem::path& out_dir) {
  RunContext ctx(cfg, out_dir);
  ctx.ledger.append(ctx.header("image").dump());

  const PlaneGrid grid = roi_grid(ctx.scene.roi(), cfg.inverse_nx, cfg.inverse_ny);
  std::vector<Vec3> fwd_points;
  for (const Scatterer& s : cfg.target.scatterers)
    fwd_points.push_back(s.position);

  const auto masks = make_masks(ctx.scene, cfg.strategy, cfg.mask_count,
                                substream(cfg.seed, "masks"));
  const SensingMatrix h_fwd = build_sensing_matrix(ctx.scene, masks, fwd_points);
  const SensingMatrix h_inv = build_sensing_matrix(ctx.scene, masks, grid.points);
  const SeedRecord noise_seed{substream(cfg.seed, "noise"), 0};
  Rng rng = Rng::for_stream(noise_seed);
  const Measurement g =
      simulate_measurement(h_fwd, cfg.target, cfg.snr_db, rng, noise_seed);
  const ReconResult recon = reconstruct_iterative(h_inv.entries, g.g, cfg.solver);

  MethodOutcome outcome;
  outcome.method = mask_kind_name(cfg.strategy.kind);
  outcome.metrics = compute_metrics(recon.sigma, cfg.target, grid);
  outcome.recon = recon;
  write_image_artifacts(recon.sigma, grid, ctx.out, "image", outcome.artifacts);
  save_matrix(h_inv, (ctx.out / "h_inv.bin").string());
  outcome.artifacts["h_inv"] = "h_inv.bin";

  ordered_json rec{{"record", "method"},
                   {"experiment", "image"},
                   {"method", outcome.method},
                   {"rows", h_inv.rows()},
                   {"cols", h_inv.cols()},
                   {"snr_db", cfg.snr_db},
                   {"solver", recon_method_name(recon.method)},
                   {"iterations", recon.iterations},
                   {"converged", recon.converged},
                   {"metrics", metrics_json(outcome.metrics)},
                   {"artifacts", outcome.artifacts}};
  ctx.ledger.append(rec.dump());
  return outcome;
}

// ---- svd study ----------------------------------------------------------

std::map<std::string, RVector> run_svd_study(
    const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
  RunContext ctx(cfg, out_dir);
  ctx.ledger.append(ctx.header("svd").dump());

  SceneConfig scene_cfg = cfg.scene;
  if (cfg.svd.single_frequency)
    scene_cfg.frequencies = {cfg.scene.design_frequency};
  const Scene scene = Scene::build(scene_cfg);
  const PlaneGrid grid = roi_grid(scene.roi(), cfg.inverse_nx, cfg.inverse_ny);

  std::vector<std::pair<std::string, MaskStrategy>> variants;
  {
    MaskStrategy offset_only = cfg.strategy;
    offset_only.kind = MaskKind::FocusedSpeckle;
    offset_only.randomize_angles = false;
    offset_only.randomize_offsets = true;
    MaskStrategy offset_angles = offset_only;
    offset_angles.randomize_angles = true;
    variants.emplace_back("offset_only", offset_only);
    variants.emplace_back("offset_angles", offset_angles);
    if (cfg.svd.include_random) {
      MaskStrategy random;
      random.kind = MaskKind::RandomPattern;
      variants.emplace_back("random_pattern", random);
    }
  }

  std::map<std::string, RVector> curves;
  for (const auto& [label, strategy] : variants) {
    const auto masks = make_masks(scene, strategy, cfg.svd.mask_count,
                                  substream(cfg.seed, "svd:" + label));
    const SensingMatrix h = build_sensing_matrix(scene, masks, grid.points);
    Eigen::BDCSVD<CMatrix> svd(h.entries);
    RVector s = svd.singularValues();
    if (s.size() > 0 && s[0] > 0) s /= s[0];
    curves[label] = s;

    auto at = [&](int one_based) {
      return one_based <= s.size() ? s[one_based - 1] : 0.0;
    };
    ordered_json rec{{"record", "curve"},
                     {"experiment", "svd"},
                     {"label", label},
                     {"rows", h.rows()},
                     {"sigma30", at(30)},
                     {"sigma36", at(36)},
                     {"sigma40", at(40)},
                     {"sigma60", at(60)},
                     {"ratio_40_30", at(30) > 0 ? at(40) / at(30) : 0.0}};
    ctx.ledger.append(rec.dump());
  }

  // All curves in one CSV, padded with zeros past each curve's length.
  Eigen::Index longest = 0;
  for (const auto& [label, s] : curves) longest = std::max(longest, s.size());
  std::ofstream os(ctx.out / "svd_curves.csv");
  if (!os) throw IoError("cannot open svd_curves.csv");
  os << "k";
  for (const auto& [label, s] : curves) os << "," << label;
  os << "\n";
  os.precision(17);
  for (Eigen::Index k = 0; k < longest; ++k) {
    os << (k + 1);
    for (const auto& [label, s] : curves)
      os << "," << (k < s.size() ? s[k] : 0.0);
    os << "\n";
  }
  return curves;
}

// ---- clutter study -------------------------------------------------------

ClutterStudyReport run_clutter_study(const ExperimentConfig& cfg,
                                     const std::filesystem::path& out_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  if (cfg.clutter_y.empty())
    throw ConfigError("clutter study: no clutter positions configured");
  RunContext ctx(cfg, out_dir);
  ctx.ledger.append(ctx.header("clutter").dump());

  const PlaneGrid grid = roi_grid(ctx.scene.roi(), cfg.inverse_nx, cfg.inverse_ny);
  std::vector<Vec3> fwd_points;
  for (const Scatterer& s : cfg.target.scatterers)
    fwd_points.push_back(s.position);

  ClutterStudyReport report;
  report.config_hash = ctx.config_hash;
  report.cases.resize(cfg.clutter_y.size());
  for (std::size_t i = 0; i < cfg.clutter_y.size(); ++i)
    report.cases[i].clutter_y = cfg.clutter_y[i];

  for (const std::string& m : {std::string("proposed"), std::string("random")}) {
    const auto masks =
        make_masks(ctx.scene, method_strategy(cfg, m), cfg.clutter_mask_count,
                   substream(cfg.seed, "masks:" + m));
    const SensingMatrix h_inv =
        build_sensing_matrix(ctx.scene, masks, grid.points);
    const SensingMatrix h_free =
        build_sensing_matrix(ctx.scene, masks, fwd_points);

    // Noise floor fixed per method from the clutter-free signal; adding
    // clutter must not rescale the receiver noise.
    const double noise_power = signal_power(h_free, cfg.target) /
                               std::pow(10.0, cfg.clutter_snr_db / 10.0);

    const SeedRecord base_seed{substream(cfg.seed, "clutter-noise:" + m + ":baseline"), 0};
    Rng base_rng = Rng::for_stream(base_seed);
    const Measurement g_free = simulate_with_noise_power(
        h_free, cfg.target, noise_power, base_rng, base_seed);
    const ReconResult base_recon =
        reconstruct_iterative(h_inv.entries, g_free.g, cfg.solver);
    const ImageMetrics base_metrics =
        compute_metrics(base_recon.sigma, cfg.target, grid);
    report.baseline[m] = base_metrics;
    {
      std::map<std::string, std::string> artifacts;
      write_image_artifacts(base_recon.sigma, grid, ctx.out, m + "_baseline",
                            artifacts);
      ordered_json rec{{"record", "baseline"},
                       {"experiment", "clutter"},
                       {"method", m},
                       {"snr_db", cfg.clutter_snr_db},
                       {"metrics", metrics_json(base_metrics)},
                       {"artifacts", artifacts}};
      ctx.ledger.append(rec.dump());
    }

    for (std::size_t i = 0; i < cfg.clutter_y.size(); ++i) {
      const double y = cfg.clutter_y[i];
      const TargetMap cluttered =
          add_clutter(cfg.target, y, cfg.clutter_reflectivity);
      std::vector<Vec3> ext_points = fwd_points;
      ext_points.push_back(cluttered.scatterers.back().position);
      const SensingMatrix h_ext =
          build_sensing_matrix(ctx.scene, masks, ext_points);

      char key[64];
      std::snprintf(key, sizeof(key), "clutter-noise:%s:y=%.9g", m.c_str(), y);
      const SeedRecord seed{substream(cfg.seed, key), 0};
      Rng rng = Rng::for_stream(seed);
      const Measurement g = simulate_with_noise_power(h_ext, cluttered,
                                                      noise_power, rng, seed);
      // The inverse grid still covers only the ROI: the clutter echo
      // enters purely as model mismatch.
      const ReconResult recon =
          reconstruct_iterative(h_inv.entries, g.g, cfg.solver);
      const ImageMetrics metrics = compute_metrics(recon.sigma, cfg.target, grid);
      const double drop =
          base_metrics.normalized_correlation - metrics.normalized_correlation;
      report.cases[i].methods[m] = metrics;
      report.cases[i].correlation_drop[m] = drop;

      char stem[64];
      std::snprintf(stem, sizeof(stem), "%s_clutter_y%g", m.c_str(), y);
      std::map<std::string, std::string> artifacts;
      write_image_artifacts(recon.sigma, grid, ctx.out, stem, artifacts);
      ordered_json rec{{"record", "case"},
                       {"experiment", "clutter"},
                       {"method", m},
                       {"clutter_y_m", y},
                       {"metrics", metrics_json(metrics)},
                       {"correlation_drop", drop},
                       {"artifacts", artifacts}};
      ctx.ledger.append(rec.dump());
    }
  }

  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  ordered_json rep{{"experiment", "clutter"},
                   {"config_hash", hash_hex(ctx.config_hash)},
                   {"runtime_seconds", report.runtime_seconds}};
  write_text_file(ctx.out / "report.json", rep.dump(2) + "\n");
  return report;
}

// ---- roi sweep ------------------------------------------------------------

namespace {

double intensity_fraction_inside(const RVector& intensity,
                                 const PlaneGrid& grid, const RoiBox& roi) {
  double inside = 0.0, total = 0.0;
  for (std::size_t i = 0; i < grid.points.size(); ++i) {
    total += intensity[static_cast<Eigen::Index>(i)];
    if (roi.contains_xy(grid.points[i].x(), grid.points[i].y()))
      inside += intensity[static_cast<Eigen::Index>(i)];
  }
  return total > 0 ? inside / total : 0.0;
}

Vec3 intensity_centroid(const RVector& intensity, const PlaneGrid& grid) {
  Vec3 acc = Vec3::Zero();
  double total = 0.0;
  for (std::size_t i = 0; i < grid.points.size(); ++i) {
    acc += intensity[static_cast<Eigen::Index>(i)] * grid.points[i];
    total += intensity[static_cast<Eigen::Index>(i)];
  }
  return total > 0 ? Vec3(acc / total) : Vec3::Zero();
}

std::string roi_key(const RoiBox& r) {
  ordered_json j{{"center_m", {r.center.x(), r.center.y(), r.center.z()}},
                 {"extent_x_m", r.extent_x},
                 {"extent_y_m", r.extent_y},
                 {"extent_z_m", r.extent_z}};
  return j.dump();
}

}  // namespace

std::vector<RoiSweepCase> run_roi_sweep(const ExperimentConfig& cfg,
                                        const std::filesystem::path& out_dir) {
  std::vector<RoiBox> rois = cfg.roi_sweep;
  if (rois.empty()) {
    // Default: three laterally shifted copies of the configured ROI.
    for (double dx : {-2.0, 0.0, 2.0}) {
      RoiBox r = cfg.scene.roi;
      r.center.x() += dx;
      rois.push_back(r);
    }
  }
  if (rois.size() < 2)
    throw ConfigError("roi-sweep needs at least two ROI definitions");

  RunContext ctx(cfg, out_dir);
  ctx.ledger.append(ctx.header("roi-sweep").dump());

  std::vector<RoiSweepCase> cases;
  std::vector<RVector> intensities;
  std::vector<PlaneGrid> grids;
  for (std::size_t i = 0; i < rois.size(); ++i) {
    // Masks are regenerated against each ROI (fresh angle bounds). The
    // stream is keyed by the ROI content so identical ROIs reproduce
    // identical patterns under one root seed.
    SceneConfig scfg = cfg.scene;
    scfg.roi = rois[i];
    const Scene scene = Scene::build(scfg);
    const auto masks =
        make_masks(scene, method_strategy(cfg, "proposed"), cfg.mask_count,
                   substream(cfg.seed, "roi:" + roi_key(rois[i])));
    const PlaneGrid window = window_grid(rois[i], cfg.fields.window_scale,
                                         cfg.fields.window_nx,
                                         cfg.fields.window_ny);
    RVector intensity =
        RVector::Zero(static_cast<Eigen::Index>(window.points.size()));
    for (const Mask& mask : masks) {
      const FieldMap f = aggregate_field(scene, mask, Side::Tx, window.points,
                                         scene.design_frequency());
      intensity += f.values.cwiseAbs2();
    }
    intensity /= static_cast<double>(masks.size());

    RoiSweepCase c;
    c.roi = rois[i];
    c.confinement = intensity_fraction_inside(intensity, window, rois[i]);
    c.centroid = intensity_centroid(intensity, window);
    c.centroid_inside = rois[i].contains_xy(c.centroid.x(), c.centroid.y());
    cases.push_back(c);
    intensities.push_back(std::move(intensity));
    grids.push_back(window);

    char stem[32];
    std::snprintf(stem, sizeof(stem), "roi%02zu", i);
    const CVector amplitude = intensities.back().cwiseSqrt().cast<Complex>();
    write_magnitude_pgm(amplitude, window, ctx.out / (std::string(stem) + "_pattern.pgm"));
    FieldMap fm;
    fm.points = window.points;
    fm.values = amplitude;
    fm.meta = {-1, scene.design_frequency(), Side::Tx};
    write_field_csv(fm, ctx.out / (std::string(stem) + "_pattern.csv"));
  }

  for (std::size_t i = 0; i < cases.size(); ++i) {
    // Cross-evaluation: each pattern measured against every ROI window.
    ordered_json cross = ordered_json::array();
    for (const RoiBox& other : rois)
      cross.push_back(intensity_fraction_inside(intensities[i], grids[i], other));
    char stem[32];
    std::snprintf(stem, sizeof(stem), "roi%02zu", i);
    ordered_json rec{{"record", "case"},
                     {"experiment", "roi-sweep"},
                     {"case", stem},
                     {"roi_center_m",
                      {cases[i].roi.center.x(), cases[i].roi.center.y(),
                       cases[i].roi.center.z()}},
                     {"confinement", cases[i].confinement},
                     {"confinement_vs_all", cross},
                     {"centroid_m",
                      {cases[i].centroid.x(), cases[i].centroid.y(),
                       cases[i].centroid.z()}},
                     {"centroid_inside", cases[i].centroid_inside}};
    ctx.ledger.append(rec.dump());
  }
  return cases;
}

// ---- fields gallery --------------------------------------------------------

void run_fields(const ExperimentConfig& cfg,
                const std::filesystem::path& out_dir) {
  RunContext ctx(cfg, out_dir);
  ctx.ledger.append(ctx.header("fields").dump());
  const Scene& scene = ctx.scene;
  const double f0 = scene.design_frequency();
  const PlaneGrid window = window_grid(scene.roi(), cfg.fields.window_scale,
                                       cfg.fields.window_nx, cfg.fields.window_ny);

  auto save_map = [&](const FieldMap& f, const std::string& stem) {
    write_field_csv(f, ctx.out / (stem + ".csv"));
    write_magnitude_pgm(f.values, window, ctx.out / (stem + ".pgm"));
    return stem;
  };

  MaskStrategy speckle = cfg.strategy;
  speckle.kind = MaskKind::FocusedSpeckle;

  if (cfg.fields.panels) {
    // One mask: per-panel beams and the interference speckle.
    const auto masks =
        make_masks(scene, speckle, 1, substream(cfg.seed, "fields:panels"));
    ordered_json files = ordered_json::array();
    for (const RisPanel* p : scene.side_panels(Side::Tx)) {
      char stem[48];
      std::snprintf(stem, sizeof(stem), "panel_%02d", p->id);
      files.push_back(
          save_map(panel_field(scene, masks[0], p->id, window.points, f0), stem));
    }
    const FieldMap agg = aggregate_field(scene, masks[0], Side::Tx,
                                         window.points, f0);
    files.push_back(save_map(agg, "aggregate"));
    ordered_json rec{{"record", "panels"},
                     {"experiment", "fields"},
                     {"frequency_hz", f0},
                     {"confinement", energy_fraction_inside(agg, scene.roi())},
                     {"files", files}};
    ctx.ledger.append(rec.dump());
  }

  auto variant_study = [&](const std::string& label, MaskStrategy strategy,
                           int count) {
    if (count <= 0) return;
    const auto masks = make_masks(scene, strategy, count,
                                  substream(cfg.seed, "fields:" + label));
    std::vector<FieldMap> maps;
    ordered_json files = ordered_json::array();
    for (int k = 0; k < count; ++k) {
      char stem[48];
      std::snprintf(stem, sizeof(stem), "%s_%02d", label.c_str(), k);
      maps.push_back(aggregate_field(scene, masks[static_cast<std::size_t>(k)],
                                     Side::Tx, window.points, f0));
      files.push_back(save_map(maps.back(), stem));
    }
    ordered_json corr = ordered_json::array();
    for (int a = 0; a < count; ++a)
      for (int b = a + 1; b < count; ++b)
        corr.push_back(pattern_correlation(maps[static_cast<std::size_t>(a)].values,
                                           maps[static_cast<std::size_t>(b)].values));
    ordered_json rec{{"record", label},
                     {"experiment", "fields"},
                     {"frequency_hz", f0},
                     {"pairwise_correlation", corr},
                     {"files", files}};
    ctx.ledger.append(rec.dump());
  };

  {
    MaskStrategy offsets_only = speckle;
    offsets_only.randomize_angles = false;
    offsets_only.randomize_offsets = true;
    variant_study("offsets", offsets_only, cfg.fields.offset_variants);
    MaskStrategy angles_only = speckle;
    angles_only.randomize_angles = true;
    angles_only.randomize_offsets = false;
    variant_study("angles", angles_only, cfg.fields.angle_variants);
  }

  if (cfg.fields.frequency_sweep) {
    const auto masks =
        make_masks(scene, speckle, 1, substream(cfg.seed, "fields:freq"));
    std::vector<FieldMap> maps;
    ordered_json files = ordered_json::array();
    for (double f : scene.frequencies()) {
      char stem[48];
      std::snprintf(stem, sizeof(stem), "freq_%.0fMHz", f / 1e6);
      maps.push_back(aggregate_field(scene, masks[0], Side::Tx, window.points, f));
      files.push_back(save_map(maps.back(), stem));
    }
    const double squint =
        maps.size() >= 2
            ? pattern_correlation(maps.front().values, maps.back().values)
            : 1.0;
    ordered_json rec{{"record", "frequency_sweep"},
                     {"experiment", "fields"},
                     {"frequencies_hz", scene.frequencies()},
                     {"edge_correlation", squint},
                     {"files", files}};
    ctx.ledger.append(rec.dump());
  }
}

// ---- masks runner ---------------------------------------------------------

void run_masks(const ExperimentConfig& cfg,
               const std::filesystem::path& out_dir) {
  RunContext ctx(cfg, out_dir);
  ctx.ledger.append(ctx.header("masks").dump());
  const auto masks = make_masks(ctx.scene, cfg.strategy, cfg.mask_count,
                                substream(cfg.seed, "masks"));
  save_masks(masks, (ctx.out / "masks.bin").string());
  ordered_json rec{{"record", "masks"},
                   {"experiment", "masks"},
                   {"strategy", mask_kind_name(cfg.strategy.kind)},
                   {"count", cfg.mask_count},
                   {"panels", ctx.scene.panels().size()},
                   {"artifacts", {{"container", "masks.bin"}}}};
  ctx.ledger.append(rec.dump());
}

}  // namespace riscim
