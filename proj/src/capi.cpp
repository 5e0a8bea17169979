#include "riscim/riscim.h"

#include <cmath>
#include <cstring>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "riscim/experiments.hpp"
#include "riscim/io.hpp"

using namespace riscim;

extern "C" {

struct riscim_scene {
  ExperimentConfig config;
  Scene scene;
};

struct riscim_masks {
  std::vector<Mask> masks;
};

struct riscim_matrix {
  SensingMatrix h;
};

}  // extern "C"

namespace {

thread_local std::string g_last_error;

riscim_status fail(riscim_status code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

template <typename Fn>
riscim_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    return fail(RISCIM_ERR_CONFIG, e.what());
  } catch (const IoError& e) {
    return fail(RISCIM_ERR_IO, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(RISCIM_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(RISCIM_ERR_RUNTIME, e.what());
  } catch (...) {
    return fail(RISCIM_ERR_RUNTIME, "unknown error");
  }
}

riscim_status require(bool ok, const char* what) {
  return ok ? RISCIM_OK : fail(RISCIM_ERR_INVALID_ARGUMENT, what);
}

Side to_side(riscim_side s) { return s == RISCIM_SIDE_RX ? Side::Rx : Side::Tx; }

}  // namespace

extern "C" {

const char* riscim_version(void) { return "1.0.0"; }

const char* riscim_last_error(void) { return g_last_error.c_str(); }

riscim_status riscim_scene_create(const char* config_json, riscim_scene** out) {
  if (auto st = require(out != nullptr, "out is null"); st != RISCIM_OK)
    return st;
  *out = nullptr;
  return guarded([&] {
    ExperimentConfig cfg =
        parse_config(config_json != nullptr ? std::string(config_json) : "");
    auto* handle = new riscim_scene{cfg, Scene::build(cfg.scene)};
    *out = handle;
    return RISCIM_OK;
  });
}

void riscim_scene_destroy(riscim_scene* scene) { delete scene; }

riscim_status riscim_scene_element_count(const riscim_scene* scene,
                                         riscim_side side, size_t* out) {
  if (auto st = require(scene && out, "null argument"); st != RISCIM_OK)
    return st;
  *out = scene->scene.element_count(to_side(side));
  return RISCIM_OK;
}

riscim_status riscim_scene_panel_count(const riscim_scene* scene,
                                       riscim_side side, size_t* out) {
  if (auto st = require(scene && out, "null argument"); st != RISCIM_OK)
    return st;
  *out = scene->scene.panel_count(to_side(side));
  return RISCIM_OK;
}

riscim_status riscim_scene_frequency_count(const riscim_scene* scene,
                                           size_t* out) {
  if (auto st = require(scene && out, "null argument"); st != RISCIM_OK)
    return st;
  *out = scene->scene.frequencies().size();
  return RISCIM_OK;
}

riscim_status riscim_masks_generate(const riscim_scene* scene,
                                    const riscim_mask_params* params,
                                    riscim_masks** out) {
  if (auto st = require(scene && params && out, "null argument");
      st != RISCIM_OK)
    return st;
  *out = nullptr;
  return guarded([&] {
    MaskStrategy strategy;
    switch (params->strategy) {
      case RISCIM_STRATEGY_FOCUSED_SPECKLE:
        strategy.kind = MaskKind::FocusedSpeckle;
        break;
      case RISCIM_STRATEGY_RASTER_SCAN:
        strategy.kind = MaskKind::RasterScan;
        break;
      case RISCIM_STRATEGY_RANDOM_PATTERN:
        strategy.kind = MaskKind::RandomPattern;
        break;
      default:
        return fail(RISCIM_ERR_INVALID_ARGUMENT, "unknown strategy");
    }
    if (params->c_max > 0) strategy.c_max = params->c_max;
    strategy.randomize_angles = params->randomize_angles != 0;
    strategy.randomize_offsets = params->randomize_offsets != 0;
    strategy.scan_rows = params->scan_rows;
    strategy.scan_cols = params->scan_cols;
    auto masks =
        make_masks(scene->scene, strategy, params->count, params->seed);
    *out = new riscim_masks{std::move(masks)};
    return RISCIM_OK;
  });
}

void riscim_masks_destroy(riscim_masks* masks) { delete masks; }

riscim_status riscim_masks_count(const riscim_masks* masks, size_t* out) {
  if (auto st = require(masks && out, "null argument"); st != RISCIM_OK)
    return st;
  *out = masks->masks.size();
  return RISCIM_OK;
}

riscim_status riscim_masks_save(const riscim_masks* masks, const char* path) {
  if (auto st = require(masks && path, "null argument"); st != RISCIM_OK)
    return st;
  return guarded([&] {
    save_masks(masks->masks, path);
    return RISCIM_OK;
  });
}

riscim_status riscim_masks_load(const riscim_scene* scene, const char* path,
                                riscim_masks** out) {
  if (auto st = require(scene && path && out, "null argument");
      st != RISCIM_OK)
    return st;
  *out = nullptr;
  return guarded([&] {
    *out = new riscim_masks{load_masks(scene->scene, path)};
    return RISCIM_OK;
  });
}

riscim_status riscim_matrix_build(const riscim_scene* scene,
                                  const riscim_masks* masks,
                                  const double* points_xyz, size_t n_points,
                                  riscim_matrix** out) {
  if (auto st = require(scene && masks && points_xyz && out && n_points > 0,
                        "null or empty argument");
      st != RISCIM_OK)
    return st;
  *out = nullptr;
  return guarded([&] {
    std::vector<Vec3> pts(n_points);
    for (size_t i = 0; i < n_points; ++i)
      pts[i] = Vec3(points_xyz[3 * i], points_xyz[3 * i + 1],
                    points_xyz[3 * i + 2]);
    *out = new riscim_matrix{
        build_sensing_matrix(scene->scene, masks->masks, pts)};
    return RISCIM_OK;
  });
}

void riscim_matrix_destroy(riscim_matrix* matrix) { delete matrix; }

riscim_status riscim_matrix_shape(const riscim_matrix* matrix, size_t* rows,
                                  size_t* cols) {
  if (auto st = require(matrix && rows && cols, "null argument");
      st != RISCIM_OK)
    return st;
  *rows = static_cast<size_t>(matrix->h.rows());
  *cols = static_cast<size_t>(matrix->h.cols());
  return RISCIM_OK;
}

riscim_status riscim_matrix_entries(const riscim_matrix* matrix,
                                    double* entries_interleaved) {
  if (auto st = require(matrix && entries_interleaved, "null argument");
      st != RISCIM_OK)
    return st;
  const CMatrix& h = matrix->h.entries;
  size_t k = 0;
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    for (Eigen::Index j = 0; j < h.cols(); ++j) {
      entries_interleaved[k++] = h(i, j).real();
      entries_interleaved[k++] = h(i, j).imag();
    }
  }
  return RISCIM_OK;
}

riscim_status riscim_matrix_save(const riscim_matrix* matrix,
                                 const char* path) {
  if (auto st = require(matrix && path, "null argument"); st != RISCIM_OK)
    return st;
  return guarded([&] {
    save_matrix(matrix->h, path);
    return RISCIM_OK;
  });
}

riscim_status riscim_matrix_load(const char* path, riscim_matrix** out) {
  if (auto st = require(path && out, "null argument"); st != RISCIM_OK)
    return st;
  *out = nullptr;
  return guarded([&] {
    *out = new riscim_matrix{load_matrix(path)};
    return RISCIM_OK;
  });
}

riscim_status riscim_simulate_measurement(const riscim_matrix* matrix,
                                          const double* scatterers,
                                          size_t n_scatterers, double snr_db,
                                          uint64_t seed, double* g_out) {
  if (auto st = require(matrix && scatterers && g_out && n_scatterers > 0,
                        "null or empty argument");
      st != RISCIM_OK)
    return st;
  return guarded([&] {
    TargetMap target;
    for (size_t i = 0; i < n_scatterers; ++i) {
      const double* s = scatterers + 5 * i;
      target.scatterers.push_back(
          {Vec3(s[0], s[1], s[2]), Complex(s[3], s[4])});
    }
    const SeedRecord rec{seed, 0};
    Rng rng = Rng::for_stream(rec);
    const Measurement m =
        simulate_measurement(matrix->h, target, snr_db, rng, rec);
    for (Eigen::Index i = 0; i < m.g.size(); ++i) {
      g_out[2 * i] = m.g[i].real();
      g_out[2 * i + 1] = m.g[i].imag();
    }
    return RISCIM_OK;
  });
}

riscim_status riscim_reconstruct(const riscim_matrix* matrix, const double* g,
                                 riscim_method method, double tol,
                                 int max_iter, double* sigma_out,
                                 int* iterations, int* converged) {
  if (auto st = require(matrix && g && sigma_out, "null argument");
      st != RISCIM_OK)
    return st;
  return guarded([&] {
    CVector gv(matrix->h.rows());
    for (Eigen::Index i = 0; i < gv.size(); ++i)
      gv[i] = Complex(g[2 * i], g[2 * i + 1]);
    ReconResult res;
    if (method == RISCIM_METHOD_MATCHED_FILTER) {
      res = reconstruct_matched_filter(matrix->h.entries, gv);
    } else {
      SolverOptions opt;
      opt.method =
          method == RISCIM_METHOD_CGS ? ReconMethod::Cgs : ReconMethod::Cgnr;
      if (tol > 0) opt.tol = tol;
      if (max_iter > 0) opt.max_iter = max_iter;
      res = reconstruct_iterative(matrix->h.entries, gv, opt);
    }
    for (Eigen::Index j = 0; j < res.sigma.size(); ++j) {
      sigma_out[2 * j] = res.sigma[j].real();
      sigma_out[2 * j + 1] = res.sigma[j].imag();
    }
    if (iterations) *iterations = res.iterations;
    if (converged) *converged = res.converged ? 1 : 0;
    return RISCIM_OK;
  });
}

riscim_status riscim_run(const char* kind, const char* config_json,
                         const riscim_run_options* options) {
  if (auto st = require(kind && options && options->out_dir,
                        "kind/options/out_dir must be non-null");
      st != RISCIM_OK)
    return st;
  return guarded([&] {
#ifdef _OPENMP
    if (options->threads > 0) omp_set_num_threads(options->threads);
#endif
    ExperimentConfig cfg =
        parse_config(config_json != nullptr ? std::string(config_json) : "");
    if (options->override_seed) cfg.seed = options->seed;
    const std::filesystem::path out(options->out_dir);
    const std::string k(kind);
    if (k == "masks") {
      run_masks(cfg, out);
    } else if (k == "fields") {
      run_fields(cfg, out);
    } else if (k == "svd") {
      run_svd_study(cfg, out);
    } else if (k == "image") {
      run_image(cfg, out);
    } else if (k == "compare") {
      run_compare(cfg, out);
    } else if (k == "clutter") {
      run_clutter_study(cfg, out);
    } else if (k == "roi-sweep") {
      run_roi_sweep(cfg, out);
    } else {
      return fail(RISCIM_ERR_INVALID_ARGUMENT, "unknown run kind: " + k);
    }
    return RISCIM_OK;
  });
}

}  // extern "C"
