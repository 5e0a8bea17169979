/* C interface to the riscim imaging simulator.
 *
 * All functions return riscim_status; RISCIM_OK is 0. On failure,
 * riscim_last_error() returns a thread-local message describing the most
 * recent error in the calling thread. Objects are opaque handles created
 * by *_create/*_build functions and released with the matching *_destroy
 * (destroy functions accept NULL).
 */
#ifndef RISCIM_RISCIM_H
#define RISCIM_RISCIM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RISCIM_API __declspec(dllexport)
#else
#define RISCIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum riscim_status {
  RISCIM_OK = 0,
  RISCIM_ERR_INVALID_ARGUMENT = 1,
  RISCIM_ERR_CONFIG = 2,
  RISCIM_ERR_IO = 3,
  RISCIM_ERR_RUNTIME = 4
} riscim_status;

typedef enum riscim_side { RISCIM_SIDE_TX = 0, RISCIM_SIDE_RX = 1 } riscim_side;

typedef enum riscim_strategy {
  RISCIM_STRATEGY_FOCUSED_SPECKLE = 0,
  RISCIM_STRATEGY_RASTER_SCAN = 1,
  RISCIM_STRATEGY_RANDOM_PATTERN = 2
} riscim_strategy;

typedef enum riscim_method {
  RISCIM_METHOD_CGNR = 0,
  RISCIM_METHOD_CGS = 1,
  RISCIM_METHOD_MATCHED_FILTER = 2
} riscim_method;

typedef struct riscim_scene riscim_scene;
typedef struct riscim_masks riscim_masks;
typedef struct riscim_matrix riscim_matrix;

RISCIM_API const char* riscim_version(void);
RISCIM_API const char* riscim_last_error(void);

/* ---- scene ---- */

/* config_json: full experiment config text (same schema as the CLI
 * --config file); NULL or "" builds the reference default scene. */
RISCIM_API riscim_status riscim_scene_create(const char* config_json,
                                             riscim_scene** out);
RISCIM_API void riscim_scene_destroy(riscim_scene* scene);
RISCIM_API riscim_status riscim_scene_element_count(const riscim_scene* scene,
                                                    riscim_side side,
                                                    size_t* out);
RISCIM_API riscim_status riscim_scene_panel_count(const riscim_scene* scene,
                                                  riscim_side side,
                                                  size_t* out);
RISCIM_API riscim_status riscim_scene_frequency_count(const riscim_scene* scene,
                                                      size_t* out);

/* ---- masks ---- */

typedef struct riscim_mask_params {
  riscim_strategy strategy;
  int count;
  double c_max;           /* <= 0 keeps the default 0.25 */
  int randomize_angles;   /* FocusedSpeckle only */
  int randomize_offsets;  /* FocusedSpeckle only */
  int scan_rows;          /* RasterScan only; 0 = auto */
  int scan_cols;
  uint64_t seed;
} riscim_mask_params;

RISCIM_API riscim_status riscim_masks_generate(const riscim_scene* scene,
                                               const riscim_mask_params* params,
                                               riscim_masks** out);
RISCIM_API void riscim_masks_destroy(riscim_masks* masks);
RISCIM_API riscim_status riscim_masks_count(const riscim_masks* masks,
                                            size_t* out);
RISCIM_API riscim_status riscim_masks_save(const riscim_masks* masks,
                                           const char* path);
RISCIM_API riscim_status riscim_masks_load(const riscim_scene* scene,
                                           const char* path,
                                           riscim_masks** out);

/* ---- sensing matrix / measurement / reconstruction ---- */

/* points_xyz: n_points triples (x, y, z) in meters. */
RISCIM_API riscim_status riscim_matrix_build(const riscim_scene* scene,
                                             const riscim_masks* masks,
                                             const double* points_xyz,
                                             size_t n_points,
                                             riscim_matrix** out);
RISCIM_API void riscim_matrix_destroy(riscim_matrix* matrix);
RISCIM_API riscim_status riscim_matrix_shape(const riscim_matrix* matrix,
                                             size_t* rows, size_t* cols);
/* entries_interleaved: 2*rows*cols doubles, row-major (re, im) pairs. */
RISCIM_API riscim_status riscim_matrix_entries(const riscim_matrix* matrix,
                                               double* entries_interleaved);
RISCIM_API riscim_status riscim_matrix_save(const riscim_matrix* matrix,
                                            const char* path);
RISCIM_API riscim_status riscim_matrix_load(const char* path,
                                            riscim_matrix** out);

/* scatterers: n_scatterers records of (x, y, z, re, im). snr_db may be
 * HUGE_VAL to disable noise. g_out: 2*rows doubles, (re, im) pairs. */
RISCIM_API riscim_status riscim_simulate_measurement(
    const riscim_matrix* matrix, const double* scatterers,
    size_t n_scatterers, double snr_db, uint64_t seed, double* g_out);

/* g: 2*rows doubles. sigma_out: 2*cols doubles. iterations/converged may
 * be NULL. tol <= 0 and max_iter <= 0 select the defaults (1e-6, 200). */
RISCIM_API riscim_status riscim_reconstruct(const riscim_matrix* matrix,
                                            const double* g,
                                            riscim_method method, double tol,
                                            int max_iter, double* sigma_out,
                                            int* iterations, int* converged);

/* ---- experiment runners (CLI back end) ---- */

typedef struct riscim_run_options {
  const char* out_dir;   /* required */
  uint64_t seed;         /* used when override_seed != 0 */
  int override_seed;
  int threads;           /* <= 0 keeps the OpenMP default */
} riscim_run_options;

/* kind: one of "masks", "fields", "svd", "image", "compare", "clutter",
 * "roi-sweep". config_json may be NULL/"" for defaults. */
RISCIM_API riscim_status riscim_run(const char* kind, const char* config_json,
                                    const riscim_run_options* options);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* RISCIM_RISCIM_H */
