/* Stable C interface of the blebsim shared library. */
#ifndef BLEBSIM_H
#define BLEBSIM_H

#include <stddef.h>
#include <stdint.h>

#if defined(BLEBSIM_BUILDING_LIBRARY)
#define BLEBSIM_API __attribute__((visibility("default")))
#else
#define BLEBSIM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum blebsim_status {
  BLEBSIM_OK = 0,
  BLEBSIM_ERR_CONFIG = 1,
  BLEBSIM_ERR_SOLVER = 2,
  BLEBSIM_ERR_IO = 3,
  BLEBSIM_ERR_PARSE = 4,
  BLEBSIM_ERR_VALIDATION = 5,
  BLEBSIM_ERR_INVALID_ARGUMENT = 6,
  BLEBSIM_ERR_INTERNAL = 7
} blebsim_status;

typedef struct blebsim_config blebsim_config;
typedef struct blebsim_run blebsim_run;

/* Receives progress lines; `user` is passed through unchanged. */
typedef void (*blebsim_log_fn)(const char* line, void* user);

BLEBSIM_API const char* blebsim_version(void);
/* Message of the last failed call on this thread; never NULL. */
BLEBSIM_API const char* blebsim_last_error(void);
BLEBSIM_API const char* blebsim_status_name(blebsim_status status);
/* Frees strings returned through char** out-parameters. */
BLEBSIM_API void blebsim_string_free(char* s);

/* Configuration */
BLEBSIM_API blebsim_status blebsim_config_default(blebsim_config** out);
/* JSON run configuration file. */
BLEBSIM_API blebsim_status blebsim_config_load(const char* path, blebsim_config** out);
BLEBSIM_API blebsim_status blebsim_config_from_json(const char* text, blebsim_config** out);
BLEBSIM_API void blebsim_config_free(blebsim_config* config);
BLEBSIM_API blebsim_status blebsim_config_to_json(const blebsim_config* config, char** out);
/* Applies experiment preset 1a, 1b, 2a, 2b, 3a, 3b, 3c or 4 in place. */
BLEBSIM_API blebsim_status blebsim_config_apply_experiment(blebsim_config* config, const char* id);
/* Dotted parameter path, e.g. "kinetics.C3" or "forces.magnitude". */
BLEBSIM_API blebsim_status blebsim_config_set(blebsim_config* config, const char* path, double value);
BLEBSIM_API blebsim_status blebsim_config_get(const blebsim_config* config, const char* path, double* value);
BLEBSIM_API blebsim_status blebsim_config_set_seed(blebsim_config* config, uint64_t seed);
BLEBSIM_API blebsim_status blebsim_config_set_steps(blebsim_config* config, int num_steps);
BLEBSIM_API blebsim_status blebsim_config_set_output_dir(blebsim_config* config, const char* dir);
BLEBSIM_API blebsim_status blebsim_config_set_logger(blebsim_config* config, blebsim_log_fn fn, void* user);

/* Mesh generation */
typedef struct blebsim_mesh_info {
  int vertices;
  int triangles;
  int surface_dofs;
  double area;
  double min_angle_deg;
  double max_edge;
} blebsim_mesh_info;

/* Generates the mesh and writes it to `path` when non-NULL. */
BLEBSIM_API blebsim_status blebsim_generate_mesh(const blebsim_config* config, const char* path,
                                                 blebsim_mesh_info* info);

/* Flow */
typedef struct blebsim_flow_info {
  double max_boundary_speed;
  double mean_speed;
  double pressure_residual;
  double velocity_residual;
  double flux_divergence_residual;
  int pressure_iterations;
} blebsim_flow_info;

/* Solves the flow and writes flow.vtk and trace.csv into `out_dir`. */
BLEBSIM_API blebsim_status blebsim_solve_flow(const blebsim_config* config, const char* out_dir,
                                              blebsim_flow_info* info);

/* Full runs */
typedef struct blebsim_metrics {
  double front_mean;
  double back_mean;
  double depleted_fraction;
  int interface_count;
  double interface_width;
  double mean_u;
  double min_u_all;
  double max_u_all;
  int steady_state;
  double steady_time;
  double max_boundary_speed;
} blebsim_metrics;

/* Runs into the configured output directory. On failure the returned
 * status describes the error and *out still receives the run handle when
 * a manifest was produced (NULL otherwise). */
BLEBSIM_API blebsim_status blebsim_run_simulation(const blebsim_config* config, blebsim_run** out);
BLEBSIM_API void blebsim_run_free(blebsim_run* run);
BLEBSIM_API blebsim_status blebsim_run_metrics(const blebsim_run* run, blebsim_metrics* out);
BLEBSIM_API blebsim_status blebsim_run_manifest_json(const blebsim_run* run, char** out);
BLEBSIM_API blebsim_status blebsim_run_directory(const blebsim_run* run, char** out);
BLEBSIM_API int blebsim_run_succeeded(const blebsim_run* run);

/* Sweep; *summary_path receives the path of the summary CSV. Individual run
 * failures are counted in *failed_runs. */
BLEBSIM_API blebsim_status blebsim_run_sweep(const blebsim_config* base, const char* path, const double* values,
                                             size_t count, int parallelism, char** summary_path, int* failed_runs);

/* Checks every checksum in dir/manifest.json; BLEBSIM_ERR_VALIDATION on a
 * mismatch. */
BLEBSIM_API blebsim_status blebsim_verify_manifest(const char* dir);

/* Renders the SVG plots of an existing run directory; *listing receives the
 * written paths, one per line. */
BLEBSIM_API blebsim_status blebsim_emit_plots(const char* run_dir, char** listing);

/* Nondimensionalisation of a JSON physical-parameter object (NULL for the
 * built-in reference set). */
BLEBSIM_API blebsim_status blebsim_nondim(const char* params_json, char** report_text, char** report_json);

/* Analytic oracle self-checks. *report is one line per check. Either output
 * may be NULL. */
BLEBSIM_API blebsim_status blebsim_oracle_check(uint64_t seed, int samples, char** report, int* all_passed);

/* Steady states of the reaction law at tangential speed w for the config's
 * kinetics, as JSON. */
BLEBSIM_API blebsim_status blebsim_phase_report(const blebsim_config* config, double w, char** out);

/* CSV `w,stable_roots,unstable_roots` over `points` equally spaced speeds in
 * [w_min, w_max]; multiple roots in one cell are separated by ';'. */
BLEBSIM_API blebsim_status blebsim_bifurcation_csv(const blebsim_config* config, double w_min, double w_max,
                                                   int points, char** out);

#ifdef __cplusplus
}
#endif

#endif /* BLEBSIM_H */
