#include "blebsim/blebsim.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include <json.hpp>

#include "blebsim/config.hpp"
#include "blebsim/error.hpp"
#include "blebsim/harness.hpp"
#include "blebsim/kinetics.hpp"
#include "blebsim/nondim.hpp"
#include "blebsim/oracles.hpp"
#include "blebsim/output.hpp"
#include "blebsim/plots.hpp"

struct blebsim_config {
  blebsim::RunConfig config;
  blebsim_log_fn log_fn = nullptr;
  void* log_user = nullptr;

  blebsim::Logger logger() const {
    if (!log_fn) return {};
    return [fn = log_fn, user = log_user](const std::string& s) { fn(s.c_str(), user); };
  }
};

struct blebsim_run {
  blebsim::RunManifest manifest;
};

namespace {

thread_local std::string g_last_error;

blebsim_status fail(blebsim_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

// Maps the exception currently being handled to a status code.
blebsim_status translate() {
  try {
    throw;
  } catch (const blebsim::ConfigError& e) {
    return fail(BLEBSIM_ERR_CONFIG, e.what());
  } catch (const blebsim::SolverError& e) {
    return fail(BLEBSIM_ERR_SOLVER, e.what());
  } catch (const blebsim::ParseError& e) {
    return fail(BLEBSIM_ERR_PARSE, e.what());
  } catch (const blebsim::IoError& e) {
    return fail(BLEBSIM_ERR_IO, e.what());
  } catch (const blebsim::ValidationError& e) {
    return fail(BLEBSIM_ERR_VALIDATION, e.what());
  } catch (const std::bad_alloc&) {
    return fail(BLEBSIM_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(BLEBSIM_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(BLEBSIM_ERR_INTERNAL, "unknown error");
  }
}

template <class F>
blebsim_status guarded(F&& f) {
  try {
    f();
    return BLEBSIM_OK;
  } catch (...) {
    return translate();
  }
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

#define BLEBSIM_REQUIRE(cond, what) \
  if (!(cond)) return fail(BLEBSIM_ERR_INVALID_ARGUMENT, what)

}  // namespace

extern "C" {

const char* blebsim_version(void) { return blebsim::version_string(); }

const char* blebsim_last_error(void) { return g_last_error.c_str(); }

const char* blebsim_status_name(blebsim_status status) {
  switch (status) {
    case BLEBSIM_OK: return "ok";
    case BLEBSIM_ERR_CONFIG: return "config error";
    case BLEBSIM_ERR_SOLVER: return "solver failure";
    case BLEBSIM_ERR_IO: return "i/o error";
    case BLEBSIM_ERR_PARSE: return "parse error";
    case BLEBSIM_ERR_VALIDATION: return "validation error";
    case BLEBSIM_ERR_INVALID_ARGUMENT: return "invalid argument";
    case BLEBSIM_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void blebsim_string_free(char* s) { std::free(s); }

blebsim_status blebsim_config_default(blebsim_config** out) {
  BLEBSIM_REQUIRE(out, "out is NULL");
  return guarded([&] { *out = new blebsim_config{blebsim::default_config()}; });
}

blebsim_status blebsim_config_load(const char* path, blebsim_config** out) {
  BLEBSIM_REQUIRE(path && out, "path or out is NULL");
  return guarded([&] { *out = new blebsim_config{blebsim::load_run_config(path)}; });
}

blebsim_status blebsim_config_from_json(const char* text, blebsim_config** out) {
  BLEBSIM_REQUIRE(text && out, "text or out is NULL");
  return guarded([&] { *out = new blebsim_config{blebsim::run_config_from_json(text)}; });
}

void blebsim_config_free(blebsim_config* config) { delete config; }

blebsim_status blebsim_config_to_json(const blebsim_config* config, char** out) {
  BLEBSIM_REQUIRE(config && out, "config or out is NULL");
  return guarded([&] { *out = dup(blebsim::to_json(config->config)); });
}

blebsim_status blebsim_config_apply_experiment(blebsim_config* config, const char* id) {
  BLEBSIM_REQUIRE(config && id, "config or id is NULL");
  return guarded([&] {
    blebsim::RunConfig c = blebsim::experiment_config(id, config->config);
    c.output_dir = config->config.output_dir;
    config->config = std::move(c);
  });
}

blebsim_status blebsim_config_set(blebsim_config* config, const char* path, double value) {
  BLEBSIM_REQUIRE(config && path, "config or path is NULL");
  return guarded([&] { blebsim::set_parameter(config->config, path, value); });
}

blebsim_status blebsim_config_get(const blebsim_config* config, const char* path, double* value) {
  BLEBSIM_REQUIRE(config && path && value, "config, path or value is NULL");
  return guarded([&] { *value = blebsim::get_parameter(config->config, path); });
}

blebsim_status blebsim_config_set_seed(blebsim_config* config, uint64_t seed) {
  BLEBSIM_REQUIRE(config, "config is NULL");
  config->config.time.seed = seed;
  return BLEBSIM_OK;
}

blebsim_status blebsim_config_set_steps(blebsim_config* config, int num_steps) {
  BLEBSIM_REQUIRE(config, "config is NULL");
  if (num_steps < 1) return fail(BLEBSIM_ERR_CONFIG, "num_steps must be >= 1");
  config->config.time.num_steps = num_steps;
  return BLEBSIM_OK;
}

blebsim_status blebsim_config_set_output_dir(blebsim_config* config, const char* dir) {
  BLEBSIM_REQUIRE(config && dir, "config or dir is NULL");
  if (!*dir) return fail(BLEBSIM_ERR_CONFIG, "output directory must not be empty");
  config->config.output_dir = dir;
  return BLEBSIM_OK;
}

blebsim_status blebsim_config_set_logger(blebsim_config* config, blebsim_log_fn fn, void* user) {
  BLEBSIM_REQUIRE(config, "config is NULL");
  config->log_fn = fn;
  config->log_user = user;
  return BLEBSIM_OK;
}

blebsim_status blebsim_generate_mesh(const blebsim_config* config, const char* path, blebsim_mesh_info* info) {
  BLEBSIM_REQUIRE(config, "config is NULL");
  return guarded([&] {
    config->config.domain.validate();
    const blebsim::Mesh2D mesh = blebsim::generate_mesh(config->config.domain);
    const blebsim::SurfaceMesh surface = blebsim::extract_surface(mesh, config->config.domain);
    if (path) blebsim::write_text_file(path, blebsim::format_mesh(mesh));
    if (info) {
      info->vertices = mesh.num_vertices();
      info->triangles = mesh.num_triangles();
      info->surface_dofs = surface.num_dofs();
      info->area = mesh.total_area();
      info->min_angle_deg = mesh.quality().min_angle_deg;
      info->max_edge = mesh.quality().max_edge;
    }
  });
}

blebsim_status blebsim_solve_flow(const blebsim_config* config, const char* out_dir, blebsim_flow_info* info) {
  BLEBSIM_REQUIRE(config, "config is NULL");
  return guarded([&] {
    const auto& c = config->config;
    c.validate();
    const blebsim::Mesh2D mesh = blebsim::generate_mesh(c.domain);
    const blebsim::SurfaceMesh surface = blebsim::extract_surface(mesh, c.domain);
    c.force.validate(mesh);
    blebsim::FlowOptions fo;
    fo.pressure.tol = c.flow_tol;
    fo.velocity.tol = c.flow_tol;
    const blebsim::FlowField flow = blebsim::solve_flow(mesh, surface, c.force, fo);
    if (out_dir) {
      const std::filesystem::path dir(out_dir);
      blebsim::write_text_file(dir / "flow.vtk", blebsim::format_flow_vtk(mesh, flow));
      blebsim::write_text_file(dir / "trace.csv", blebsim::format_trace_csv(surface, flow.boundary_trace));
    }
    if (info) {
      const auto& d = flow.diagnostics;
      info->max_boundary_speed = d.max_boundary_speed;
      info->mean_speed = d.mean_speed;
      info->pressure_residual = d.pressure.relative_residual;
      info->velocity_residual = d.velocity.relative_residual;
      info->flux_divergence_residual = d.flux_divergence_residual;
      info->pressure_iterations = d.pressure.iterations;
    }
  });
}

blebsim_status blebsim_run_simulation(const blebsim_config* config, blebsim_run** out) {
  BLEBSIM_REQUIRE(config && out, "config or out is NULL");
  *out = nullptr;
  return guarded([&] {
    auto run = std::make_unique<blebsim_run>();
    run->manifest = blebsim::run_experiment_recorded(config->config, config->logger());
    const std::exception_ptr e = run->manifest.exception;
    *out = run.release();
    if (e) std::rethrow_exception(e);
  });
}

void blebsim_run_free(blebsim_run* run) { delete run; }

int blebsim_run_succeeded(const blebsim_run* run) { return run && run->manifest.success ? 1 : 0; }

blebsim_status blebsim_run_metrics(const blebsim_run* run, blebsim_metrics* out) {
  BLEBSIM_REQUIRE(run && out, "run or out is NULL");
  const auto& m = run->manifest.metrics;
  const auto& p = m.polarization;
  *out = {p.front_mean,  p.back_mean,      p.depleted_fraction, p.interface_count,
          p.interface_width, m.mean_u,     m.min_u_all,         m.max_u_all,
          m.steady_state ? 1 : 0, m.steady_time, m.max_boundary_speed};
  return BLEBSIM_OK;
}

blebsim_status blebsim_run_manifest_json(const blebsim_run* run, char** out) {
  BLEBSIM_REQUIRE(run && out, "run or out is NULL");
  return guarded([&] { *out = dup(blebsim::to_json(run->manifest)); });
}

blebsim_status blebsim_run_directory(const blebsim_run* run, char** out) {
  BLEBSIM_REQUIRE(run && out, "run or out is NULL");
  return guarded([&] { *out = dup(run->manifest.directory.string()); });
}

blebsim_status blebsim_run_sweep(const blebsim_config* base, const char* path, const double* values, size_t count,
                                 int parallelism, char** summary_path, int* failed_runs) {
  BLEBSIM_REQUIRE(base && path && (values || count == 0), "base, path or values is NULL");
  return guarded([&] {
    const std::vector<double> v(values, values + count);
    const auto manifests = blebsim::run_sweep(base->config, path, v, parallelism, base->logger());
    int failed = 0;
    for (const auto& m : manifests) failed += m.success ? 0 : 1;
    if (failed_runs) *failed_runs = failed;
    if (summary_path)
      *summary_path = manifests.empty() ? nullptr : dup((base->config.output_dir / "sweep_summary.csv").string());
  });
}

blebsim_status blebsim_verify_manifest(const char* dir) {
  BLEBSIM_REQUIRE(dir, "dir is NULL");
  return guarded([&] {
    std::string problem;
    if (!blebsim::verify_manifest(dir, &problem)) throw blebsim::ValidationError("manifest: " + problem);
  });
}

blebsim_status blebsim_emit_plots(const char* run_dir, char** listing) {
  BLEBSIM_REQUIRE(run_dir, "run_dir is NULL");
  return guarded([&] {
    std::string text;
    for (const auto& p : blebsim::emit_plots(run_dir)) text += p.string() + "\n";
    if (listing) *listing = dup(text);
  });
}

blebsim_status blebsim_nondim(const char* params_json, char** report_text, char** report_json) {
  return guarded([&] {
    const blebsim::PhysicalParams p =
        params_json ? blebsim::physical_params_from_json(params_json) : blebsim::PhysicalParams{};
    const auto report = blebsim::nondimensionalize(p);
    if (report_text) *report_text = dup(blebsim::format_report(report));
    if (report_json) *report_json = dup(blebsim::to_json(report));
  });
}

blebsim_status blebsim_oracle_check(uint64_t seed, int samples, char** report, int* all_passed) {
  BLEBSIM_REQUIRE(samples > 0, "samples must be positive");
  return guarded([&] {
    const auto checks = blebsim::run_oracle_self_checks(seed, samples);
    std::string text;
    bool ok = true;
    char buf[256];
    for (const auto& c : checks) {
      std::snprintf(buf, sizeof buf, "%-4s %-52s residual %.3e  tolerance %.1e\n", c.passed ? "ok" : "FAIL",
                    c.name.c_str(), c.residual, c.tolerance);
      text += buf;
      ok = ok && c.passed;
    }
    const double x3 = blebsim::axis_dipole_maximizer(0.5);
    std::snprintf(buf, sizeof buf, "axis dipole maximiser at c = 0.5: x3 = %.6f\n", x3);
    text += buf;
    if (report) *report = dup(text);
    if (all_passed) *all_passed = ok ? 1 : 0;
  });
}

blebsim_status blebsim_phase_report(const blebsim_config* config, double w, char** out) {
  BLEBSIM_REQUIRE(config && out, "config or out is NULL");
  return guarded([&] {
    const auto& k = config->config.kinetics;
    k.validate();
    const auto report = blebsim::classify_phases(w, k);
    nlohmann::json states = nlohmann::json::array();
    for (const auto& s : report.states) states.push_back({{"u", s.u}, {"stable", s.stable}});
    const nlohmann::json j = {{"w", w},
                              {"threshold", report.threshold},
                              {"interface_width", blebsim::interface_width(k, config->config.time.epsilon)},
                              {"states", states}};
    *out = dup(j.dump(2));
  });
}

blebsim_status blebsim_bifurcation_csv(const blebsim_config* config, double w_min, double w_max, int points,
                                       char** out) {
  BLEBSIM_REQUIRE(config && out, "config or out is NULL");
  BLEBSIM_REQUIRE(points >= 2 && w_min >= 0.0 && w_max > w_min, "need points >= 2 and 0 <= w_min < w_max");
  return guarded([&] {
    const auto& k = config->config.kinetics;
    k.validate();
    std::string csv = "w,stable_roots,unstable_roots\n";
    char buf[64];
    for (int i = 0; i < points; ++i) {
      const double w = w_min + (w_max - w_min) * i / (points - 1);
      std::string stable, unstable;
      for (const auto& s : blebsim::classify_phases(w, k).states) {
        std::string& dst = s.stable ? stable : unstable;
        std::snprintf(buf, sizeof buf, "%s%.12g", dst.empty() ? "" : ";", s.u);
        dst += buf;
      }
      std::snprintf(buf, sizeof buf, "%.12g,", w);
      csv += buf + stable + "," + unstable + "\n";
    }
    *out = dup(csv);
  });
}

}  // extern "C"
