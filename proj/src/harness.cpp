#include "blebsim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "blebsim/error.hpp"
#include "blebsim/output.hpp"
#include "blebsim/plots.hpp"

#ifndef BLEBSIM_VERSION
#define BLEBSIM_VERSION "0.0.0"
#endif

namespace blebsim {

namespace fs = std::filesystem;
using nlohmann::json;

const char* version_string() { return BLEBSIM_VERSION; }

namespace {

void say(const Logger& log, const std::string& msg) {
  if (log) log(msg);
}

void set_stage(std::string* stage, const char* name) {
  if (stage) *stage = name;
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

}  // namespace

Simulation simulate(const RunConfig& config, const Logger& log, std::string* stage) {
  set_stage(stage, "config");
  config.validate();

  set_stage(stage, "mesh");
  Simulation sim;
  sim.mesh = std::make_unique<Mesh2D>(generate_mesh(config.domain));
  sim.surface = std::make_unique<SurfaceMesh>(extract_surface(*sim.mesh, config.domain));
  say(log, fmt("mesh: %d vertices, %d triangles, %d surface dofs", sim.mesh->num_vertices(),
               sim.mesh->num_triangles(), sim.surface->num_dofs()));

  set_stage(stage, "flow");
  config.force.validate(*sim.mesh);
  FlowOptions fo;
  fo.pressure.tol = config.flow_tol;
  fo.velocity.tol = config.flow_tol;
  sim.flow = solve_flow(*sim.mesh, *sim.surface, config.force, fo);
  say(log, fmt("flow: max boundary speed %.4g, mean speed %.4g", sim.flow.diagnostics.max_boundary_speed,
               sim.flow.diagnostics.mean_speed));

  set_stage(stage, "ezrin");
  sim.time = config.time;
  if (config.stability_guard && config.time.reaction_enabled) {
    const int m = stable_step_count(config.time, config.kinetics, sim.flow.diagnostics.max_boundary_speed);
    if (m != config.time.num_steps) {
      sim.time.num_steps = m;
      sim.time.snapshot_stride = std::max(
          1, static_cast<int>(std::lround(static_cast<double>(config.time.snapshot_stride) * m / config.time.num_steps)));
      sim.warnings.push_back(fmt("explicit reaction unstable at M = %d (dt k_max = %.3g); running M = %d",
                                 config.time.num_steps,
                                 config.time.dt() * (config.kinetics.C1 * sim.flow.diagnostics.max_boundary_speed +
                                                     config.kinetics.C2),
                                 m));
      say(log, "warning: " + sim.warnings.back());
    }
  }
  const EzrinState initial = initial_condition_random(*sim.surface, sim.time.seed);
  sim.trajectory = run(*sim.surface, sim.flow.boundary_trace, config.kinetics, sim.time, initial);
  const auto& fin = sim.trajectory.final_state;
  say(log, fmt("ezrin: t = %.4g, mass %.6g, u in [%.4g, %.4g]%s", fin.time, fin.mass, fin.min_u, fin.max_u,
               sim.trajectory.steady_state ? ", steady" : ""));
  return sim;
}

int stable_step_count(const TimeSteppingConfig& config, const KineticsParams& kinetics, double max_speed) {
  const double k = kinetics.C1 * max_speed + kinetics.C2;
  if (config.dt() * k <= 2.0) return config.num_steps;
  const double m = std::ceil(config.final_time * k);
  if (!(m < 1e8)) throw ConfigError("stability guard: required step count is too large");
  return static_cast<int>(m);
}

RunMetrics compute_metrics(const RunConfig& config, const Simulation& sim) {
  RunMetrics m;
  const auto& fin = sim.trajectory.final_state;
  m.polarization = polarization_metrics(*sim.surface, fin.U, config.front_direction);
  m.final_mass = fin.mass;
  m.mean_u = fin.mass / sim.surface->total_length();
  m.min_u_all = INFINITY;
  m.max_u_all = -INFINITY;
  for (const auto& row : sim.trajectory.diagnostics) {
    m.min_u_all = std::min(m.min_u_all, row.min_u);
    m.max_u_all = std::max(m.max_u_all, row.max_u);
  }
  m.steady_state = sim.trajectory.steady_state;
  m.steady_time = sim.trajectory.steady_time;
  m.max_boundary_speed = sim.flow.diagnostics.max_boundary_speed;
  m.mean_bulk_speed = sim.flow.diagnostics.mean_speed;
  m.mesh_vertices = sim.mesh->num_vertices();
  m.mesh_triangles = sim.mesh->num_triangles();
  m.surface_dofs = sim.surface->num_dofs();
  m.num_steps = sim.time.num_steps;
  return m;
}

std::string area_warning(const RunConfig& config) {
  if (!(config.reference_area > 0.0)) return {};
  const double area = kPi * config.domain.semi_major * config.domain.semi_minor;
  const double dev = area / config.reference_area - 1.0;
  if (std::abs(dev) <= 0.01) return {};
  return fmt("ellipse area %.6g deviates from the reference area %.6g by %+.1f%%", area, config.reference_area,
             100.0 * dev);
}

namespace {

json metrics_json(const RunMetrics& m) {
  const auto& p = m.polarization;
  return {{"front_mean", p.front_mean},
          {"back_mean", p.back_mean},
          {"depleted_fraction", p.depleted_fraction},
          {"interface_count", p.interface_count},
          {"interface_width", p.interface_width},
          {"mean_u", m.mean_u},
          {"final_mass", m.final_mass},
          {"min_u_all", m.min_u_all},
          {"max_u_all", m.max_u_all},
          {"steady_state", m.steady_state},
          {"steady_time", m.steady_time},
          {"max_boundary_speed", m.max_boundary_speed},
          {"mean_bulk_speed", m.mean_bulk_speed},
          {"mesh_vertices", m.mesh_vertices},
          {"mesh_triangles", m.mesh_triangles},
          {"surface_dofs", m.surface_dofs},
          {"num_steps", m.num_steps}};
}

RunMetrics metrics_from_json(const json& j) {
  RunMetrics m;
  auto& p = m.polarization;
  p.front_mean = j.value("front_mean", 0.0);
  p.back_mean = j.value("back_mean", 0.0);
  p.depleted_fraction = j.value("depleted_fraction", 0.0);
  p.interface_count = j.value("interface_count", 0);
  p.interface_width = j.value("interface_width", 0.0);
  m.mean_u = j.value("mean_u", 0.0);
  m.final_mass = j.value("final_mass", 0.0);
  m.min_u_all = j.value("min_u_all", 0.0);
  m.max_u_all = j.value("max_u_all", 0.0);
  m.steady_state = j.value("steady_state", false);
  m.steady_time = j.value("steady_time", -1.0);
  m.max_boundary_speed = j.value("max_boundary_speed", 0.0);
  m.mean_bulk_speed = j.value("mean_bulk_speed", 0.0);
  m.mesh_vertices = j.value("mesh_vertices", 0);
  m.mesh_triangles = j.value("mesh_triangles", 0);
  m.surface_dofs = j.value("surface_dofs", 0);
  m.num_steps = j.value("num_steps", 0);
  return m;
}

// JSON has no infinities; metrics of failed runs may hold them.
json finite_or_null(json j) {
  for (auto& [k, v] : j.items()) {
    (void)k;
    if (v.is_number_float() && !std::isfinite(v.get<double>())) v = nullptr;
  }
  return j;
}

void record_file(RunManifest& m, const std::string& name) {
  const fs::path path = m.directory / name;
  m.files.push_back({name, sha256_file(path), fs::file_size(path)});
}

void write_manifest(const RunManifest& m) { write_text_file(m.directory / kManifestFile, to_json(m)); }

}  // namespace

std::string to_json(const RunManifest& m) {
  json files = json::array();
  for (const auto& f : m.files) files.push_back({{"name", f.name}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  json config = m.config_json.empty() ? json(nullptr) : json::parse(m.config_json);
  return json{{"label", m.label},
              {"version", m.version},
              {"seed", m.seed},
              {"duration_s", m.duration_s},
              {"success", m.success},
              {"failure_stage", m.failure_stage},
              {"error", m.error},
              {"metrics", finite_or_null(metrics_json(m.metrics))},
              {"domain_area", m.domain_area},
              {"reference_area", m.reference_area},
              {"warnings", m.warnings},
              {"files", files},
              {"config", config}}
      .dump(2);
}

RunManifest manifest_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("manifest: ") + e.what(), 0);
  }
  RunManifest m;
  try {
    m.label = j.at("label").get<std::string>();
    m.version = j.at("version").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.duration_s = j.at("duration_s").get<double>();
    m.success = j.at("success").get<bool>();
    m.failure_stage = j.at("failure_stage").get<std::string>();
    m.error = j.at("error").get<std::string>();
    json metrics = j.at("metrics");
    for (auto& [k, v] : metrics.items()) {
      (void)k;
      if (v.is_null()) v = NAN;
    }
    m.metrics = metrics_from_json(metrics);
    m.domain_area = j.at("domain_area").get<double>();
    m.reference_area = j.at("reference_area").get<double>();
    m.warnings = j.at("warnings").get<std::vector<std::string>>();
    for (const auto& f : j.at("files"))
      m.files.push_back({f.at("name").get<std::string>(), f.at("sha256").get<std::string>(),
                         f.at("bytes").get<std::uintmax_t>()});
    if (!j.at("config").is_null()) m.config_json = j.at("config").dump(2);
  } catch (const json::exception& e) {
    throw ParseError(std::string("manifest: ") + e.what(), 0);
  }
  return m;
}

RunManifest run_experiment_recorded(const RunConfig& config, const Logger& log) {
  const auto t0 = std::chrono::steady_clock::now();
  RunManifest m;
  m.label = config.label;
  m.version = version_string();
  m.seed = config.time.seed;
  m.directory = config.output_dir;
  m.domain_area = kPi * config.domain.semi_major * config.domain.semi_minor;
  m.reference_area = config.reference_area;
  std::string stage = "config";
  bool can_write = false;
  try {
    m.config_json = to_json(config);
    if (const std::string w = area_warning(config); !w.empty()) {
      m.warnings.push_back(w);
      say(log, "warning: " + w);
    }
    std::error_code ec;
    fs::create_directories(m.directory, ec);
    if (ec || !fs::is_directory(m.directory))
      throw ConfigError("output directory " + m.directory.string() + " is not writable");
    can_write = true;
    write_text_file(m.directory / "config.json", m.config_json);
    record_file(m, "config.json");

    Simulation sim = simulate(config, log, &stage);
    m.warnings.insert(m.warnings.end(), sim.warnings.begin(), sim.warnings.end());
    stage = "metrics";
    m.metrics = compute_metrics(config, sim);

    stage = "output";
    const std::pair<const char*, std::string> outputs[] = {
        {"mesh.txt", format_mesh(*sim.mesh)},
        {"flow.vtk", format_flow_vtk(*sim.mesh, sim.flow)},
        {"trace.csv", format_trace_csv(*sim.surface, sim.flow.boundary_trace)},
        {"trajectory.csv", format_trajectory_csv(*sim.surface, sim.trajectory.snapshots)},
        {"diagnostics.csv", format_diagnostics_csv(sim.trajectory.diagnostics)},
    };
    for (const auto& [name, text] : outputs) {
      write_text_file(m.directory / name, text);
      record_file(m, name);
    }

    stage = "plots";
    try {
      for (const auto& p : emit_plots(m.directory)) record_file(m, p.filename().string());
    } catch (const std::exception& e) {
      m.warnings.push_back(std::string("plots skipped: ") + e.what());
      say(log, m.warnings.back());
    }
    m.success = true;
  } catch (const std::exception& e) {
    m.success = false;
    m.failure_stage = stage;
    m.error = e.what();
    m.exception = std::current_exception();
    say(log, "failed at stage " + stage + ": " + e.what());
  }
  m.duration_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (can_write) {
    try {
      write_manifest(m);
    } catch (const std::exception& e) {
      if (m.success) {
        m.success = false;
        m.failure_stage = "manifest";
        m.error = e.what();
        m.exception = std::current_exception();
      }
    }
  }
  return m;
}

RunManifest run_experiment(const RunConfig& config, const Logger& log) {
  RunManifest m = run_experiment_recorded(config, log);
  if (m.exception) std::rethrow_exception(m.exception);
  return m;
}

bool verify_manifest(const fs::path& dir, std::string* problem) {
  auto fail = [&](const std::string& msg) {
    if (problem) *problem = msg;
    return false;
  };
  RunManifest m;
  try {
    m = manifest_from_json(read_text_file(dir / kManifestFile));
  } catch (const std::exception& e) {
    return fail(e.what());
  }
  for (const auto& f : m.files) {
    const fs::path path = dir / f.name;
    if (!fs::exists(path)) return fail(f.name + " is missing");
    if (fs::file_size(path) != f.bytes) return fail(f.name + " has the wrong size");
    if (sha256_file(path) != f.sha256) return fail(f.name + " checksum mismatch");
  }
  return true;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<RunManifest> run_sweep(const RunConfig& base, const std::string& parameter_path,
                                   const std::vector<double>& values, int parallelism, const Logger& log) {
  {
    RunConfig probe = base;
    set_parameter(probe, parameter_path, get_parameter(base, parameter_path));
  }
  if (values.empty()) return {};
  if (parallelism < 1) throw ConfigError("sweep: parallelism must be >= 1");

  std::vector<RunConfig> configs;
  for (std::size_t i = 0; i < values.size(); ++i) {
    RunConfig c = base;
    set_parameter(c, parameter_path, values[i]);
    c.time.seed = derive_seed(base.time.seed, i);
    c.output_dir = base.output_dir / fmt("run_%03zu", i);
    c.label = base.label + fmt("_%03zu", i);
    configs.push_back(std::move(c));
  }

  std::vector<RunManifest> out(configs.size());
  std::mutex log_mu;
  const Logger safe_log = log ? Logger([&](const std::string& s) {
    std::lock_guard<std::mutex> lock(log_mu);
    log(s);
  })
                              : Logger{};
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < configs.size();) {
      const std::string prefix = configs[i].label + ": ";
      out[i] = run_experiment_recorded(configs[i], safe_log ? Logger([&](const std::string& s) { safe_log(prefix + s); })
                                                            : Logger{});
    }
  };
  {
    const int n = std::min<int>(parallelism, static_cast<int>(configs.size()));
    std::vector<std::jthread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
  }

  std::string csv = "index,value,seed,success,mean_u,front_mean,back_mean,depleted_fraction,interface_count,directory\n";
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& m = out[i];
    const auto& p = m.metrics.polarization;
    csv += fmt("%zu,%.17g,%llu,%d,%.17g,%.17g,%.17g,%.17g,%d,", i, values[i], static_cast<unsigned long long>(m.seed),
               m.success ? 1 : 0, m.metrics.mean_u, p.front_mean, p.back_mean, p.depleted_fraction,
               p.interface_count) +
           m.directory.string() + "\n";
  }
  write_text_file(base.output_dir / "sweep_summary.csv", csv);
  return out;
}

}  // namespace blebsim
