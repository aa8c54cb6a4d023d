#pragma once

#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "blebsim/config.hpp"
#include "blebsim/darcy.hpp"
#include "blebsim/ezrin.hpp"

namespace blebsim {

using Logger = std::function<void(const std::string&)>;

const char* version_string();

/// Everything a run computes, kept in memory.
struct Simulation {
  std::unique_ptr<Mesh2D> mesh;
  std::unique_ptr<SurfaceMesh> surface;
  FlowField flow;
  TimeSteppingConfig time;  // as run, after the stability guard
  Trajectory trajectory;
  std::vector<std::string> warnings;
};

/// Forward-Euler bound for the explicit desorption term: the smallest step
/// count with dt (C1 max|w| + C2) <= 1, or config.num_steps when
/// dt (C1 max|w| + C2) <= 2 already holds.
int stable_step_count(const TimeSteppingConfig& config, const KineticsParams& kinetics, double max_speed);

/// Meshes, solves the flow and runs the Ezrin evolution without touching
/// the filesystem. `stage` tracks progress for failure reporting.
Simulation simulate(const RunConfig& config, const Logger& log = {}, std::string* stage = nullptr);

struct RunMetrics {
  PolarizationMetrics polarization;
  double mean_u = 0.0;       // final mass / membrane length
  double final_mass = 0.0;
  double min_u_all = 0.0;    // over every step
  double max_u_all = 0.0;
  bool steady_state = false;
  double steady_time = -1.0;
  double max_boundary_speed = 0.0;
  double mean_bulk_speed = 0.0;
  int mesh_vertices = 0;
  int mesh_triangles = 0;
  int surface_dofs = 0;
  int num_steps = 0;  // as run
};

RunMetrics compute_metrics(const RunConfig& config, const Simulation& sim);

struct FileRecord {
  std::string name;  // relative to the run directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct RunManifest {
  std::string label;
  std::string config_json;
  std::string version;
  std::uint64_t seed = 0;
  double duration_s = 0.0;
  bool success = false;
  std::string failure_stage;  // empty on success
  std::string error;
  RunMetrics metrics;
  double domain_area = 0.0;  // ellipse area
  double reference_area = 0.0;
  std::vector<std::string> warnings;
  std::vector<FileRecord> files;
  std::filesystem::path directory;
  std::exception_ptr exception;  // not serialised
};

std::string to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const std::string& text);

inline constexpr const char* kManifestFile = "manifest.json";

/// Runs one configuration and persists config.json, mesh.txt, flow.vtk,
/// trace.csv, trajectory.csv, diagnostics.csv, SVG plots and manifest.json
/// in config.output_dir. On failure the manifest records the stage and the
/// original exception is rethrown.
RunManifest run_experiment(const RunConfig& config, const Logger& log = {});

/// Like run_experiment but never throws for run failures; the manifest
/// carries the exception instead.
RunManifest run_experiment_recorded(const RunConfig& config, const Logger& log = {});

/// Recomputes every checksum listed in dir/manifest.json. Returns false and
/// fills `problem` on the first mismatch.
bool verify_manifest(const std::filesystem::path& dir, std::string* problem = nullptr);

/// splitmix64 of base + index.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

/// One run per value under base.output_dir/run_NNN with derived seeds,
/// `parallelism` worker threads and a sweep_summary.csv index. Failed runs
/// are reported in their manifests, not thrown. Throws ConfigError up front
/// for an invalid parameter path or a value the config rejects.
std::vector<RunManifest> run_sweep(const RunConfig& base, const std::string& parameter_path,
                                   const std::vector<double>& values, int parallelism, const Logger& log = {});

/// Area warning text when the ellipse area deviates from reference_area by
/// more than 1%; empty otherwise.
std::string area_warning(const RunConfig& config);

}  // namespace blebsim
