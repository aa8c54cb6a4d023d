#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "blebsim/darcy.hpp"
#include "blebsim/ezrin.hpp"
#include "blebsim/kinetics.hpp"
#include "blebsim/mesh.hpp"

namespace blebsim {

struct RunConfig {
  std::string label = "default";
  std::filesystem::path output_dir = "out";
  DomainSpec domain;
  ForceSpec force{{PointForce{}}};
  KineticsParams kinetics;
  TimeSteppingConfig time;
  double flow_tol = 1e-12;
  Vec2 front_direction{1.0, 0.0};
  /// Set by shape presets: area of the default ellipse the variant was
  /// derived from, 0 otherwise.
  double reference_area = 0.0;
  /// Raise num_steps when dt (C1 max|w| + C2) > 2 on the computed trace.
  bool stability_guard = true;

  /// Validates every sub-config that does not need a mesh. Throws ConfigError.
  void validate() const;
};

RunConfig default_config();

/// Strict JSON: unknown keys and wrong types are ConfigErrors; missing keys
/// keep their defaults.
RunConfig run_config_from_json(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);
std::string to_json(const RunConfig& config);

/// Ids 1a, 1b, 2a, 2b, 3a, 3b, 3c, 4 applied on top of `base`.
RunConfig experiment_config(const std::string& id, const RunConfig& base = default_config());
const std::vector<std::string>& experiment_ids();

/// Sets a numeric leaf addressed by a dotted path into the JSON form, e.g.
/// `kinetics.C3`, `time.epsilon`, `forces.0.magnitude`. `forces.magnitude`
/// addresses every force term. Throws ConfigError for unknown paths and for
/// values the resulting config rejects.
void set_parameter(RunConfig& config, const std::string& path, double value);
double get_parameter(const RunConfig& config, const std::string& path);

}  // namespace blebsim
