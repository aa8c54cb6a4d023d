#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "blebsim/kinetics.hpp"
#include "blebsim/solvers.hpp"
#include "blebsim/sparse.hpp"
#include "blebsim/surface_mesh.hpp"

namespace blebsim {

struct TimeSteppingConfig {
  double final_time = 1.0;
  int num_steps = 1000;
  double epsilon = 0.002;
  SolverOptions solver{1e-13, 2000, 20000};
  int snapshot_stride = 25;
  std::uint64_t seed = 42;
  bool reaction_enabled = true;
  double steady_tol = 1e-4;  // on ||U^{k+1} - U^k||_inf / dt
  int steady_window = 20;

  double dt() const { return final_time / num_steps; }
  /// Throws ConfigError.
  void validate() const;
};

struct EzrinState {
  std::vector<double> U;  // surface P2 coefficients
  double time = 0.0;
  int step = 0;
  double mass = 0.0;  // 1^T M U
  double min_u = 0.0;
  double max_u = 0.0;
  double rate = 0.0;  // ||U - U_prev||_inf / dt of the step that produced it
};

/// I.i.d. uniform [0, 1) values per dof from a seeded 64-bit Mersenne Twister.
EzrinState initial_condition_random(const SurfaceMesh& surface, std::uint64_t seed);
EzrinState make_state(const SurfaceMesh& surface, std::vector<double> U, double time = 0.0, int step = 0);

/// Semi-implicit step
///   (M / dt - A + eps S) U^{k+1} = M U^k / dt + int (a(u^k, 1) - d(|w|, u^k)) phi
/// with the system matrix assembled and preconditioned once.
class EzrinStepper {
 public:
  EzrinStepper(const SurfaceMesh& surface, std::vector<double> trace, const KineticsParams& kinetics,
               const TimeSteppingConfig& config);

  EzrinState step(const EzrinState& state, SolveReport* report = nullptr) const;
  /// int (a(u, 1) - d(|w|, u)) phi_i, evaluated at quadrature points.
  std::vector<double> reaction_load(std::span<const double> U) const;
  double mass(std::span<const double> U) const;

  const SparseMatrix& mass_matrix() const { return mass_; }
  const SparseMatrix& advection_matrix() const { return advection_; }
  const SparseMatrix& stiffness_matrix() const { return stiffness_; }
  const SparseMatrix& system_matrix() const { return solver_.matrix(); }
  const SurfaceMesh& surface() const { return *surface_; }
  const TimeSteppingConfig& config() const { return config_; }

 private:
  const SurfaceMesh* surface_;
  std::vector<double> trace_;
  KineticsParams kinetics_;
  TimeSteppingConfig config_;
  SparseMatrix mass_, advection_, stiffness_;
  std::vector<double> ones_mass_;  // M^T 1
  GeneralSolver solver_;
};

struct Snapshot {
  int step;
  double time;
  std::vector<double> U;
};

struct DiagnosticRow {
  int step;
  double time;
  double mass;
  double min_u;
  double max_u;
  double residual;  // the step's ||dU||_inf / dt
};

struct Trajectory {
  std::vector<Snapshot> snapshots;
  std::vector<DiagnosticRow> diagnostics;
  bool steady_state = false;
  double steady_time = -1.0;
  EzrinState final_state;
};

/// Runs config.num_steps steps from `initial`. Snapshots include step 0 and
/// the final step.
Trajectory run(const SurfaceMesh& surface, const std::vector<double>& trace, const KineticsParams& kinetics,
               const TimeSteppingConfig& config, const EzrinState& initial);

struct PolarizationMetrics {
  double front_mean = 0.0;
  double back_mean = 0.0;
  double depleted_fraction = 0.0;  // arclength fraction with u < 0.1
  int interface_count = 0;
  double interface_width = 0.0;  // mean 10%-90% width; 0 without interfaces
};

/// Front and back are the arclength quarters centred on the dofs that
/// maximise and minimise x . front_direction.
PolarizationMetrics polarization_metrics(const SurfaceMesh& surface, std::span<const double> U,
                                         Vec2 front_direction = {1.0, 0.0});

}  // namespace blebsim
