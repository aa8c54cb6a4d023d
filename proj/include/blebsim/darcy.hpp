#pragma once

#include <span>
#include <vector>

#include "blebsim/fem.hpp"
#include "blebsim/mesh.hpp"
#include "blebsim/solvers.hpp"
#include "blebsim/surface_mesh.hpp"

namespace blebsim {

struct PointForce {
  Vec2 center{0.8, 0.0};
  Vec2 direction{1.0, 0.0};  // normalised on use
  double magnitude = 20.0;
  double kernel_radius = 0.15;
};

struct ForceSpec {
  std::vector<PointForce> terms;

  /// Each support ball must lie strictly inside the meshed domain, clear of
  /// both boundary loops. Throws ConfigError.
  void validate(const Mesh2D& mesh) const;
  /// Sum of magnitude * direction.
  Vec2 total() const;
};

/// Normalised bump exp(1 / (r^2 / rho^2 - 1)) / (pi rho^2 E) on r < rho.
double bump_kernel(double r, double rho);
/// E = int_0^1 2 s exp(1 / (s^2 - 1)) ds.
inline constexpr double kBumpMassFactor = 0.14849550677592204;

VectorField smooth_force(const ForceSpec& spec);
/// Sub-divided quadrature on cells touching a force support.
LoadQuadrature force_quadrature(const ForceSpec& spec, int levels = 3);

struct FlowOptions {
  SolverOptions pressure{1e-12, 20000, 0};
  SolverOptions velocity{1e-12, 20000, 0};
  int force_quadrature_levels = 3;
  std::vector<double> pressure_guess;  // optional initial iterate
};

struct FlowDiagnostics {
  SolveReport pressure;
  SolveReport velocity;
  double pressure_mean = 0.0;
  /// max_j |int w_h . grad psi_j| / (||w_h|| ||grad psi_j||) for the P2 velocity.
  double divergence_residual = 0.0;
  /// Same quantity for the element-wise flux -grad p_h + f.
  double flux_divergence_residual = 0.0;
  double mean_speed = 0.0;  // domain average of |w_h|
  double max_boundary_speed = 0.0;  // over the surface trace
};

struct FlowField {
  std::vector<double> pressure;  // P1, zero mean
  std::vector<double> velocity;  // P2 vector, component-major
  std::vector<double> boundary_trace;  // tangential speed per surface dof
  ForceSpec force;
  FlowDiagnostics diagnostics;
};

/// Solves S P = int f . grad psi (zero mean), then M W = -G P + int f phi.
FlowField solve_flow(const Mesh2D& mesh, const SurfaceMesh& surface, const ForceSpec& force,
                     const FlowOptions& options = {});

/// Each surface dof takes the velocity of the nearest P2 dof on the OUTER
/// loop of the bulk mesh, projected onto the surface tangent.
std::vector<double> nearest_neighbor_trace(const FESpace& p2, std::span<const double> velocity,
                                           const SurfaceMesh& surface);

/// Velocity at cell t from the component-major P2 coefficients.
Vec2 evaluate_velocity(const FESpace& p2, std::span<const double> velocity, int t, const std::array<double, 3>& bary);

}  // namespace blebsim
