#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "blebsim/geometry.hpp"

namespace blebsim {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend constexpr Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
  friend constexpr Vec3 operator/(Vec3 a, double s) { return {a.x / s, a.y / s, a.z / s}; }
};

constexpr double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }

/// Psi(x) = x / (omega_n |x|^n), omega_2 = 2 pi, omega_3 = 4 pi.
Vec2 fundamental_solution(Vec2 x);
Vec3 fundamental_solution(Vec3 x);

/// Neumann Green's function of the unit ball for a dipole at z != 0:
/// p = D . G_z(x) solves Laplace p = div(D delta_z), grad p . n = 0.
Vec3 ball_green_function(Vec3 x, Vec3 z);

struct AxisDipole {
  double pressure;
  Vec3 boundary_velocity;  // meaningful for |x| = 1
  double speed;
};

/// Unit force e3 at c e3 in the unit ball.
AxisDipole axis_dipole_ball(Vec3 x, double c);
/// Height x3 of the boundary-speed maximiser for the axis dipole.
double axis_dipole_maximizer(double c);

/// Disc analogue of ball_green_function: -grad_z of the Neumann function
/// (ln|x - z| + ln||z| x - z/|z||) / (2 pi).
Vec2 disc_neumann_green(Vec2 x, Vec2 z);

struct OracleCheck {
  std::string name;
  double residual;  // worst scale-relative residual
  double tolerance;
  bool passed;
};

/// Finite-difference PDE and boundary residuals of every closed form.
std::vector<OracleCheck> run_oracle_self_checks(std::uint64_t seed = 7, int samples = 1000);

}  // namespace blebsim
