#include "blebsim/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "blebsim/error.hpp"

namespace blebsim {

Vec2 fundamental_solution(Vec2 x) {
  const double r2 = norm2(x);
  if (r2 == 0.0) throw ConfigError("fundamental_solution: singular at x = 0");
  return x / (2.0 * kPi * r2);
}

Vec3 fundamental_solution(Vec3 x) {
  const double r = norm(x);
  if (r == 0.0) throw ConfigError("fundamental_solution: singular at x = 0");
  return x / (4.0 * kPi * r * r * r);
}

Vec3 ball_green_function(Vec3 x, Vec3 z) {
  const double rz = norm(z);
  if (rz == 0.0) throw ConfigError("ball_green_function: z = 0 is not supported");
  if (norm(x - z) == 0.0) throw ConfigError("ball_green_function: singular at x = z");
  const Vec3 e = z / rz;
  const Vec3 zeta = z / (rz * rz);
  const double dz = norm(x - z), dzeta = norm(x - zeta);
  const double xe = dot(x, e);
  const double axial = (xe - rz) / (dz * dz * dz) - (xe - 1.0 / rz) / (rz * rz * rz * dzeta * dzeta * dzeta);
  const double radial = 1.0 / (rz * dzeta) *
                        (1.0 + 1.0 / (rz * rz * dzeta * dzeta) + rz * dzeta / (dz * dz * dz) +
                         xe / (1.0 / rz - xe + dzeta));
  const Vec3 perp = x - xe * e;
  return (1.0 / (4.0 * kPi)) * (axial * e + radial * perp);
}

AxisDipole axis_dipole_ball(Vec3 x, double c) {
  if (!(c > 0.0 && c < 1.0)) throw ConfigError("axis_dipole_ball: c must lie in (0, 1)");
  const Vec3 e3{0, 0, 1};
  const double d1 = norm(x - c * e3), d2 = norm(x - (1.0 / c) * e3);
  AxisDipole out;
  out.pressure = (1.0 / (4.0 * kPi)) * ((x.z - c) / (d1 * d1 * d1) - (x.z - 1.0 / c) / (c * c * c * d2 * d2 * d2));
  const double amp = 3.0 / (4.0 * kPi) * (1.0 - c * c) / std::pow(d1, 5);
  out.boundary_velocity = amp * (x.z * x - e3);
  out.speed = norm(out.boundary_velocity);
  return out;
}

double axis_dipole_maximizer(double c) {
  const double s = c * c + 1.0;
  return (std::sqrt(s * s + 60.0 * c * c) - s) / (6.0 * c);
}

Vec2 disc_neumann_green(Vec2 x, Vec2 z) {
  const double rz2 = norm2(z);
  if (rz2 == 0.0) throw ConfigError("disc_neumann_green: z = 0 is not supported");
  const double d2 = norm2(x - z);
  if (d2 == 0.0) throw ConfigError("disc_neumann_green: singular at x = z");
  const double q = rz2 * norm2(x) - 2.0 * dot(x, z) + 1.0;
  return (x - z) / (2.0 * kPi * d2) - (norm2(x) * z - x) / (2.0 * kPi * q);
}

// ---------------------------------------------------------------------------
// Finite-difference self-validation

namespace {

constexpr double kStep = 1e-4;

using Scalar2 = std::function<double(Vec2)>;
using Scalar3 = std::function<double(Vec3)>;

double fd_laplacian(const Scalar2& p, Vec2 x) {
  const double h = kStep;
  return (p({x.x + h, x.y}) + p({x.x - h, x.y}) + p({x.x, x.y + h}) + p({x.x, x.y - h}) - 4.0 * p(x)) / (h * h);
}

double fd_laplacian(const Scalar3& p, Vec3 x) {
  const double h = kStep;
  double s = -6.0 * p(x);
  for (Vec3 d : {Vec3{h, 0, 0}, Vec3{0, h, 0}, Vec3{0, 0, h}}) s += p(x + d) + p(x - d);
  return s / (h * h);
}

Vec2 fd_gradient(const Scalar2& p, Vec2 x) {
  const double h = kStep;
  return {(p({x.x + h, x.y}) - p({x.x - h, x.y})) / (2 * h), (p({x.x, x.y + h}) - p({x.x, x.y - h})) / (2 * h)};
}

Vec3 fd_gradient(const Scalar3& p, Vec3 x) {
  const double h = kStep;
  return {(p(x + Vec3{h, 0, 0}) - p(x - Vec3{h, 0, 0})) / (2 * h),
          (p(x + Vec3{0, h, 0}) - p(x - Vec3{0, h, 0})) / (2 * h),
          (p(x + Vec3{0, 0, h}) - p(x - Vec3{0, 0, h})) / (2 * h)};
}

struct Sampler {
  std::mt19937_64 rng;
  std::uniform_real_distribution<double> u{-1.0, 1.0};
  Vec2 disc(double rmax) {
    for (;;) {
      Vec2 p{u(rng), u(rng)};
      if (norm(p) < 1.0) return rmax * p;
    }
  }
  Vec3 ball(double rmax) {
    for (;;) {
      Vec3 p{u(rng), u(rng), u(rng)};
      if (norm(p) < 1.0) return rmax * p;
    }
  }
  Vec2 circle() {
    const double t = kPi * u(rng);
    return {std::cos(t), std::sin(t)};
  }
  Vec3 sphere() {
    for (;;) {
      Vec3 p{u(rng), u(rng), u(rng)};
      const double r = norm(p);
      if (r > 0.1 && r < 1.0) return p / r;
    }
  }
  Vec2 unit2() {
    const double t = kPi * u(rng);
    return {std::cos(t), std::sin(t)};
  }
  Vec3 unit3() { return sphere(); }
};

OracleCheck make(std::string name, double residual, double tol) {
  return {std::move(name), residual, tol, residual <= tol};
}

}  // namespace

std::vector<OracleCheck> run_oracle_self_checks(std::uint64_t seed, int samples) {
  Sampler s{std::mt19937_64(seed)};
  std::vector<OracleCheck> out;
  constexpr double kPdeTol = 1e-5, kBcTol = 1e-6;

  // Scales: the magnitude of the singular part's derivatives at distance r,
  // |D| / (omega_n r^(n+1)) for second and |D| / (omega_n r^n) for first
  // derivatives (|D| = 1 throughout).

  {  // 2-D fundamental solution: harmonic away from the pole.
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
      const Vec2 z = s.disc(0.5), D = s.unit2();
      Vec2 x;
      do x = s.disc(1.0); while (norm(x - z) < 0.1);
      const Scalar2 p = [&](Vec2 y) { return dot(D, fundamental_solution(y - z)); };
      const double r = norm(x - z);
      worst = std::max(worst, std::abs(fd_laplacian(p, x)) / (1.0 / (2 * kPi * r * r * r)));
    }
    out.push_back(make("fundamental_solution n=2 laplacian", worst, kPdeTol));
  }
  {  // 3-D fundamental solution.
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
      const Vec3 z = s.ball(0.5), D = s.unit3();
      Vec3 x;
      do x = s.ball(1.0); while (norm(x - z) < 0.1);
      const Scalar3 p = [&](Vec3 y) { return dot(D, fundamental_solution(y - z)); };
      const double r = norm(x - z);
      worst = std::max(worst, std::abs(fd_laplacian(p, x)) / (1.0 / (4 * kPi * r * r * r * r)));
    }
    out.push_back(make("fundamental_solution n=3 laplacian", worst, kPdeTol));
  }
  {  // Ball Green's function: harmonic inside, Neumann on the sphere.
    double pde = 0.0, bc = 0.0;
    for (int i = 0; i < samples; ++i) {
      Vec3 z;
      do z = s.ball(0.6); while (norm(z) < 0.1);
      const Vec3 D = s.unit3();
      const Scalar3 p = [&](Vec3 y) { return dot(D, ball_green_function(y, z)); };
      Vec3 x;
      do x = s.ball(0.98); while (norm(x - z) < 0.2);
      const double r = norm(x - z);
      pde = std::max(pde, std::abs(fd_laplacian(p, x)) / (1.0 / (4 * kPi * r * r * r * r)));
      const Vec3 n = s.sphere();
      const double rb = norm(n - z);
      bc = std::max(bc, std::abs(dot(fd_gradient(p, n), n)) / (1.0 / (4 * kPi * rb * rb * rb)));
    }
    out.push_back(make("ball_green_function laplacian", pde, kPdeTol));
    out.push_back(make("ball_green_function neumann", bc, kBcTol));
  }
  {  // Ball Green's function minus the fundamental solution stays bounded.
    const Vec3 z{0.2, -0.1, 0.3}, D{0.0, 0.6, 0.8};
    double lo = INFINITY, hi = 0.0;
    // Below r ~ 1e-5 the subtraction is dominated by rounding.
    for (double r : {1e-2, 1e-3, 1e-4}) {
      const Vec3 x = z + r * Vec3{0.48, 0.6, 0.64};
      const double diff = std::abs(dot(D, ball_green_function(x, z)) - dot(D, fundamental_solution(x - z)));
      lo = std::min(lo, diff);
      hi = std::max(hi, diff);
    }
    // The difference settles to the finite regular part as r shrinks while
    // each term alone grows like r^-2.
    out.push_back(make("ball_green_function regular part spread", (hi - lo) / std::max(hi, 1e-300), 0.05));
  }
  {  // Axis dipole: pressure formula is the Green's function on the axis,
     // boundary velocity is -grad p, tangent to the sphere.
    double agree = 0.0, vel = 0.0, tangency = 0.0;
    for (int i = 0; i < samples; ++i) {
      const double c = 0.1 + 0.8 * 0.5 * (s.u(s.rng) + 1.0);
      const Vec3 z{0, 0, c};
      Vec3 x;
      do x = s.ball(0.98); while (norm(x - z) < 0.2);
      const double pa = axis_dipole_ball(x, c).pressure, pg = ball_green_function(x, z).z;
      const double r = norm(x - z);
      agree = std::max(agree, std::abs(pa - pg) / (1.0 / (4 * kPi * r * r)));
      const Vec3 n = s.sphere();
      const Scalar3 p = [&](Vec3 y) { return axis_dipole_ball(y, c).pressure; };
      const Vec3 g = fd_gradient(p, n);
      const AxisDipole a = axis_dipole_ball(n, c);
      const double rb = norm(n - z);
      const double scale = 1.0 / (4 * kPi * rb * rb * rb);
      vel = std::max(vel, norm(a.boundary_velocity + g) / scale);
      tangency = std::max(tangency, std::abs(dot(a.boundary_velocity, n)) / scale);
    }
    out.push_back(make("axis_dipole pressure vs green function", agree, 1e-10));
    out.push_back(make("axis_dipole velocity vs -grad p", vel, kBcTol));
    out.push_back(make("axis_dipole tangency", tangency, 1e-12));
  }
  {  // Disc oracle: harmonic inside, Neumann on the circle, mirror symmetry.
    double pde = 0.0, bc = 0.0, sym = 0.0;
    for (int i = 0; i < samples; ++i) {
      Vec2 z;
      do z = s.disc(0.6); while (norm(z) < 0.1);
      const Vec2 D = s.unit2();
      const Scalar2 p = [&](Vec2 y) { return dot(D, disc_neumann_green(y, z)); };
      Vec2 x;
      do x = s.disc(0.98); while (norm(x - z) < 0.2);
      const double r = norm(x - z);
      pde = std::max(pde, std::abs(fd_laplacian(p, x)) / (1.0 / (2 * kPi * r * r * r)));
      const Vec2 n = s.circle();
      const double rb = norm(n - z);
      bc = std::max(bc, std::abs(dot(fd_gradient(p, n), n)) / (1.0 / (2 * kPi * rb * rb)));
      const Vec2 za{std::abs(z.x) + 0.05, 0.0};
      const double p1 = disc_neumann_green(x, za).x, p2 = disc_neumann_green({x.x, -x.y}, za).x;
      const double ra = norm(x - za);
      if (ra > 1e-3) sym = std::max(sym, std::abs(p1 - p2) / (1.0 / (2 * kPi * ra)));
    }
    out.push_back(make("disc_neumann_green laplacian", pde, kPdeTol));
    out.push_back(make("disc_neumann_green neumann", bc, kBcTol));
    out.push_back(make("disc_neumann_green reflection symmetry", sym, 1e-12));
  }
  return out;
}

}  // namespace blebsim
