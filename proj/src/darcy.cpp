#include "blebsim/darcy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "blebsim/error.hpp"

namespace blebsim {

namespace {

double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 d = b - a;
  const double t = std::clamp(dot(p - a, d) / norm2(d), 0.0, 1.0);
  return norm(p - (a + t * d));
}

bool point_in_mesh_polygon(const Mesh2D& mesh, Vec2 p) {
  // Crossing parity over all boundary edges handles the nucleus hole.
  bool inside = false;
  for (const auto& e : mesh.boundary_edges()) {
    const Vec2 a = mesh.vertices()[e.a], b = mesh.vertices()[e.b];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (x > p.x) inside = !inside;
    }
  }
  return inside;
}

}  // namespace

void ForceSpec::validate(const Mesh2D& mesh) const {
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto& f = terms[i];
    const std::string id = "force[" + std::to_string(i) + "]: ";
    if (!(f.kernel_radius > 0.0)) throw ConfigError(id + "kernel_radius must be positive");
    if (!(f.magnitude >= 0.0) || !std::isfinite(f.magnitude)) throw ConfigError(id + "magnitude must be finite and >= 0");
    if (!(norm(f.direction) > 0.0)) throw ConfigError(id + "direction must be nonzero");
    if (!point_in_mesh_polygon(mesh, f.center)) throw ConfigError(id + "centre lies outside the domain");
    for (BoundaryTag tag : {BoundaryTag::Outer, BoundaryTag::Nucleus}) {
      double d = INFINITY;
      for (const auto& e : mesh.boundary_edges())
        if (e.tag == tag) d = std::min(d, segment_distance(f.center, mesh.vertices()[e.a], mesh.vertices()[e.b]));
      if (!(d > f.kernel_radius)) {
        char buf[200];
        std::snprintf(buf, sizeof buf, "support of radius %.4g reaches the %s boundary (centre distance %.4g)",
                      f.kernel_radius, to_string(tag), d);
        throw ConfigError(id + buf);
      }
    }
  }
}

Vec2 ForceSpec::total() const {
  Vec2 s;
  for (const auto& f : terms) s += f.magnitude * normalized(f.direction);
  return s;
}

double bump_kernel(double r, double rho) {
  const double s2 = (r * r) / (rho * rho);
  if (s2 >= 1.0) return 0.0;
  return std::exp(1.0 / (s2 - 1.0)) / (kPi * rho * rho * kBumpMassFactor);
}

VectorField smooth_force(const ForceSpec& spec) {
  return [terms = spec.terms](Vec2 x) {
    Vec2 s;
    for (const auto& f : terms) {
      const double g = bump_kernel(norm(x - f.center), f.kernel_radius);
      if (g != 0.0) s += (f.magnitude * g) * normalized(f.direction);
    }
    return s;
  };
}

LoadQuadrature force_quadrature(const ForceSpec& spec, int levels) {
  LoadQuadrature q;
  q.levels = levels;
  q.refine = [terms = spec.terms](Vec2 a, Vec2 b, Vec2 c) {
    for (const auto& f : terms) {
      const Vec2 p = f.center;
      // Point-in-triangle or within radius of an edge.
      const bool inside = orient2d(a, b, p) >= 0 && orient2d(b, c, p) >= 0 && orient2d(c, a, p) >= 0;
      if (inside) return true;
      const double d = std::min({segment_distance(p, a, b), segment_distance(p, b, c), segment_distance(p, c, a)});
      if (d < f.kernel_radius) return true;
    }
    return false;
  };
  return q;
}

Vec2 evaluate_velocity(const FESpace& p2, std::span<const double> w, int t, const std::array<double, 3>& bary) {
  const int n = p2.num_dofs();
  double phi[6];
  p2.basis(bary, phi);
  const auto dofs = p2.cell_dofs(t);
  Vec2 v;
  for (int k = 0; k < 6; ++k) {
    v.x += w[dofs[k]] * phi[k];
    v.y += w[n + dofs[k]] * phi[k];
  }
  return v;
}

std::vector<double> nearest_neighbor_trace(const FESpace& p2, std::span<const double> velocity,
                                           const SurfaceMesh& surface) {
  const Mesh2D& mesh = p2.mesh();
  const int n = p2.num_dofs();
  if (static_cast<int>(velocity.size()) != 2 * n) throw ValidationError("trace: velocity has wrong length");
  // P2 dofs on the OUTER loop: its vertices and the midpoints of its edges.
  std::vector<int> candidates;
  const int nv = mesh.num_vertices();
  for (const auto& e : mesh.boundary_edges()) {
    if (e.tag != BoundaryTag::Outer) continue;
    candidates.push_back(e.a);
    const auto key = std::array<int, 2>{std::min(e.a, e.b), std::max(e.a, e.b)};
    const auto it = std::lower_bound(mesh.edges().begin(), mesh.edges().end(), key);
    candidates.push_back(nv + static_cast<int>(it - mesh.edges().begin()));
  }
  const auto& coords = p2.dof_coordinates();
  std::vector<double> trace(surface.num_dofs());
  for (int d = 0; d < surface.num_dofs(); ++d) {
    const Vec2 x = surface.dof_positions()[d];
    int best = -1;
    double best_d = INFINITY;
    for (int c : candidates) {
      const double dist = norm2(coords[c] - x);
      if (dist < best_d || (dist == best_d && c < best)) {
        best_d = dist;
        best = c;
      }
    }
    const Vec2 w{velocity[best], velocity[n + best]};
    trace[d] = dot(w, surface.dof_tangents()[d]);
  }
  return trace;
}

FlowField solve_flow(const Mesh2D& mesh, const SurfaceMesh& surface, const ForceSpec& force,
                     const FlowOptions& options) {
  force.validate(mesh);
  const FESpace p1 = FESpace::p1(mesh);
  const FESpace p2 = FESpace::p2(mesh);
  const VectorField f = smooth_force(force);
  const LoadQuadrature quad = force_quadrature(force, options.force_quadrature_levels);

  FlowField out;
  out.force = force;
  auto& diag = out.diagnostics;

  const SparseMatrix S = assemble_stiffness(p1);
  std::vector<double> rhs_p = assemble_gradient_load(p1, f, quad);
  // The load integrates f . grad psi over cells; sum_j grad psi_j = 0 so the
  // load is compatible up to rounding, which the projection removes.
  const double drift = sum(rhs_p) / static_cast<double>(rhs_p.size());
  for (double& v : rhs_p) v -= drift;
  out.pressure = solve_spd(S, rhs_p, true, options.pressure, &diag.pressure, options.pressure_guess);
  diag.pressure_mean = sum(out.pressure) / static_cast<double>(out.pressure.size());

  const SparseMatrix G = assemble_gradient(p1, p2);
  const SparseMatrix M = assemble_vector_mass(p2);
  std::vector<double> rhs_w = assemble_vector_load(p2, f, quad);
  const std::vector<double> gp = G.multiply(out.pressure);
  for (std::size_t i = 0; i < rhs_w.size(); ++i) rhs_w[i] -= gp[i];
  out.velocity = solve_spd(M, rhs_w, false, options.velocity, &diag.velocity);

  // Weak divergence residuals, normalised per test function.
  {
    const std::vector<double> gtw = G.multiply_transpose(out.velocity);
    const std::vector<double> sdiag = S.diagonal();  // ||grad psi_j||^2
    const double wnorm = std::sqrt(std::max(dot(out.velocity, M.multiply(out.velocity)), 0.0));
    std::vector<double> flux = S.multiply(out.pressure);
    double flux_norm2 = 0.0;
    // ||-grad p_h + f||^2 by quadrature.
    for (int t = 0; t < mesh.num_triangles(); ++t) {
      const double area = mesh.triangle_area(t);
      for (const auto& q : (quad.refine && quad.refine(mesh.vertices()[mesh.triangles()[t][0]],
                                                         mesh.vertices()[mesh.triangles()[t][1]],
                                                         mesh.vertices()[mesh.triangles()[t][2]]))
                                ? triangle_rule(quad.levels)
                                : triangle_rule(0)) {
        const Vec2 v = f(physical_point(mesh, t, q.bary)) - p1.evaluate_gradient(out.pressure, t, q.bary);
        flux_norm2 += q.weight * area * norm2(v);
      }
    }
    const double flux_norm = std::sqrt(flux_norm2);
    for (std::size_t j = 0; j < gtw.size(); ++j) {
      const double gn = std::sqrt(sdiag[j]);
      if (wnorm > 0.0) diag.divergence_residual = std::max(diag.divergence_residual, std::abs(gtw[j]) / (wnorm * gn));
      // int (-grad p_h + f) . grad psi_j = rhs_p_j - (S P)_j
      if (flux_norm > 0.0)
        diag.flux_divergence_residual =
            std::max(diag.flux_divergence_residual, std::abs(rhs_p[j] - flux[j]) / (flux_norm * gn));
    }
  }

  double speed_integral = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const double area = mesh.triangle_area(t);
    for (const auto& q : triangle_rule(0))
      speed_integral += q.weight * area * norm(evaluate_velocity(p2, out.velocity, t, q.bary));
  }
  diag.mean_speed = speed_integral / mesh.total_area();

  out.boundary_trace = nearest_neighbor_trace(p2, out.velocity, surface);
  for (double v : out.boundary_trace) diag.max_boundary_speed = std::max(diag.max_boundary_speed, std::abs(v));
  return out;
}

}  // namespace blebsim
