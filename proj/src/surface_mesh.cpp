#include "blebsim/surface_mesh.hpp"

#include <cmath>

#include "blebsim/error.hpp"

namespace blebsim {

SurfaceMesh::SurfaceMesh(std::vector<Vec2> nodes, std::vector<Vec2> node_tangents)
    : nodes_(std::move(nodes)), tangents_(std::move(node_tangents)) {
  const int n = num_nodes();
  if (n < 3) throw ValidationError("surface mesh: fewer than 3 nodes");
  if (static_cast<int>(tangents_.size()) != n) throw ValidationError("surface mesh: tangent count mismatch");
  double area2 = 0.0;
  for (int i = 0; i < n; ++i) area2 += cross(nodes_[i], nodes_[(i + 1) % n]);
  if (!(area2 > 0.0)) throw ValidationError("surface mesh: nodes are not counterclockwise");

  lengths_.resize(n);
  arclength_.resize(n);
  dof_pos_.resize(2 * n);
  dof_tan_.resize(2 * n);
  dof_s_.resize(2 * n);
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vec2 a = nodes_[i], b = nodes_[(i + 1) % n];
    const double len = norm(b - a);
    if (!(len > 0.0)) throw ValidationError("surface mesh: zero-length segment " + std::to_string(i));
    lengths_[i] = len;
    arclength_[i] = s;
    dof_pos_[2 * i] = a;
    dof_tan_[2 * i] = normalized(tangents_[i]);
    dof_s_[2 * i] = s;
    dof_pos_[2 * i + 1] = 0.5 * (a + b);
    dof_tan_[2 * i + 1] = (b - a) / len;
    dof_s_[2 * i + 1] = s + 0.5 * len;
    s += len;
  }
  total_ = s;
}

SurfaceMesh extract_surface(const Mesh2D& mesh, const DomainSpec& spec) {
  const auto loop = mesh.boundary_loop(BoundaryTag::Outer);
  if (loop.empty()) throw ValidationError("extract_surface: mesh has no OUTER loop");
  const Ellipse e = spec.outer();
  const int g = spec.gamma_refine;
  if (g < 1) throw ConfigError("extract_surface: gamma_refine must be >= 1");
  const int m = static_cast<int>(loop.size());
  std::vector<Vec2> nodes;
  std::vector<Vec2> tangents;
  nodes.reserve(static_cast<std::size_t>(m) * g);
  for (int i = 0; i < m; ++i) {
    const double t0 = e.projection_parameter(mesh.vertices()[loop[i]]);
    double t1 = e.projection_parameter(mesh.vertices()[loop[(i + 1) % m]]);
    if (t1 <= t0) t1 += 2.0 * kPi;
    for (int k = 0; k < g; ++k) {
      const double t = t0 + (t1 - t0) * k / g;
      nodes.push_back(e.point(t));
      tangents.push_back(e.tangent(t));
    }
  }
  return SurfaceMesh(std::move(nodes), std::move(tangents));
}

SurfaceMesh uniform_surface(const Ellipse& ellipse, int n) {
  std::vector<Vec2> nodes(n), tangents(n);
  for (int i = 0; i < n; ++i) {
    const double t = 2.0 * kPi * i / n;
    nodes[i] = ellipse.point(t);
    tangents[i] = ellipse.tangent(t);
  }
  return SurfaceMesh(std::move(nodes), std::move(tangents));
}

}  // namespace blebsim
