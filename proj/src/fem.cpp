#include "blebsim/fem.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "blebsim/error.hpp"

namespace blebsim {

// ---------------------------------------------------------------------------
// Quadrature

namespace {

std::vector<QuadPoint> base_rule() {
  const double a = 0.445948490915964886, wa = 0.223381589678011466;
  const double b = 0.091576213509770743, wb = 0.109951743655321868;
  return {
      {{a, a, 1.0 - 2.0 * a}, wa}, {{a, 1.0 - 2.0 * a, a}, wa}, {{1.0 - 2.0 * a, a, a}, wa},
      {{b, b, 1.0 - 2.0 * b}, wb}, {{b, 1.0 - 2.0 * b, b}, wb}, {{1.0 - 2.0 * b, b, b}, wb},
  };
}

using Bary = std::array<double, 3>;

void subdivide(const std::array<Bary, 3>& tri, int levels, double scale, const std::vector<QuadPoint>& base,
               std::vector<QuadPoint>& out) {
  if (levels == 0) {
    for (const auto& q : base) {
      Bary p{};
      for (int k = 0; k < 3; ++k)
        for (int c = 0; c < 3; ++c) p[c] += q.bary[k] * tri[k][c];
      out.push_back({p, q.weight * scale});
    }
    return;
  }
  auto mid = [](const Bary& u, const Bary& v) { return Bary{0.5 * (u[0] + v[0]), 0.5 * (u[1] + v[1]), 0.5 * (u[2] + v[2])}; };
  const Bary m01 = mid(tri[0], tri[1]), m12 = mid(tri[1], tri[2]), m20 = mid(tri[2], tri[0]);
  subdivide({tri[0], m01, m20}, levels - 1, 0.25 * scale, base, out);
  subdivide({m01, tri[1], m12}, levels - 1, 0.25 * scale, base, out);
  subdivide({m20, m12, tri[2]}, levels - 1, 0.25 * scale, base, out);
  subdivide({m12, m20, m01}, levels - 1, 0.25 * scale, base, out);
}

}  // namespace

const std::vector<QuadPoint>& triangle_rule(int levels) {
  static std::mutex mu;
  static std::map<int, std::vector<QuadPoint>> cache;
  if (levels < 0 || levels > 6) throw ConfigError("triangle_rule: levels must be in [0, 6]");
  std::lock_guard lock(mu);
  auto it = cache.find(levels);
  if (it != cache.end()) return it->second;
  std::vector<QuadPoint> rule;
  subdivide({Bary{1, 0, 0}, Bary{0, 1, 0}, Bary{0, 0, 1}}, levels, 1.0, base_rule(), rule);
  return cache.emplace(levels, std::move(rule)).first->second;
}

const std::array<SegmentQuadPoint, 3>& segment_rule() {
  static const double d = 0.5 * std::sqrt(0.6);
  static const std::array<SegmentQuadPoint, 3> rule{{{0.5 - d, 5.0 / 18.0}, {0.5, 8.0 / 18.0}, {0.5 + d, 5.0 / 18.0}}};
  return rule;
}

// ---------------------------------------------------------------------------
// Spaces

Vec2 physical_point(const Mesh2D& mesh, int t, const std::array<double, 3>& bary) {
  const auto& tri = mesh.triangles()[t];
  const auto& v = mesh.vertices();
  return bary[0] * v[tri[0]] + bary[1] * v[tri[1]] + bary[2] * v[tri[2]];
}

std::array<Vec2, 3> barycentric_gradients(const Mesh2D& mesh, int t) {
  const auto& tri = mesh.triangles()[t];
  const Vec2 p[3] = {mesh.vertices()[tri[0]], mesh.vertices()[tri[1]], mesh.vertices()[tri[2]]};
  const double area2 = orient2d(p[0], p[1], p[2]);
  std::array<Vec2, 3> g;
  for (int k = 0; k < 3; ++k) {
    const Vec2 a = p[(k + 1) % 3], b = p[(k + 2) % 3];
    g[k] = Vec2{a.y - b.y, b.x - a.x} / area2;
  }
  return g;
}

FESpace::FESpace(const Mesh2D& mesh, int order) : mesh_(&mesh), order_(order) {
  const int nv = mesh.num_vertices();
  coords_ = mesh.vertices();
  if (order == 2) {
    for (const auto& e : mesh.edges()) coords_.push_back(0.5 * (mesh.vertices()[e[0]] + mesh.vertices()[e[1]]));
  }
  cell_dofs_.reserve(static_cast<std::size_t>(mesh.num_triangles()) * dofs_per_cell());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    for (int k : mesh.triangles()[t]) cell_dofs_.push_back(k);
    if (order == 2)
      for (int e : mesh.element_edges()[t]) cell_dofs_.push_back(nv + e);
  }
}

FESpace FESpace::p1(const Mesh2D& mesh) { return FESpace(mesh, 1); }
FESpace FESpace::p2(const Mesh2D& mesh) { return FESpace(mesh, 2); }

void FESpace::basis(const std::array<double, 3>& l, std::span<double> out) const {
  if (order_ == 1) {
    out[0] = l[0];
    out[1] = l[1];
    out[2] = l[2];
    return;
  }
  for (int k = 0; k < 3; ++k) {
    out[k] = l[k] * (2.0 * l[k] - 1.0);
    out[3 + k] = 4.0 * l[(k + 1) % 3] * l[(k + 2) % 3];
  }
}

void FESpace::basis_gradients(int t, const std::array<double, 3>& l, std::span<Vec2> out) const {
  const auto g = barycentric_gradients(*mesh_, t);
  if (order_ == 1) {
    out[0] = g[0];
    out[1] = g[1];
    out[2] = g[2];
    return;
  }
  for (int k = 0; k < 3; ++k) {
    out[k] = (4.0 * l[k] - 1.0) * g[k];
    const int a = (k + 1) % 3, b = (k + 2) % 3;
    out[3 + k] = 4.0 * (l[a] * g[b] + l[b] * g[a]);
  }
}

std::vector<double> FESpace::interpolate(const ScalarField& f) const {
  std::vector<double> c(coords_.size());
  for (std::size_t i = 0; i < coords_.size(); ++i) c[i] = f(coords_[i]);
  return c;
}

double FESpace::evaluate(std::span<const double> coeffs, int t, const std::array<double, 3>& bary) const {
  double phi[6];
  basis(bary, phi);
  const auto dofs = cell_dofs(t);
  double s = 0.0;
  for (int k = 0; k < dofs_per_cell(); ++k) s += coeffs[dofs[k]] * phi[k];
  return s;
}

Vec2 FESpace::evaluate_gradient(std::span<const double> coeffs, int t, const std::array<double, 3>& bary) const {
  Vec2 g[6];
  basis_gradients(t, bary, g);
  const auto dofs = cell_dofs(t);
  Vec2 s;
  for (int k = 0; k < dofs_per_cell(); ++k) s += coeffs[dofs[k]] * g[k];
  return s;
}

// ---------------------------------------------------------------------------
// Bulk assembly

SparseMatrix assemble_mass(const FESpace& space, const ScalarField& weight) {
  const Mesh2D& mesh = space.mesh();
  const int nd = space.dofs_per_cell();
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(mesh.num_triangles()) * nd * nd);
  double phi[6];
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const double area = mesh.triangle_area(t);
    const auto dofs = space.cell_dofs(t);
    double local[6][6] = {};
    for (const auto& q : triangle_rule()) {
      space.basis(q.bary, phi);
      double w = q.weight * area;
      if (weight) w *= weight(physical_point(mesh, t, q.bary));
      for (int i = 0; i < nd; ++i)
        for (int j = 0; j < nd; ++j) local[i][j] += w * phi[i] * phi[j];
    }
    for (int i = 0; i < nd; ++i)
      for (int j = 0; j < nd; ++j) trip.push_back({dofs[i], dofs[j], local[i][j]});
  }
  return SparseMatrix::from_triplets(space.num_dofs(), space.num_dofs(), std::move(trip));
}

SparseMatrix assemble_stiffness(const FESpace& space) {
  const Mesh2D& mesh = space.mesh();
  const int nd = space.dofs_per_cell();
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(mesh.num_triangles()) * nd * nd);
  Vec2 g[6];
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const double area = mesh.triangle_area(t);
    const auto dofs = space.cell_dofs(t);
    double local[6][6] = {};
    if (space.order() == 1) {
      space.basis_gradients(t, {1.0 / 3, 1.0 / 3, 1.0 / 3}, g);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) local[i][j] = area * dot(g[i], g[j]);
    } else {
      for (const auto& q : triangle_rule()) {
        space.basis_gradients(t, q.bary, g);
        const double w = q.weight * area;
        for (int i = 0; i < nd; ++i)
          for (int j = 0; j < nd; ++j) local[i][j] += w * dot(g[i], g[j]);
      }
    }
    for (int i = 0; i < nd; ++i)
      for (int j = 0; j < nd; ++j) trip.push_back({dofs[i], dofs[j], local[i][j]});
  }
  return SparseMatrix::from_triplets(space.num_dofs(), space.num_dofs(), std::move(trip));
}

SparseMatrix assemble_vector_mass(const FESpace& p2) {
  const SparseMatrix m = assemble_mass(p2);
  const int n = p2.num_dofs();
  std::vector<Triplet> trip;
  trip.reserve(2 * static_cast<std::size_t>(m.nnz()));
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < n; ++i)
      for (int k = m.row_offsets()[i]; k < m.row_offsets()[i + 1]; ++k)
        trip.push_back({c * n + i, c * n + m.col_indices()[k], m.values()[k]});
  return SparseMatrix::from_triplets(2 * n, 2 * n, std::move(trip));
}

namespace {

// Shared kernel for the two mixed forms. With `divergence`, entries are
// int psi_j d_c phi_i; otherwise int phi_i d_c psi_j.
SparseMatrix assemble_mixed_form(const FESpace& p1, const FESpace& p2, bool divergence) {
  if (&p1.mesh() != &p2.mesh() || p1.order() != 1 || p2.order() != 2)
    throw ValidationError("mixed assembly needs P1 and P2 spaces on the same mesh");
  const Mesh2D& mesh = p1.mesh();
  const int n2 = p2.num_dofs();
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(mesh.num_triangles()) * 36);
  double phi[6] = {}, psi[6] = {};
  Vec2 gphi[6], gpsi[6];
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const double area = mesh.triangle_area(t);
    const auto d2 = p2.cell_dofs(t);
    const auto d1 = p1.cell_dofs(t);
    double local[2][6][3] = {};
    for (const auto& q : triangle_rule()) {
      const double w = q.weight * area;
      p1.basis(q.bary, psi);
      p2.basis(q.bary, phi);
      if (divergence) {
        p2.basis_gradients(t, q.bary, gphi);
        for (int i = 0; i < 6; ++i)
          for (int j = 0; j < 3; ++j) {
            local[0][i][j] += w * psi[j] * gphi[i].x;
            local[1][i][j] += w * psi[j] * gphi[i].y;
          }
      } else {
        p1.basis_gradients(t, q.bary, gpsi);
        for (int i = 0; i < 6; ++i)
          for (int j = 0; j < 3; ++j) {
            local[0][i][j] += w * phi[i] * gpsi[j].x;
            local[1][i][j] += w * phi[i] * gpsi[j].y;
          }
      }
    }
    for (int c = 0; c < 2; ++c)
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 3; ++j) trip.push_back({c * n2 + d2[i], d1[j], local[c][i][j]});
  }
  return SparseMatrix::from_triplets(2 * n2, p1.num_dofs(), std::move(trip));
}

const std::vector<QuadPoint>& rule_for(const Mesh2D& mesh, int t, const LoadQuadrature& quad) {
  if (quad.levels > 0 && quad.refine) {
    const auto& tri = mesh.triangles()[t];
    const auto& v = mesh.vertices();
    if (quad.refine(v[tri[0]], v[tri[1]], v[tri[2]])) return triangle_rule(quad.levels);
  }
  return triangle_rule(0);
}

}  // namespace

SparseMatrix assemble_mixed(const FESpace& p1, const FESpace& p2) { return assemble_mixed_form(p1, p2, true); }

SparseMatrix assemble_gradient(const FESpace& p1, const FESpace& p2) { return assemble_mixed_form(p1, p2, false); }

std::vector<double> assemble_load(const FESpace& space, const ScalarField& f, const LoadQuadrature& quad) {
  const Mesh2D& mesh = space.mesh();
  std::vector<double> b(space.num_dofs(), 0.0);
  double phi[6];
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const double area = mesh.triangle_area(t);
    const auto dofs = space.cell_dofs(t);
    for (const auto& q : rule_for(mesh, t, quad)) {
      const double fv = f(physical_point(mesh, t, q.bary));
      if (fv == 0.0) continue;
      space.basis(q.bary, phi);
      for (int i = 0; i < space.dofs_per_cell(); ++i) b[dofs[i]] += q.weight * area * fv * phi[i];
    }
  }
  return b;
}

std::vector<double> assemble_vector_load(const FESpace& p2, const VectorField& f, const LoadQuadrature& quad) {
  const Mesh2D& mesh = p2.mesh();
  const int n = p2.num_dofs();
  std::vector<double> b(2 * static_cast<std::size_t>(n), 0.0);
  double phi[6];
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const double area = mesh.triangle_area(t);
    const auto dofs = p2.cell_dofs(t);
    for (const auto& q : rule_for(mesh, t, quad)) {
      const Vec2 fv = f(physical_point(mesh, t, q.bary));
      if (fv.x == 0.0 && fv.y == 0.0) continue;
      p2.basis(q.bary, phi);
      const double w = q.weight * area;
      for (int i = 0; i < p2.dofs_per_cell(); ++i) {
        b[dofs[i]] += w * fv.x * phi[i];
        b[n + dofs[i]] += w * fv.y * phi[i];
      }
    }
  }
  return b;
}

std::vector<double> assemble_gradient_load(const FESpace& space, const VectorField& f, const LoadQuadrature& quad) {
  const Mesh2D& mesh = space.mesh();
  std::vector<double> b(space.num_dofs(), 0.0);
  Vec2 g[6];
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const double area = mesh.triangle_area(t);
    const auto dofs = space.cell_dofs(t);
    for (const auto& q : rule_for(mesh, t, quad)) {
      const Vec2 fv = f(physical_point(mesh, t, q.bary));
      if (fv.x == 0.0 && fv.y == 0.0) continue;
      space.basis_gradients(t, q.bary, g);
      for (int i = 0; i < space.dofs_per_cell(); ++i) b[dofs[i]] += q.weight * area * dot(fv, g[i]);
    }
  }
  return b;
}

// ---------------------------------------------------------------------------
// Surface assembly

std::array<double, 3> segment_basis(double xi) {
  return {(1.0 - xi) * (1.0 - 2.0 * xi), 4.0 * xi * (1.0 - xi), xi * (2.0 * xi - 1.0)};
}

std::array<double, 3> segment_basis_derivatives(double xi) {
  return {4.0 * xi - 3.0, 4.0 - 8.0 * xi, 4.0 * xi - 1.0};
}

double surface_evaluate(const SurfaceMesh& surface, std::span<const double> coeffs, int segment, double xi) {
  const auto dofs = surface.segment_dofs(segment);
  const auto phi = segment_basis(xi);
  return coeffs[dofs[0]] * phi[0] + coeffs[dofs[1]] * phi[1] + coeffs[dofs[2]] * phi[2];
}

SparseMatrix assemble_surface_mass(const SurfaceMesh& surface, const SegmentField& weight) {
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(surface.num_segments()) * 9);
  for (int s = 0; s < surface.num_segments(); ++s) {
    const double len = surface.segment_length(s);
    const auto dofs = surface.segment_dofs(s);
    double local[3][3] = {};
    for (const auto& q : segment_rule()) {
      const auto phi = segment_basis(q.xi);
      double w = q.weight * len;
      if (weight) w *= weight(s, q.xi);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) local[i][j] += w * phi[i] * phi[j];
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) trip.push_back({dofs[i], dofs[j], local[i][j]});
  }
  return SparseMatrix::from_triplets(surface.num_dofs(), surface.num_dofs(), std::move(trip));
}

SparseMatrix assemble_surface_stiffness(const SurfaceMesh& surface) {
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(surface.num_segments()) * 9);
  for (int s = 0; s < surface.num_segments(); ++s) {
    const double len = surface.segment_length(s);
    const auto dofs = surface.segment_dofs(s);
    double local[3][3] = {};
    for (const auto& q : segment_rule()) {
      const auto d = segment_basis_derivatives(q.xi);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) local[i][j] += q.weight * d[i] * d[j] / len;
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) trip.push_back({dofs[i], dofs[j], local[i][j]});
  }
  return SparseMatrix::from_triplets(surface.num_dofs(), surface.num_dofs(), std::move(trip));
}

SparseMatrix assemble_surface_advection(const SurfaceMesh& surface, std::span<const double> omega) {
  if (static_cast<int>(omega.size()) != surface.num_dofs())
    throw ValidationError("surface advection: speed vector has wrong length");
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(surface.num_segments()) * 9);
  for (int s = 0; s < surface.num_segments(); ++s) {
    const auto dofs = surface.segment_dofs(s);
    double local[3][3] = {};
    for (const auto& q : segment_rule()) {
      const auto phi = segment_basis(q.xi);
      const auto d = segment_basis_derivatives(q.xi);
      const double w = omega[dofs[0]] * phi[0] + omega[dofs[1]] * phi[1] + omega[dofs[2]] * phi[2];
      // Length cancels: ds = len dxi and d/ds = (1/len) d/dxi.
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) local[i][j] += q.weight * phi[j] * w * d[i];
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) trip.push_back({dofs[i], dofs[j], local[i][j]});
  }
  return SparseMatrix::from_triplets(surface.num_dofs(), surface.num_dofs(), std::move(trip));
}

std::vector<double> assemble_surface_load(const SurfaceMesh& surface, const SegmentField& g) {
  std::vector<double> b(surface.num_dofs(), 0.0);
  for (int s = 0; s < surface.num_segments(); ++s) {
    const double len = surface.segment_length(s);
    const auto dofs = surface.segment_dofs(s);
    for (const auto& q : segment_rule()) {
      const auto phi = segment_basis(q.xi);
      const double v = q.weight * len * g(s, q.xi);
      for (int i = 0; i < 3; ++i) b[dofs[i]] += v * phi[i];
    }
  }
  return b;
}

}  // namespace blebsim
