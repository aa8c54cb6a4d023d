#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "blebsim/mesh.hpp"
#include "blebsim/sparse.hpp"
#include "blebsim/surface_mesh.hpp"

namespace blebsim {

using ScalarField = std::function<double(Vec2)>;
using VectorField = std::function<Vec2(Vec2)>;

struct QuadPoint {
  std::array<double, 3> bary;
  double weight;  // weights sum to 1; multiply by the triangle area
};

/// Symmetric degree-4 rule (6 points). With `levels` > 0 the rule is applied
/// on each of the 4^levels uniform sub-triangles.
const std::vector<QuadPoint>& triangle_rule(int levels = 0);

struct SegmentQuadPoint {
  double xi;  // in [0, 1]
  double weight;  // weights sum to 1; multiply by the segment length
};

/// 3-point Gauss-Legendre (exact to degree 5).
const std::array<SegmentQuadPoint, 3>& segment_rule();

/// Lagrange P1 or P2 space on a bulk mesh. P2 dofs: vertices first, then one
/// per mesh edge in Mesh2D::edges() order. Local P2 order per cell: three
/// vertices, then the edges opposite local vertices 0, 1, 2.
class FESpace {
 public:
  static FESpace p1(const Mesh2D& mesh);
  static FESpace p2(const Mesh2D& mesh);

  const Mesh2D& mesh() const { return *mesh_; }
  int order() const { return order_; }
  int num_dofs() const { return static_cast<int>(coords_.size()); }
  int dofs_per_cell() const { return order_ == 1 ? 3 : 6; }
  const std::vector<Vec2>& dof_coordinates() const { return coords_; }
  std::span<const int> cell_dofs(int t) const {
    return {cell_dofs_.data() + static_cast<std::size_t>(t) * dofs_per_cell(), static_cast<std::size_t>(dofs_per_cell())};
  }

  /// Basis values at barycentric coordinates (local order).
  void basis(const std::array<double, 3>& bary, std::span<double> out) const;
  /// Basis gradients on cell t at barycentric coordinates.
  void basis_gradients(int t, const std::array<double, 3>& bary, std::span<Vec2> out) const;

  std::vector<double> interpolate(const ScalarField& f) const;
  double evaluate(std::span<const double> coeffs, int t, const std::array<double, 3>& bary) const;
  Vec2 evaluate_gradient(std::span<const double> coeffs, int t, const std::array<double, 3>& bary) const;

 private:
  FESpace(const Mesh2D& mesh, int order);
  const Mesh2D* mesh_;
  int order_;
  std::vector<Vec2> coords_;
  std::vector<int> cell_dofs_;
};

Vec2 physical_point(const Mesh2D& mesh, int t, const std::array<double, 3>& bary);
/// Gradients of the barycentric coordinates on cell t.
std::array<Vec2, 3> barycentric_gradients(const Mesh2D& mesh, int t);

/// Optional per-cell refinement for load integrals of fields with small
/// support: cells for which `refine` returns true use triangle_rule(levels).
struct LoadQuadrature {
  int levels = 0;
  std::function<bool(Vec2, Vec2, Vec2)> refine;
};

/// Mass matrix, optionally weighted by a field evaluated at quadrature points.
SparseMatrix assemble_mass(const FESpace& space, const ScalarField& weight = {});
SparseMatrix assemble_stiffness(const FESpace& space);
/// Block-diagonal mass matrix on the component-major vector P2 space:
/// dof (i, c) has index c * n + i.
SparseMatrix assemble_vector_mass(const FESpace& p2);
/// B[(i,c), j] = int psi_j d_c phi_i, the discrete form of int p div q.
SparseMatrix assemble_mixed(const FESpace& p1, const FESpace& p2);
/// G[(i,c), j] = int phi_i d_c psi_j, the discrete form of int q . grad p.
SparseMatrix assemble_gradient(const FESpace& p1, const FESpace& p2);

std::vector<double> assemble_load(const FESpace& space, const ScalarField& f, const LoadQuadrature& quad = {});
/// int f_c phi_i on the component-major vector space.
std::vector<double> assemble_vector_load(const FESpace& p2, const VectorField& f, const LoadQuadrature& quad = {});
/// int f . grad psi_j.
std::vector<double> assemble_gradient_load(const FESpace& space, const VectorField& f,
                                           const LoadQuadrature& quad = {});

// Surface P2 on the polyline: local basis on segment s with xi in [0, 1].
std::array<double, 3> segment_basis(double xi);
/// d/dxi of the local basis; divide by the segment length for d/ds.
std::array<double, 3> segment_basis_derivatives(double xi);

using SegmentField = std::function<double(int segment, double xi)>;

SparseMatrix assemble_surface_mass(const SurfaceMesh& surface, const SegmentField& weight = {});
SparseMatrix assemble_surface_stiffness(const SurfaceMesh& surface);
/// A[i][j] = int phi_j omega d_s phi_i with omega the P2 interpolant of the
/// per-dof tangential speeds.
SparseMatrix assemble_surface_advection(const SurfaceMesh& surface, std::span<const double> omega);
/// int g phi_i, equal to M^g 1.
std::vector<double> assemble_surface_load(const SurfaceMesh& surface, const SegmentField& g);
double surface_evaluate(const SurfaceMesh& surface, std::span<const double> coeffs, int segment, double xi);

}  // namespace blebsim
