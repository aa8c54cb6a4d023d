#pragma once

#include <vector>

#include "blebsim/geometry.hpp"
#include "blebsim/mesh.hpp"

namespace blebsim {

/// Closed polyline discretising the outer membrane, counterclockwise.
/// Segment i joins node i to node (i + 1) mod N. P2 dofs are interleaved:
/// dof 2i is node i, dof 2i + 1 is the midpoint of segment i.
class SurfaceMesh {
 public:
  SurfaceMesh(std::vector<Vec2> nodes, std::vector<Vec2> node_tangents);

  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_segments() const { return num_nodes(); }
  int num_dofs() const { return 2 * num_nodes(); }

  const std::vector<Vec2>& nodes() const { return nodes_; }
  const std::vector<Vec2>& tangents() const { return tangents_; }
  /// Cumulative arclength of each node from node 0.
  const std::vector<double>& arclength() const { return arclength_; }
  double segment_length(int s) const { return lengths_[s]; }
  double total_length() const { return total_; }

  const std::vector<Vec2>& dof_positions() const { return dof_pos_; }
  const std::vector<Vec2>& dof_tangents() const { return dof_tan_; }
  const std::vector<double>& dof_arclength() const { return dof_s_; }
  /// Outward unit normal per dof (tangent rotated clockwise).
  Vec2 dof_normal(int d) const { return {dof_tan_[d].y, -dof_tan_[d].x}; }
  /// Global dofs of segment s in local order (start, midpoint, end).
  std::array<int, 3> segment_dofs(int s) const { return {2 * s, 2 * s + 1, (2 * s + 2) % num_dofs()}; }

 private:
  std::vector<Vec2> nodes_, tangents_;
  std::vector<double> lengths_, arclength_;
  double total_ = 0.0;
  std::vector<Vec2> dof_pos_, dof_tan_;
  std::vector<double> dof_s_;
};

/// Refines the OUTER loop of `mesh` by spec.gamma_refine: every boundary
/// chord is split uniformly in the ellipse parameter and the new nodes are
/// placed on the analytic ellipse.
SurfaceMesh extract_surface(const Mesh2D& mesh, const DomainSpec& spec);

/// Uniform polygon with n nodes on the ellipse parameterisation.
SurfaceMesh uniform_surface(const Ellipse& ellipse, int n);

}  // namespace blebsim
