#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "blebsim/geometry.hpp"

namespace blebsim {

/// Axis-aligned ellipse centred at the origin, parameterised by the
/// eccentric angle t: (a cos t, b sin t), counterclockwise.
struct Ellipse {
  double a = 1.0;
  double b = 1.0;

  Vec2 point(double t) const;
  /// Unit counterclockwise tangent at parameter t.
  Vec2 tangent(double t) const;
  /// Unit outward normal at parameter t.
  Vec2 normal(double t) const;
  bool contains(Vec2 p) const;
  double area() const { return kPi * a * b; }
  double perimeter() const;
  /// Parameter of the closest point on the ellipse to p.
  double closest_parameter(Vec2 p) const;
  double distance(Vec2 p) const;
  /// Parameters of n points equally spaced in arclength, starting at t = 0.
  std::vector<double> equispaced_parameters(int n) const;
  /// Radial projection in parameter space: the parameter t with
  /// (cos t, sin t) parallel to (x / a, y / b).
  double projection_parameter(Vec2 p) const;
};

struct DomainSpec {
  double semi_major = 1.2;
  double semi_minor = 0.8;
  Vec2 nucleus_center{0.2, 0.0};
  double nucleus_radius = 0.4;  // 0 disables the nucleus
  double target_h = 0.05;
  int gamma_refine = 4;

  bool has_nucleus() const { return nucleus_radius > 0.0; }
  Ellipse outer() const { return {semi_major, semi_minor}; }
  /// Area of the cell domain (ellipse minus nucleus).
  double area() const;
  bool contains(Vec2 p) const;
  /// Distance from p to the nearest boundary curve (outer or nucleus).
  double boundary_distance(Vec2 p) const;
  /// Throws ConfigError for an unusable domain.
  void validate() const;
};

enum class BoundaryTag { Outer, Nucleus };

const char* to_string(BoundaryTag tag);

/// Boundary edge oriented with the domain on its left.
struct BoundaryEdge {
  int a = 0;
  int b = 0;
  BoundaryTag tag = BoundaryTag::Outer;
  friend bool operator==(const BoundaryEdge&, const BoundaryEdge&) = default;
};

struct MeshQuality {
  double min_angle_deg = 0.0;
  double max_aspect_ratio = 0.0;  // longest edge over shortest altitude
  double max_edge = 0.0;
  double min_edge = 0.0;
};

using Triangle = std::array<int, 3>;

/// Conforming triangulation of the cell domain. Construction validates
/// orientation, edge manifoldness and the boundary loop structure.
class Mesh2D {
 public:
  Mesh2D(std::vector<Vec2> vertices, std::vector<Triangle> triangles,
         std::vector<BoundaryEdge> boundary);

  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_; }
  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_triangles() const { return static_cast<int>(triangles_.size()); }
  /// Unique undirected edges, each stored as (min, max), sorted.
  const std::vector<std::array<int, 2>>& edges() const { return edges_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  /// For each triangle, the edge index opposite to local vertex k is
  /// element_edges()[t][k].
  const std::vector<std::array<int, 3>>& element_edges() const { return element_edges_; }

  const MeshQuality& quality() const { return quality_; }
  double triangle_area(int t) const;
  double total_area() const;
  int euler_characteristic() const { return num_vertices() - num_edges() + num_triangles(); }

  /// Closed vertex loop for the given tag in boundary order (domain on the
  /// left). Empty when the mesh has no such loop.
  std::vector<int> boundary_loop(BoundaryTag tag) const;
  int count_loops(BoundaryTag tag) const;

 private:
  std::vector<Vec2> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<BoundaryEdge> boundary_;
  std::vector<std::array<int, 2>> edges_;
  std::vector<std::array<int, 3>> element_edges_;
  MeshQuality quality_;
};

MeshQuality compute_quality(const std::vector<Vec2>& vertices, const std::vector<Triangle>& triangles);

/// Meshes the ellipse-minus-nucleus domain. Boundary vertices lie exactly on
/// the analytic curves; interior vertices are relaxed by a spring model over
/// repeated Delaunay triangulations.
Mesh2D generate_mesh(const DomainSpec& spec);

/// Text format `blebsim-mesh v1`; see README.
void save_mesh(const Mesh2D& mesh, const std::filesystem::path& path);
Mesh2D load_mesh(const std::filesystem::path& path);
std::string format_mesh(const Mesh2D& mesh);
Mesh2D parse_mesh(const std::string& text);

}  // namespace blebsim
