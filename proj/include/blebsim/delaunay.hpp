#pragma once

#include <span>
#include <vector>

#include "blebsim/geometry.hpp"
#include "blebsim/mesh.hpp"

namespace blebsim {

/// Delaunay triangulation of a point set (Bowyer-Watson with walking point
/// location). Returns counterclockwise triangles covering the convex hull.
/// Points are expected to be in general position; callers jitter lattices.
std::vector<Triangle> delaunay_triangulate(std::span<const Vec2> points);

}  // namespace blebsim
