#include "blebsim/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <tuple>

#include "blebsim/delaunay.hpp"
#include "blebsim/error.hpp"

namespace blebsim {

// ---------------------------------------------------------------------------
// Ellipse

Vec2 Ellipse::point(double t) const { return {a * std::cos(t), b * std::sin(t)}; }

Vec2 Ellipse::tangent(double t) const { return normalized(Vec2{-a * std::sin(t), b * std::cos(t)}); }

Vec2 Ellipse::normal(double t) const { return normalized(Vec2{b * std::cos(t), a * std::sin(t)}); }

bool Ellipse::contains(Vec2 p) const {
  const double u = p.x / a, v = p.y / b;
  return u * u + v * v < 1.0;
}

namespace {

double ellipse_speed(const Ellipse& e, double t) {
  return std::hypot(e.a * std::sin(t), e.b * std::cos(t));
}

// Cumulative arclength at n + 1 equally spaced parameters on [0, 2 pi],
// composite Simpson on each sub-interval.
std::vector<double> arclength_table(const Ellipse& e, int n) {
  std::vector<double> s(n + 1, 0.0);
  const double dt = 2.0 * kPi / n;
  for (int i = 0; i < n; ++i) {
    const double t0 = i * dt;
    s[i + 1] = s[i] + dt / 6.0 *
                          (ellipse_speed(e, t0) + 4.0 * ellipse_speed(e, t0 + 0.5 * dt) +
                           ellipse_speed(e, t0 + dt));
  }
  return s;
}

constexpr int kArcTable = 8192;

}  // namespace

double Ellipse::perimeter() const { return arclength_table(*this, kArcTable).back(); }

double Ellipse::projection_parameter(Vec2 p) const {
  double t = std::atan2(p.y / b, p.x / a);
  if (t < 0.0) t += 2.0 * kPi;
  return t;
}

double Ellipse::closest_parameter(Vec2 p) const {
  constexpr int kSamples = 128;
  double best_t = 0.0, best_d = INFINITY;
  for (int i = 0; i < kSamples; ++i) {
    const double t = 2.0 * kPi * i / kSamples;
    const double d = norm2(point(t) - p);
    if (d < best_d) {
      best_d = d;
      best_t = t;
    }
  }
  // Newton on g(t) = (r(t) - p) . r'(t), safeguarded to the sample bracket.
  const double h = 2.0 * kPi / kSamples;
  const double lo = best_t - h, hi = best_t + h;
  double t = best_t;
  for (int it = 0; it < 40; ++it) {
    const Vec2 r = point(t);
    const Vec2 d1{-a * std::sin(t), b * std::cos(t)};
    const Vec2 d2{-a * std::cos(t), -b * std::sin(t)};
    const double g = dot(r - p, d1);
    const double dg = dot(d1, d1) + dot(r - p, d2);
    if (dg <= 0.0) break;
    double next = std::clamp(t - g / dg, lo, hi);
    if (std::abs(next - t) < 1e-15) {
      t = next;
      break;
    }
    t = next;
  }
  if (norm2(point(t) - p) > best_d) t = best_t;
  t = std::fmod(t, 2.0 * kPi);
  if (t < 0.0) t += 2.0 * kPi;
  return t;
}

double Ellipse::distance(Vec2 p) const { return norm(point(closest_parameter(p)) - p); }

std::vector<double> Ellipse::equispaced_parameters(int n) const {
  const auto table = arclength_table(*this, kArcTable);
  const double total = table.back();
  const double dt = 2.0 * kPi / kArcTable;
  std::vector<double> out(n);
  int j = 0;
  for (int i = 0; i < n; ++i) {
    const double target = total * i / n;
    while (j + 1 < kArcTable && table[j + 1] < target) ++j;
    // Linear guess inside the table cell, then Newton on s(t) - target.
    const double frac = (target - table[j]) / (table[j + 1] - table[j]);
    double t = (j + frac) * dt;
    for (int it = 0; it < 3; ++it) {
      const double t0 = j * dt;
      // s(t) = table[j] + Simpson over [t0, t]
      const double m = 0.5 * (t0 + t);
      const double s = table[j] + (t - t0) / 6.0 *
                                      (ellipse_speed(*this, t0) + 4.0 * ellipse_speed(*this, m) +
                                       ellipse_speed(*this, t));
      t -= (s - target) / ellipse_speed(*this, t);
    }
    out[i] = t;
  }
  return out;
}

// ---------------------------------------------------------------------------
// DomainSpec

double DomainSpec::area() const {
  return outer().area() - (has_nucleus() ? kPi * nucleus_radius * nucleus_radius : 0.0);
}

bool DomainSpec::contains(Vec2 p) const {
  if (!outer().contains(p)) return false;
  return !has_nucleus() || norm(p - nucleus_center) > nucleus_radius;
}

double DomainSpec::boundary_distance(Vec2 p) const {
  double d = outer().distance(p);
  if (has_nucleus()) d = std::min(d, std::abs(norm(p - nucleus_center) - nucleus_radius));
  return d;
}

void DomainSpec::validate() const {
  if (!(semi_major > 0.0) || !(semi_minor > 0.0)) throw ConfigError("domain: semi-axes must be positive");
  if (!(target_h > 0.0)) throw ConfigError("domain: target_h must be positive");
  if (target_h > 0.5 * std::min(semi_major, semi_minor))
    throw ConfigError("domain: target_h too large for the ellipse");
  if (gamma_refine < 1) throw ConfigError("domain: gamma_refine must be >= 1");
  if (nucleus_radius < 0.0) throw ConfigError("domain: nucleus_radius must be >= 0");
  if (has_nucleus()) {
    if (!outer().contains(nucleus_center)) throw ConfigError("domain: nucleus centre outside the cell");
    const double clearance = outer().distance(nucleus_center) - nucleus_radius;
    if (clearance < target_h)
      throw ConfigError("domain: nucleus clearance " + std::to_string(clearance) +
                        " is below target_h " + std::to_string(target_h));
  }
}

// ---------------------------------------------------------------------------
// Mesh2D

const char* to_string(BoundaryTag tag) { return tag == BoundaryTag::Outer ? "OUTER" : "NUCLEUS"; }

MeshQuality compute_quality(const std::vector<Vec2>& v, const std::vector<Triangle>& tris) {
  MeshQuality q;
  q.min_angle_deg = 180.0;
  q.min_edge = INFINITY;
  for (const auto& t : tris) {
    const Vec2 p[3] = {v[t[0]], v[t[1]], v[t[2]]};
    const double area2 = orient2d(p[0], p[1], p[2]);
    double longest = 0.0;
    for (int k = 0; k < 3; ++k) {
      const Vec2 e1 = p[(k + 1) % 3] - p[k];
      const Vec2 e2 = p[(k + 2) % 3] - p[k];
      const double ang = std::atan2(std::abs(cross(e1, e2)), dot(e1, e2)) * 180.0 / kPi;
      q.min_angle_deg = std::min(q.min_angle_deg, ang);
      const double len = norm(e1);
      longest = std::max(longest, len);
      q.max_edge = std::max(q.max_edge, len);
      q.min_edge = std::min(q.min_edge, len);
    }
    const double min_altitude = area2 / longest;
    q.max_aspect_ratio = std::max(q.max_aspect_ratio, longest / min_altitude);
  }
  if (tris.empty()) q = {};
  return q;
}

Mesh2D::Mesh2D(std::vector<Vec2> vertices, std::vector<Triangle> triangles,
               std::vector<BoundaryEdge> boundary)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)), boundary_(std::move(boundary)) {
  const int nv = num_vertices();
  if (triangles_.empty()) throw ValidationError("mesh: no triangles");
  std::vector<char> used(nv, 0);
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    for (int k : triangles_[t]) {
      if (k < 0 || k >= nv)
        throw ValidationError("mesh: triangle " + std::to_string(t) + " references missing vertex " +
                              std::to_string(k));
      used[k] = 1;
    }
    if (!(triangle_area(static_cast<int>(t)) > 0.0))
      throw ValidationError("mesh: triangle " + std::to_string(t) + " does not have positive signed area");
  }
  for (int i = 0; i < nv; ++i)
    if (!used[i]) throw ValidationError("mesh: vertex " + std::to_string(i) + " belongs to no triangle");

  // Unique edges and manifoldness.
  std::map<std::array<int, 2>, int> count;
  std::map<std::array<int, 2>, bool> directed;
  for (const auto& t : triangles_) {
    for (int k = 0; k < 3; ++k) {
      const int a = t[(k + 1) % 3], b = t[(k + 2) % 3];
      ++count[{std::min(a, b), std::max(a, b)}];
      directed[{a, b}] = true;
    }
  }
  edges_.reserve(count.size());
  std::map<std::array<int, 2>, int> edge_index;
  for (const auto& [e, c] : count) {
    if (c > 2) throw ValidationError("mesh: edge shared by more than two triangles");
    edge_index[e] = static_cast<int>(edges_.size());
    edges_.push_back(e);
  }
  element_edges_.resize(triangles_.size());
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    for (int k = 0; k < 3; ++k) {
      const int a = triangles_[t][(k + 1) % 3], b = triangles_[t][(k + 2) % 3];
      element_edges_[t][k] = edge_index.at({std::min(a, b), std::max(a, b)});
    }
  }

  // The tagged boundary must be exactly the set of single-triangle edges,
  // oriented with the domain on the left.
  std::map<std::array<int, 2>, int> tagged;
  for (const auto& be : boundary_) {
    if (be.a < 0 || be.a >= nv || be.b < 0 || be.b >= nv)
      throw ValidationError("mesh: boundary edge references missing vertex");
    const std::array<int, 2> key{std::min(be.a, be.b), std::max(be.a, be.b)};
    auto it = count.find(key);
    if (it == count.end()) throw ValidationError("mesh: boundary edge is not a mesh edge");
    if (it->second != 1) throw ValidationError("mesh: boundary edge is shared by two triangles");
    if (!directed.count({be.a, be.b})) throw ValidationError("mesh: boundary edge orientation does not keep the domain on its left");
    if (++tagged[key] > 1) throw ValidationError("mesh: duplicate boundary edge");
  }
  for (const auto& [e, c] : count)
    if (c == 1 && !tagged.count(e)) throw ValidationError("mesh: untagged boundary edge");

  if (count_loops(BoundaryTag::Outer) != 1)
    throw ValidationError("mesh: boundary must contain exactly one OUTER loop");
  if (count_loops(BoundaryTag::Nucleus) > 1)
    throw ValidationError("mesh: boundary contains more than one NUCLEUS loop");

  quality_ = compute_quality(vertices_, triangles_);
}

double Mesh2D::triangle_area(int t) const {
  const auto& tri = triangles_[t];
  return 0.5 * orient2d(vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]);
}

double Mesh2D::total_area() const {
  double s = 0.0;
  for (int t = 0; t < num_triangles(); ++t) s += triangle_area(t);
  return s;
}

namespace {

// Splits the edges with the given tag into closed loops; throws when the
// edges do not form simple closed curves.
std::vector<std::vector<int>> loops_of(const std::vector<BoundaryEdge>& edges, BoundaryTag tag) {
  std::map<int, int> next;
  for (const auto& e : edges) {
    if (e.tag != tag) continue;
    if (!next.emplace(e.a, e.b).second) throw ValidationError("mesh: boundary loop is not simple");
  }
  std::vector<std::vector<int>> loops;
  std::map<int, bool> seen;
  for (const auto& e : edges) {
    if (e.tag != tag || seen[e.a]) continue;
    std::vector<int> loop;
    int v = e.a;
    while (!seen[v]) {
      seen[v] = true;
      loop.push_back(v);
      auto it = next.find(v);
      if (it == next.end()) throw ValidationError("mesh: boundary loop is not closed");
      v = it->second;
    }
    if (v != loop.front()) throw ValidationError("mesh: boundary loop is not closed");
    loops.push_back(std::move(loop));
  }
  return loops;
}

}  // namespace

int Mesh2D::count_loops(BoundaryTag tag) const { return static_cast<int>(loops_of(boundary_, tag).size()); }

std::vector<int> Mesh2D::boundary_loop(BoundaryTag tag) const {
  auto loops = loops_of(boundary_, tag);
  if (loops.empty()) return {};
  auto& loop = loops.front();
  // Start at the vertex with the largest x (ties: smallest y) so the ordering
  // does not depend on edge storage order.
  auto start = std::min_element(loop.begin(), loop.end(), [&](int i, int j) {
    const Vec2 p = vertices_[i], q = vertices_[j];
    return p.x > q.x || (p.x == q.x && p.y < q.y);
  });
  std::rotate(loop.begin(), start, loop.end());
  return loop;
}

// ---------------------------------------------------------------------------
// Generation

namespace {

std::vector<Triangle> inside_triangles(const DomainSpec& spec, const std::vector<Vec2>& pts) {
  std::vector<Triangle> out;
  for (const auto& t : delaunay_triangulate(pts)) {
    const Vec2 c = (pts[t[0]] + pts[t[1]] + pts[t[2]]) / 3.0;
    if (spec.contains(c)) out.push_back(t);
  }
  return out;
}

}  // namespace

Mesh2D generate_mesh(const DomainSpec& spec) {
  spec.validate();
  const double h = spec.target_h;
  const Ellipse outer = spec.outer();

  std::vector<Vec2> pts;
  const int n_outer = std::max(12, static_cast<int>(std::ceil(outer.perimeter() / h)));
  for (double t : outer.equispaced_parameters(n_outer)) pts.push_back(outer.point(t));
  int n_nucleus = 0;
  if (spec.has_nucleus()) {
    n_nucleus = std::max(8, static_cast<int>(std::ceil(2.0 * kPi * spec.nucleus_radius / h)));
    for (int i = 0; i < n_nucleus; ++i) {
      const double t = 2.0 * kPi * i / n_nucleus;
      pts.push_back(spec.nucleus_center + spec.nucleus_radius * Vec2{std::cos(t), std::sin(t)});
    }
  }
  const int n_fixed = static_cast<int>(pts.size());

  // Interior: jittered hexagonal lattice kept away from the boundary curves.
  // The margin keeps every boundary chord a Gabriel edge of the final
  // Delaunay triangulation, so the boundary is recovered without constraints.
  const double margin = 0.55 * h;
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> jitter(-0.02 * h, 0.02 * h);
  const double dy = h * std::sqrt(3.0) / 2.0;
  int row = 0;
  for (double y = -spec.semi_minor; y <= spec.semi_minor; y += dy, ++row) {
    const double shift = (row % 2) * 0.5 * h;
    for (double x = -spec.semi_major + shift; x <= spec.semi_major; x += h) {
      const Vec2 p{x + jitter(rng), y + jitter(rng)};
      if (spec.contains(p) && spec.boundary_distance(p) >= margin) pts.push_back(p);
    }
  }

  // Spring relaxation of interior points (boundary points stay fixed).
  constexpr double kFscale = 1.2;
  constexpr double kStep = 0.2;
  for (int iter = 0; iter < 80; ++iter) {
    const auto tris = inside_triangles(spec, pts);
    std::map<std::array<int, 2>, bool> bars;
    for (const auto& t : tris)
      for (int k = 0; k < 3; ++k) {
        const int a = t[k], b = t[(k + 1) % 3];
        bars[{std::min(a, b), std::max(a, b)}] = true;
      }
    double sum_l2 = 0.0;
    for (const auto& [e, _] : bars) sum_l2 += norm2(pts[e[0]] - pts[e[1]]);
    const double l0 = kFscale * std::sqrt(sum_l2 / static_cast<double>(bars.size()));
    std::vector<Vec2> force(pts.size());
    for (const auto& [e, _] : bars) {
      const Vec2 d = pts[e[0]] - pts[e[1]];
      const double len = norm(d);
      const double f = std::max(l0 - len, 0.0) / len;
      force[e[0]] += f * d;
      force[e[1]] -= f * d;
    }
    double max_move = 0.0;
    for (std::size_t i = n_fixed; i < pts.size(); ++i) {
      const Vec2 next = pts[i] + kStep * force[i];
      if (!spec.contains(next) || spec.boundary_distance(next) < margin) continue;
      max_move = std::max(max_move, norm(next - pts[i]));
      pts[i] = next;
    }
    if (max_move < 1e-3 * h) break;
  }

  auto tris = inside_triangles(spec, pts);

  // Drop points no triangle uses and renumber.
  std::vector<int> remap(pts.size(), -1);
  for (const auto& t : tris)
    for (int k : t) remap[k] = 0;
  std::vector<Vec2> verts;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (remap[i] < 0) {
      if (static_cast<int>(i) < n_fixed) throw ValidationError("mesh generation: boundary point left unmeshed");
      continue;
    }
    remap[i] = static_cast<int>(verts.size());
    verts.push_back(pts[i]);
  }
  for (auto& t : tris)
    for (int& k : t) k = remap[k];

  // Boundary edges from topology; each must connect consecutive samples of
  // one boundary curve.
  std::map<std::array<int, 2>, std::array<int, 3>> edge_use;  // key -> (count, a, b)
  for (const auto& t : tris)
    for (int k = 0; k < 3; ++k) {
      const int a = t[(k + 1) % 3], b = t[(k + 2) % 3];
      auto& u = edge_use[{std::min(a, b), std::max(a, b)}];
      ++u[0];
      u[1] = a;
      u[2] = b;
    }
  auto consecutive = [](int i, int j, int offset, int n) {
    const int a = i - offset, b = j - offset;
    return (a + 1) % n == b || (b + 1) % n == a;
  };
  std::vector<BoundaryEdge> boundary;
  for (const auto& [key, use] : edge_use) {
    if (use[0] != 1) continue;
    // Original indices: boundary samples were first and are never dropped,
    // so remap is the identity for them.
    const int a = use[1], b = use[2];
    if (a < n_outer && b < n_outer && consecutive(a, b, 0, n_outer)) {
      boundary.push_back({a, b, BoundaryTag::Outer});
    } else if (a >= n_outer && b >= n_outer && a < n_fixed && b < n_fixed &&
               consecutive(a, b, n_outer, n_nucleus)) {
      boundary.push_back({a, b, BoundaryTag::Nucleus});
    } else {
      throw ValidationError("mesh generation: boundary is not conforming");
    }
  }
  std::sort(boundary.begin(), boundary.end(), [](const BoundaryEdge& x, const BoundaryEdge& y) {
    return std::tie(x.tag, x.a) < std::tie(y.tag, y.a);
  });

  Mesh2D mesh(std::move(verts), std::move(tris), std::move(boundary));
  const auto& q = mesh.quality();
  if (q.min_angle_deg < 20.0)
    throw ValidationError("mesh generation: minimum angle " + std::to_string(q.min_angle_deg) + " below 20 degrees");
  if (q.max_edge > 1.5 * h)
    throw ValidationError("mesh generation: edge length " + std::to_string(q.max_edge) + " exceeds 1.5 h");
  return mesh;
}

// ---------------------------------------------------------------------------
// I/O

std::string format_mesh(const Mesh2D& mesh) {
  std::string out = "blebsim-mesh v1\n";
  char buf[128];
  std::snprintf(buf, sizeof buf, "vertices %d\n", mesh.num_vertices());
  out += buf;
  for (const Vec2& p : mesh.vertices()) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", p.x, p.y);
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "triangles %d\n", mesh.num_triangles());
  out += buf;
  for (const auto& t : mesh.triangles()) {
    std::snprintf(buf, sizeof buf, "%d %d %d\n", t[0], t[1], t[2]);
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "boundary %zu\n", mesh.boundary_edges().size());
  out += buf;
  for (const auto& e : mesh.boundary_edges()) {
    std::snprintf(buf, sizeof buf, "%d %d %s\n", e.a, e.b, to_string(e.tag));
    out += buf;
  }
  return out;
}

namespace {

struct LineReader {
  std::istringstream in;
  int line_no = 0;

  // Next non-empty line with comments stripped; false at end of input.
  bool next(std::string& line) {
    while (std::getline(in, line)) {
      ++line_no;
      if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  }

  std::string require(const char* what) {
    std::string line;
    if (!next(line)) throw ParseError(std::string("unexpected end of file, expected ") + what, line_no + 1);
    return line;
  }
};

int parse_section(LineReader& r, const std::string& name) {
  std::istringstream ls(r.require(name.c_str()));
  std::string word, extra;
  long long n = -1;
  if (!(ls >> word >> n) || word != name || n < 0 || (ls >> extra))
    throw ParseError("expected '" + name + " <count>'", r.line_no);
  return static_cast<int>(n);
}

}  // namespace

Mesh2D parse_mesh(const std::string& text) {
  LineReader r{std::istringstream(text)};
  {
    std::string header;
    if (!r.next(header)) throw ParseError("empty mesh file", 1);
    std::istringstream hs(header);
    std::string magic, version, extra;
    if (!(hs >> magic >> version) || magic != "blebsim-mesh" || version != "v1" || (hs >> extra))
      throw ParseError("expected header 'blebsim-mesh v1'", r.line_no);
  }
  std::vector<Vec2> verts(parse_section(r, "vertices"));
  for (auto& p : verts) {
    std::istringstream ls(r.require("vertex"));
    std::string extra;
    if (!(ls >> p.x >> p.y) || (ls >> extra)) throw ParseError("expected 'x y'", r.line_no);
  }
  std::vector<Triangle> tris(parse_section(r, "triangles"));
  for (auto& t : tris) {
    std::istringstream ls(r.require("triangle"));
    std::string extra;
    if (!(ls >> t[0] >> t[1] >> t[2]) || (ls >> extra)) throw ParseError("expected 'i j k'", r.line_no);
  }
  std::vector<BoundaryEdge> boundary(parse_section(r, "boundary"));
  for (auto& e : boundary) {
    std::istringstream ls(r.require("boundary edge"));
    std::string tag, extra;
    if (!(ls >> e.a >> e.b >> tag) || (ls >> extra)) throw ParseError("expected 'i j TAG'", r.line_no);
    if (tag == "OUTER")
      e.tag = BoundaryTag::Outer;
    else if (tag == "NUCLEUS")
      e.tag = BoundaryTag::Nucleus;
    else
      throw ParseError("unknown boundary tag '" + tag + "'", r.line_no);
  }
  std::string trailing;
  if (r.next(trailing)) throw ParseError("unexpected trailing content", r.line_no);
  return Mesh2D(std::move(verts), std::move(tris), std::move(boundary));
}

void save_mesh(const Mesh2D& mesh, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << format_mesh(mesh);
  if (!out) throw IoError("failed writing " + path.string());
}

Mesh2D load_mesh(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_mesh(ss.str());
}

}  // namespace blebsim
