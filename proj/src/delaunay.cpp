#include "blebsim/delaunay.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "blebsim/error.hpp"

namespace blebsim {
namespace {

struct Tri {
  std::array<int, 3> v;
  std::array<int, 3> nbr;  // neighbour across the edge opposite v[k]; -1 on the hull
  bool alive;
};

// > 0 when d lies strictly inside the circumcircle of counterclockwise (a, b, c).
double incircle(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const double adx = a.x - d.x, ady = a.y - d.y;
  const double bdx = b.x - d.x, bdy = b.y - d.y;
  const double cdx = c.x - d.x, cdy = c.y - d.y;
  const double ad = adx * adx + ady * ady;
  const double bd = bdx * bdx + bdy * bdy;
  const double cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

// Insertion order that keeps consecutive points close: boustrophedon over a
// coarse grid, which keeps the walk short.
std::vector<int> insertion_order(std::span<const Vec2> pts, Vec2 lo, double extent) {
  const int n = static_cast<int>(pts.size());
  const int cells = std::max(1, static_cast<int>(std::sqrt(n / 4.0)));
  std::vector<std::int64_t> key(n);
  for (int i = 0; i < n; ++i) {
    int cx = std::clamp(static_cast<int>((pts[i].x - lo.x) / extent * cells), 0, cells - 1);
    int cy = std::clamp(static_cast<int>((pts[i].y - lo.y) / extent * cells), 0, cells - 1);
    if (cy % 2 == 1) cx = cells - 1 - cx;
    key[i] = static_cast<std::int64_t>(cy) * cells + cx;
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return key[i] < key[j]; });
  return order;
}

class Triangulator {
 public:
  explicit Triangulator(std::span<const Vec2> input) {
    Vec2 lo = input[0], hi = input[0];
    for (Vec2 p : input) {
      lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
      hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }
    const double extent = std::max({hi.x - lo.x, hi.y - lo.y, 1e-12});
    lo_ = lo;
    extent_ = extent;
    pts_.assign(input.begin(), input.end());
    const Vec2 c = 0.5 * (lo + hi);
    const double big = 50.0 * extent;
    super_ = static_cast<int>(pts_.size());
    pts_.push_back({c.x - big, c.y - big});
    pts_.push_back({c.x + big, c.y - big});
    pts_.push_back({c.x, c.y + big});
    tris_.push_back({{super_, super_ + 1, super_ + 2}, {-1, -1, -1}, true});
  }

  std::vector<Triangle> run() {
    const int n = super_;
    for (int i : insertion_order(std::span<const Vec2>(pts_.data(), n), lo_, extent_)) insert(i);
    std::vector<Triangle> out;
    for (const Tri& t : tris_) {
      if (!t.alive) continue;
      if (t.v[0] >= super_ || t.v[1] >= super_ || t.v[2] >= super_) continue;
      out.push_back({t.v[0], t.v[1], t.v[2]});
    }
    return out;
  }

 private:
  int locate(Vec2 p) {
    int t = last_;
    // Visibility walk; the rotating start edge prevents cycling.
    for (std::size_t guard = 0; guard < 4 * tris_.size() + 16; ++guard) {
      const Tri& tri = tris_[t];
      int next = -1;
      for (int r = 0; r < 3; ++r) {
        const int k = (r + rot_) % 3;
        const Vec2 a = pts_[tri.v[(k + 1) % 3]];
        const Vec2 b = pts_[tri.v[(k + 2) % 3]];
        if (orient2d(a, b, p) < 0.0) {
          next = tri.nbr[k];
          break;
        }
      }
      rot_ = (rot_ + 1) % 3;
      if (next < 0) return t;
      t = next;
    }
    throw ValidationError("delaunay: point location did not terminate");
  }

  void insert(int pi) {
    const Vec2 p = pts_[pi];
    const int start = locate(p);

    cavity_.clear();
    stack_.clear();
    stack_.push_back(start);
    tris_[start].alive = false;
    while (!stack_.empty()) {
      const int t = stack_.back();
      stack_.pop_back();
      cavity_.push_back(t);
      for (int k = 0; k < 3; ++k) {
        const int nb = tris_[t].nbr[k];
        if (nb < 0 || !tris_[nb].alive) continue;
        const Tri& o = tris_[nb];
        if (incircle(pts_[o.v[0]], pts_[o.v[1]], pts_[o.v[2]], p) > 0.0) {
          tris_[nb].alive = false;
          stack_.push_back(nb);
        }
      }
    }

    // Cavity boundary: edges of dead triangles whose neighbour survives.
    rim_.clear();
    for (int t : cavity_) {
      for (int k = 0; k < 3; ++k) {
        const int nb = tris_[t].nbr[k];
        if (nb >= 0 && !tris_[nb].alive) continue;
        rim_.push_back({tris_[t].v[(k + 1) % 3], tris_[t].v[(k + 2) % 3], nb, -1});
      }
    }
    for (auto& r : rim_) {
      r.tri = static_cast<int>(tris_.size());
      tris_.push_back({{r.a, r.b, pi}, {-1, -1, r.outside}, true});
      if (r.outside >= 0) {
        Tri& o = tris_[r.outside];
        for (int k = 0; k < 3; ++k) {
          if (o.v[(k + 1) % 3] == r.b && o.v[(k + 2) % 3] == r.a) o.nbr[k] = r.tri;
        }
      }
    }
    // Fan adjacency: new triangle (a, b, p) borders the one starting at b
    // across edge (b, p) and the one ending at a across edge (p, a).
    for (auto& r : rim_) {
      for (auto& s : rim_) {
        if (s.a == r.b) tris_[r.tri].nbr[0] = s.tri;
        if (s.b == r.a) tris_[r.tri].nbr[1] = s.tri;
      }
    }
    last_ = rim_.back().tri;
  }

  std::vector<Vec2> pts_;
  std::vector<Tri> tris_;
  std::vector<int> cavity_, stack_;
  int super_ = 0;
  int last_ = 0;
  int rot_ = 0;
  Vec2 lo_;
  double extent_ = 1.0;

  struct RimEdge {
    int a, b, outside, tri;
  };
  std::vector<RimEdge> rim_;
};

}  // namespace

std::vector<Triangle> delaunay_triangulate(std::span<const Vec2> points) {
  if (points.size() < 3) return {};
  return Triangulator(points).run();
}

}  // namespace blebsim
