#include <doctest.h>

#include <cmath>

#include "blebsim/darcy.hpp"
#include "blebsim/error.hpp"
#include "blebsim/output.hpp"

using namespace blebsim;

namespace {

struct Setup {
  DomainSpec spec;
  Mesh2D mesh;
  SurfaceMesh surface;
  explicit Setup(const DomainSpec& s) : spec(s), mesh(generate_mesh(s)), surface(extract_surface(mesh, s)) {}
};

const Setup& cell() {
  static const Setup s{DomainSpec{}};
  return s;
}

const Setup& disc() {
  static const Setup s = [] {
    DomainSpec d;
    d.semi_major = d.semi_minor = 1.0;
    d.nucleus_radius = 0.0;
    d.target_h = 0.05;
    return Setup{d};
  }();
  return s;
}

ForceSpec single(Vec2 center, double magnitude = 20.0, double rho = 0.15) {
  return ForceSpec{{PointForce{center, {1.0, 0.0}, magnitude, rho}}};
}

}  // namespace

TEST_CASE("bump kernel has unit mass and compact support") {
  // Independent radial quadrature of the kernel: 2 pi int_0^rho G(r) r dr.
  for (double rho : {0.05, 0.15, 1.0}) {
    const int n = 200000;
    double mass = 0.0;
    for (int i = 0; i < n; ++i) {
      const double r = (i + 0.5) * rho / n;
      mass += 2.0 * kPi * bump_kernel(r, rho) * r * rho / n;
    }
    CHECK(std::abs(mass - 1.0) < 1e-8);
    CHECK(bump_kernel(rho, rho) == 0.0);
    CHECK(bump_kernel(1.5 * rho, rho) == 0.0);
  }
  const VectorField f = smooth_force(single({0.8, 0.0}));
  const Vec2 outside = f({0.8, 0.16});
  CHECK(outside.x == 0.0);
  CHECK(outside.y == 0.0);
  CHECK(f({0.8, 0.0}).x > 0.0);
}

TEST_CASE("assembled force integrates to the total force") {
  const FESpace p2 = FESpace::p2(cell().mesh);
  const ForceSpec force = single({0.8, 0.0});
  const auto load = assemble_vector_load(p2, smooth_force(force), force_quadrature(force));
  const int n = p2.num_dofs();
  double fx = 0.0, fy = 0.0;
  for (int i = 0; i < n; ++i) {
    fx += load[i];
    fy += load[n + i];
  }
  CHECK(std::abs(fx - 20.0) < 0.01 * 20.0);
  CHECK(std::abs(fy) < 0.01 * 20.0);
  CHECK(force.total() == Vec2{20.0, 0.0});

  ForceSpec two = force;
  two.terms.push_back(PointForce{{-0.5, 0.0}, {-1.0, 0.0}, 7.0, 0.1});
  const auto load2 = assemble_vector_load(p2, smooth_force(two), force_quadrature(two));
  fx = 0.0;
  for (int i = 0; i < n; ++i) fx += load2[i];
  CHECK(std::abs(fx - 13.0) < 0.01 * 27.0);
}

TEST_CASE("force placement is validated against the mesh") {
  const Mesh2D& m = cell().mesh;
  CHECK_NOTHROW(single({0.8, 0.0}).validate(m));
  CHECK_THROWS_AS(single({1.15, 0.0}).validate(m), ConfigError);  // support crosses the membrane
  CHECK_THROWS_AS(single({0.65, 0.0}).validate(m), ConfigError);  // support touches the nucleus
  CHECK_THROWS_AS(single({0.2, 0.0}).validate(m), ConfigError);   // inside the nucleus
  CHECK_THROWS_AS(single({2.0, 0.0}).validate(m), ConfigError);
  CHECK_THROWS_AS(single({0.8, 0.0}, 20.0, 0.0).validate(m), ConfigError);
  CHECK_THROWS_AS(single({0.8, 0.0}, -1.0).validate(m), ConfigError);
}

TEST_CASE("zero force gives zero flow") {
  const FlowField f = solve_flow(cell().mesh, cell().surface, single({0.8, 0.0}, 0.0));
  CHECK(norm_inf(f.pressure) == 0.0);
  CHECK(norm_inf(f.velocity) == 0.0);
  CHECK(norm_inf(f.boundary_trace) == 0.0);
}

TEST_CASE("default flow: zero-mean pressure and weak incompressibility") {
  const FlowField f = solve_flow(cell().mesh, cell().surface, single({0.8, 0.0}));
  CHECK(std::abs(f.diagnostics.pressure_mean) < 1e-12);
  CHECK(std::abs(sum(f.pressure)) / f.pressure.size() < 1e-12);
  CHECK(f.diagnostics.pressure.relative_residual <= 1e-12);
  CHECK(f.diagnostics.flux_divergence_residual <= 1e-8);
  CHECK(f.boundary_trace.size() == static_cast<std::size_t>(cell().surface.num_dofs()));
  CHECK(f.diagnostics.max_boundary_speed > 0.0);
}

TEST_CASE("mean speed of the default flow is of order one") {
  const FlowField f = solve_flow(cell().mesh, cell().surface, single({0.8, 0.0}));
  MESSAGE("mean |w| = " << f.diagnostics.mean_speed);
  CHECK(f.diagnostics.mean_speed >= 0.5);
  CHECK(f.diagnostics.mean_speed <= 2.0);
}

TEST_CASE("projected velocity divergence decreases under refinement") {
  double prev = INFINITY;
  for (double h : {0.1, 0.05}) {
    DomainSpec s;
    s.target_h = h;
    const Setup st{s};
    const FlowField f = solve_flow(st.mesh, st.surface, single({0.8, 0.0}));
    CHECK(f.diagnostics.divergence_residual < prev);
    prev = f.diagnostics.divergence_residual;
  }
}

TEST_CASE("pressure is unique up to constants") {
  const ForceSpec force = single({0.8, 0.0});
  FlowOptions o;
  const FlowField a = solve_flow(cell().mesh, cell().surface, force, o);
  o.pressure_guess.assign(a.pressure.size(), 0.0);
  for (std::size_t i = 0; i < o.pressure_guess.size(); ++i) o.pressure_guess[i] = 5.0 + std::sin(3.0 * i);
  const FlowField b = solve_flow(cell().mesh, cell().surface, force, o);
  double diff = 0.0;
  for (std::size_t i = 0; i < a.pressure.size(); ++i) diff = std::max(diff, std::abs(a.pressure[i] - b.pressure[i]));
  CHECK(diff <= 1e-9 * norm_inf(a.pressure));
}

TEST_CASE("flow on the holed cell satisfies no flux through the nucleus") {
  const Setup& c = cell();
  const FlowField f = solve_flow(c.mesh, c.surface, single({0.8, 0.0}));
  // Flux -grad p_h + f through the nucleus circle vanishes: int_Omega w . grad psi = 0 for psi = 1 near the nucleus.
  const FESpace p1 = FESpace::p1(c.mesh);
  const auto near = p1.interpolate([&](Vec2 x) { return norm(x - c.spec.nucleus_center) < 0.5 ? 1.0 : 0.0; });
  const auto rhs = assemble_gradient_load(p1, smooth_force(f.force), force_quadrature(f.force));
  const auto Sp = assemble_stiffness(p1).multiply(f.pressure);
  double flux = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < near.size(); ++i) {
    flux += near[i] * (rhs[i] - Sp[i]);
    scale += std::abs(near[i] * rhs[i]);
  }
  CHECK(std::abs(flux) <= 1e-10 * std::max(scale, 1.0));
}

TEST_CASE("nearest neighbour trace") {
  const Setup& d = disc();
  const FESpace p2 = FESpace::p2(d.mesh);
  const int n = p2.num_dofs();
  CHECK(norm_inf(nearest_neighbor_trace(p2, std::vector<double>(2 * n, 0.0), d.surface)) == 0.0);

  auto field = [&](auto f) {
    std::vector<double> v(2 * n);
    for (int i = 0; i < n; ++i) {
      const Vec2 w = f(p2.dof_coordinates()[i]);
      v[i] = w.x;
      v[n + i] = w.y;
    }
    return v;
  };
  const double c = 0.7;
  const auto tangential = nearest_neighbor_trace(p2, field([&](Vec2 x) { return c * normalized(perp(x)); }), d.surface);
  const auto normal = nearest_neighbor_trace(p2, field([&](Vec2 x) { return c * normalized(x); }), d.surface);
  for (int i = 0; i < d.surface.num_dofs(); ++i) {
    CHECK(std::abs(tangential[i] - c) < 1e-3 * c);
    CHECK(std::abs(normal[i]) < 0.02 * c);
  }
  // Surface nodes that coincide with bulk vertices see the prescribed value exactly.
  const auto& verts = d.mesh.vertices();
  int exact = 0;
  for (int v : d.mesh.boundary_loop(BoundaryTag::Outer)) {
    for (int k = 0; k < d.surface.num_dofs(); ++k) {
      if (norm(d.surface.dof_positions()[k] - verts[v]) < 1e-15) {
        ++exact;
        CHECK(std::abs(tangential[k] - c) < 1e-14);
        CHECK(std::abs(normal[k]) < 1e-14);
      }
    }
  }
  CHECK(exact > 0);
}

TEST_CASE("boundary speed grows as the force approaches the membrane") {
  const Setup& d = disc();
  double prev = 0.0;
  for (double dist : {0.4, 0.3, 0.2, 0.1}) {
    const FlowField f = solve_flow(d.mesh, d.surface, single({1.0 - dist, 0.0}, 1.0, 0.05));
    CHECK(f.diagnostics.max_boundary_speed > prev);
    prev = f.diagnostics.max_boundary_speed;
  }
}

TEST_CASE("flow field VTK and trace CSV") {
  const Setup& c = cell();
  const FlowField f = solve_flow(c.mesh, c.surface, single({0.8, 0.0}));
  const std::string vtk = format_flow_vtk(c.mesh, f);
  CHECK(vtk.rfind("# vtk DataFile Version", 0) == 0);
  CHECK(vtk.find("DATASET UNSTRUCTURED_GRID") != std::string::npos);
  CHECK(vtk.find("SCALARS pressure double") != std::string::npos);
  CHECK(vtk.find("VECTORS velocity double") != std::string::npos);
  const VtkField back = parse_flow_vtk(vtk);
  CHECK(back.points == c.mesh.vertices());
  CHECK(back.cells == c.mesh.triangles());
  REQUIRE(back.pressure.size() == static_cast<std::size_t>(c.mesh.num_vertices()));
  for (int i = 0; i < c.mesh.num_vertices(); ++i) CHECK(back.pressure[i] == f.pressure[i]);
  CHECK_THROWS_AS(parse_flow_vtk("not a vtk file"), ParseError);

  const std::string csv = format_trace_csv(c.surface, f.boundary_trace);
  CHECK(csv.rfind("arclength,speed\n", 0) == 0);
  const auto rows = parse_numeric_csv(csv, 2);
  REQUIRE(rows.size() == static_cast<std::size_t>(c.surface.num_dofs()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i][0] == c.surface.dof_arclength()[i]);
    CHECK(rows[i][1] == f.boundary_trace[i]);
  }
}
