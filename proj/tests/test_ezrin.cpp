#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "blebsim/error.hpp"
#include "blebsim/ezrin.hpp"
#include "blebsim/fem.hpp"
#include "blebsim/harness.hpp"
#include "blebsim/output.hpp"

using namespace blebsim;

namespace {

// Smooth speed profile with random Fourier coefficients.
std::vector<double> random_trace(const SurfaceMesh& s, double amplitude, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double a[4], b[4];
  for (int k = 0; k < 4; ++k) a[k] = u(rng), b[k] = u(rng);
  std::vector<double> t(s.num_dofs());
  for (int i = 0; i < s.num_dofs(); ++i) {
    const double th = 2.0 * kPi * s.dof_arclength()[i] / s.total_length();
    double v = 0.0;
    for (int k = 0; k < 4; ++k) v += a[k] * std::cos((k + 1) * th) + b[k] * std::sin((k + 1) * th);
    t[i] = amplitude * v / 4.0;
  }
  return t;
}

// P2 profile evaluated at arclength s.
double sample(const SurfaceMesh& surf, std::span<const double> U, double s) {
  const auto& arc = surf.arclength();
  const int n = surf.num_nodes();
  int seg = static_cast<int>(std::upper_bound(arc.begin(), arc.end(), s) - arc.begin()) - 1;
  seg = std::clamp(seg, 0, n - 1);
  const double xi = std::clamp((s - arc[seg]) / surf.segment_length(seg), 0.0, 1.0);
  return surface_evaluate(surf, U, seg, xi);
}

}  // namespace

TEST_CASE("random initial condition") {
  const SurfaceMesh s = uniform_surface(Ellipse{1.2, 0.8}, 5000);
  const EzrinState a = initial_condition_random(s, 42), b = initial_condition_random(s, 42);
  CHECK(a.U == b.U);
  CHECK(initial_condition_random(s, 43).U != a.U);
  REQUIRE(a.U.size() == 10000u);
  const double mean = sum(a.U) / a.U.size();
  CHECK(mean >= 0.45);
  CHECK(mean <= 0.55);
  CHECK(*std::min_element(a.U.begin(), a.U.end()) >= 0.0);
  CHECK(*std::max_element(a.U.begin(), a.U.end()) <= 1.0);
  CHECK(a.mass == doctest::Approx(dot(assemble_surface_mass(s).column_sums(), a.U)).epsilon(1e-14));
}

TEST_CASE("pure diffusion conserves mass and lowers the maximum") {
  const SurfaceMesh s = uniform_surface(Ellipse{1.2, 0.8}, 200);
  TimeSteppingConfig cfg;
  cfg.reaction_enabled = false;
  cfg.num_steps = 200;
  cfg.epsilon = 0.01;
  const EzrinStepper stepper(s, std::vector<double>(s.num_dofs(), 0.0), KineticsParams{}, cfg);
  EzrinState st = initial_condition_random(s, 1);
  const double m0 = st.mass;
  double prev_max = st.max_u;
  for (int k = 0; k < cfg.num_steps; ++k) {
    st = stepper.step(st);
    CHECK(std::abs(st.mass - m0) <= 1e-10 * m0);
    CHECK(st.max_u <= prev_max);
    prev_max = st.max_u;
  }
}

TEST_CASE("constant state under zero flow moves by the reaction only") {
  const SurfaceMesh s = uniform_surface(Ellipse{1.2, 0.8}, 100);
  const KineticsParams p;
  TimeSteppingConfig cfg;
  const EzrinStepper stepper(s, std::vector<double>(s.num_dofs(), 0.0), p, cfg);
  for (double c : {0.0, 0.3, 0.98, 1.0, 1.2}) {
    const EzrinState next = stepper.step(make_state(s, std::vector<double>(s.num_dofs(), c)));
    const double expected = c + cfg.dt() * (adsorption(c, 1.0, p) - desorption(0.0, c, p));
    for (double u : next.U) CHECK(std::abs(u - expected) < 1e-12);
  }
}

TEST_CASE("transport conserves mass for any flow") {
  const SurfaceMesh s = uniform_surface(Ellipse{1.2, 0.8}, 300);
  TimeSteppingConfig cfg;
  cfg.reaction_enabled = false;
  cfg.num_steps = 100;
  cfg.final_time = 0.1;
  cfg.snapshot_stride = 10;
  const auto trace = random_trace(s, 30.0, 9);
  const Trajectory t = run(s, trace, KineticsParams{}, cfg, initial_condition_random(s, 3));
  const double m0 = t.diagnostics.front().mass;
  for (const auto& row : t.diagnostics) CHECK(std::abs(row.mass - m0) <= 1e-10 * m0);
  CHECK(t.diagnostics.size() == 101u);
  CHECK(t.snapshots.size() == 11u);
  CHECK(t.snapshots.front().step == 0);
  CHECK(t.snapshots.back().step == 100);

  const EzrinStepper stepper(s, trace, KineticsParams{}, cfg);
  CHECK(norm_inf(stepper.advection_matrix().column_sums()) < 1e-12);
  CHECK(norm_inf(stepper.stiffness_matrix().column_sums()) < 1e-12);
}

TEST_CASE("zero flow relaxes to the stable reaction state") {
  const SurfaceMesh s = uniform_surface(Ellipse{1.2, 0.8}, 200);
  TimeSteppingConfig cfg;
  cfg.final_time = 10.0;
  cfg.num_steps = 2000;
  const Trajectory t = run(s, std::vector<double>(s.num_dofs(), 0.0), KineticsParams{}, cfg,
                           initial_condition_random(s, 42));
  for (double u : t.final_state.U) CHECK(std::abs(u - 0.98) < 1e-3);
  CHECK(t.steady_state);
  CHECK(t.steady_time > 0.0);
  CHECK(t.steady_time < 10.0);
}

TEST_CASE("uniform fast flow depletes the membrane") {
  const SurfaceMesh s = uniform_surface(Ellipse{1.0, 1.0}, 200);
  TimeSteppingConfig cfg;
  cfg.final_time = 5.0;
  cfg.num_steps = 1000;
  const Trajectory t = run(s, std::vector<double>(s.num_dofs(), 0.2), KineticsParams{}, cfg,
                           initial_condition_random(s, 42));
  for (double u : t.final_state.U) CHECK(std::abs(u) < 1e-3);
}

TEST_CASE("steady-state flag needs a sustained window") {
  const SurfaceMesh s = uniform_surface(Ellipse{1.2, 0.8}, 50);
  TimeSteppingConfig cfg;
  cfg.num_steps = 19;
  cfg.final_time = 1.0;
  // Already at the stable state: every step is steady, but the window of 20 never fills.
  const EzrinState start = make_state(s, std::vector<double>(s.num_dofs(), 0.98));
  CHECK_FALSE(run(s, std::vector<double>(s.num_dofs(), 0.0), KineticsParams{}, cfg, start).steady_state);
  cfg.num_steps = 20;
  const Trajectory t = run(s, std::vector<double>(s.num_dofs(), 0.0), KineticsParams{}, cfg, start);
  CHECK(t.steady_state);
  CHECK(t.steady_time == doctest::Approx(1.0));
}

TEST_CASE("polarization metrics on constructed profiles") {
  const SurfaceMesh s = uniform_surface(Ellipse{1.2, 0.8}, 400);
  const std::vector<double> flat(s.num_dofs(), 0.6);
  PolarizationMetrics m = polarization_metrics(s, flat);
  CHECK(m.front_mean == doctest::Approx(m.back_mean));
  CHECK(m.interface_count == 0);
  CHECK(m.depleted_fraction == 0.0);
  CHECK(m.interface_width == 0.0);

  std::vector<double> step(s.num_dofs());
  for (int i = 0; i < s.num_dofs(); ++i) step[i] = s.dof_positions()[i].x > 0.0 ? 0.0 : 0.98;
  m = polarization_metrics(s, step);
  CHECK(m.depleted_fraction == doctest::Approx(0.5).epsilon(0.01));
  CHECK(m.interface_count == 2);
  CHECK(m.front_mean == 0.0);
  CHECK(m.back_mean == doctest::Approx(0.98));

  // Facing the other way swaps front and back.
  const PolarizationMetrics r = polarization_metrics(s, step, {-1.0, 0.0});
  CHECK(r.front_mean == doctest::Approx(0.98));
  CHECK(r.back_mean == 0.0);

  std::vector<double> sides(s.num_dofs());
  for (int i = 0; i < s.num_dofs(); ++i) sides[i] = std::abs(s.dof_positions()[i].x) < 0.6 ? 0.98 : 0.0;
  CHECK(polarization_metrics(s, sides).interface_count == 4);
  CHECK_THROWS_AS(polarization_metrics(s, std::vector<double>(3, 0.0)), ValidationError);
}

TEST_CASE("trajectory and diagnostics CSV layout") {
  const SurfaceMesh s = uniform_surface(Ellipse{1.2, 0.8}, 20);
  TimeSteppingConfig cfg;
  cfg.num_steps = 10;
  cfg.snapshot_stride = 5;
  const Trajectory t = run(s, std::vector<double>(s.num_dofs(), 0.0), KineticsParams{}, cfg,
                           initial_condition_random(s, 42));
  const std::string traj = format_trajectory_csv(s, t.snapshots);
  CHECK(traj.rfind("step,time,arclength,u\n", 0) == 0);
  const auto rows = parse_numeric_csv(traj, 4);
  CHECK(rows.size() == 3u * s.num_dofs());
  CHECK(rows.back()[0] == 10.0);
  CHECK(rows.back()[3] == t.final_state.U.back());
  const std::string diag = format_diagnostics_csv(t.diagnostics);
  CHECK(diag.rfind("step,time,mass,min_u,max_u,residual\n", 0) == 0);
  CHECK(parse_numeric_csv(diag, 6).size() == 11u);
  CHECK_THROWS_AS(parse_numeric_csv("a,b\n1,2\n3\n", 2), ParseError);
}

TEST_CASE("time stepping validation") {
  TimeSteppingConfig c;
  CHECK_NOTHROW(c.validate());
  c.num_steps = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.epsilon = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.final_time = -1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  const SurfaceMesh s = uniform_surface(Ellipse{1.2, 0.8}, 20);
  CHECK_THROWS_AS(run(s, std::vector<double>(3, 0.0), KineticsParams{}, TimeSteppingConfig{},
                      initial_condition_random(s, 1)),
                  ValidationError);
}

TEST_CASE("default run stays nonnegative and bounded") {
  const Simulation sim = simulate(default_config());
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& row : sim.trajectory.diagnostics) {
    lo = std::min(lo, row.min_u);
    hi = std::max(hi, row.max_u);
  }
  MESSAGE("u range over all steps [" << lo << ", " << hi << "]");
  CHECK(lo >= -1e-8);
  CHECK(hi <= std::max(sim.trajectory.diagnostics.front().max_u, 1.0) + 0.1);
}

TEST_CASE("halving h and dt changes the final profile by at most 5%") {
  RunConfig coarse = default_config();
  RunConfig fine = coarse;
  fine.domain.target_h /= 2.0;
  fine.time.num_steps *= 2;
  const Simulation a = simulate(coarse), b = simulate(fine);
  // Compare on the fine surface's arclength grid, normalised by total length.
  const auto& sa = *a.surface;
  const auto& sb = *b.surface;
  double diff = 0.0, ref = 0.0;
  const int n = 4000;
  for (int i = 0; i < n; ++i) {
    const double t = (i + 0.5) / n;
    const double ua = sample(sa, a.trajectory.final_state.U, t * sa.total_length());
    const double ub = sample(sb, b.trajectory.final_state.U, t * sb.total_length());
    diff += (ua - ub) * (ua - ub);
    ref += ub * ub;
  }
  const double rel = std::sqrt(diff / ref);
  MESSAGE("relative L2 change " << rel);
  CHECK(rel <= 0.05);
}
