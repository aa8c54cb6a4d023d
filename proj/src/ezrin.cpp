#include "blebsim/ezrin.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "blebsim/error.hpp"
#include "blebsim/fem.hpp"

namespace blebsim {

void TimeSteppingConfig::validate() const {
  if (!(final_time > 0.0)) throw ConfigError("time stepping: final_time must be > 0");
  if (num_steps < 1) throw ConfigError("time stepping: num_steps must be >= 1");
  if (!(epsilon > 0.0)) throw ConfigError("time stepping: epsilon must be > 0");
  if (snapshot_stride < 1) throw ConfigError("time stepping: snapshot_stride must be >= 1");
  if (!(solver.tol > 0.0) || solver.max_iter < 1) throw ConfigError("time stepping: invalid solver options");
  if (!(steady_tol > 0.0) || steady_window < 1) throw ConfigError("time stepping: invalid steady-state criterion");
}

EzrinState make_state(const SurfaceMesh& surface, std::vector<double> U, double time, int step) {
  if (static_cast<int>(U.size()) != surface.num_dofs()) throw ValidationError("ezrin state: wrong coefficient count");
  EzrinState s;
  s.U = std::move(U);
  s.time = time;
  s.step = step;
  const auto [lo, hi] = std::minmax_element(s.U.begin(), s.U.end());
  s.min_u = *lo;
  s.max_u = *hi;
  s.mass = dot(assemble_surface_mass(surface).column_sums(), s.U);
  return s;
}

EzrinState initial_condition_random(const SurfaceMesh& surface, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> U(surface.num_dofs());
  for (double& u : U) u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return make_state(surface, std::move(U));
}

namespace {

SparseMatrix build_system(const SparseMatrix& m, const SparseMatrix& a, const SparseMatrix& s, double dt,
                          double eps) {
  return SparseMatrix::combine(1.0, SparseMatrix::combine(1.0 / dt, m, -1.0, a), eps, s);
}

}  // namespace

EzrinStepper::EzrinStepper(const SurfaceMesh& surface, std::vector<double> trace, const KineticsParams& kinetics,
                           const TimeSteppingConfig& config)
    : surface_(&surface),
      trace_(std::move(trace)),
      kinetics_(kinetics),
      config_(config),
      mass_(assemble_surface_mass(surface)),
      advection_(assemble_surface_advection(surface, trace_)),
      stiffness_(assemble_surface_stiffness(surface)),
      ones_mass_(mass_.column_sums()),
      solver_(build_system(mass_, advection_, stiffness_, config.dt(), config.epsilon), config.solver) {
  config_.validate();
  if (config_.reaction_enabled) kinetics_.validate();
}

double EzrinStepper::mass(std::span<const double> U) const { return dot(ones_mass_, U); }

std::vector<double> EzrinStepper::reaction_load(std::span<const double> U) const {
  const SurfaceMesh& surface = *surface_;
  return assemble_surface_load(surface, [&](int s, double xi) {
    const double u = surface_evaluate(surface, U, s, xi);
    const double w = std::abs(surface_evaluate(surface, trace_, s, xi));
    return adsorption(u, 1.0, kinetics_) - desorption(w, u, kinetics_);
  });
}

EzrinState EzrinStepper::step(const EzrinState& state, SolveReport* report) const {
  const double dt = config_.dt();
  std::vector<double> rhs = mass_.multiply(state.U);
  for (double& v : rhs) v /= dt;
  if (config_.reaction_enabled) {
    const auto r = reaction_load(state.U);
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += r[i];
  }
  SolveReport rep;
  std::vector<double> next;
  try {
    next = solver_.solve(rhs, &rep, state.U);
  } catch (const SolverError& e) {
    throw SolverError(std::string(e.what()) + "; try a smaller time step", e.residual_history());
  }
  if (report) *report = rep;
  EzrinState out;
  out.time = state.time + dt;
  out.step = state.step + 1;
  double diff = 0.0;
  for (std::size_t i = 0; i < next.size(); ++i) diff = std::max(diff, std::abs(next[i] - state.U[i]));
  out.rate = diff / dt;
  const auto [lo, hi] = std::minmax_element(next.begin(), next.end());
  out.min_u = *lo;
  out.max_u = *hi;
  out.mass = mass(next);
  out.U = std::move(next);
  if (!std::isfinite(out.mass)) throw SolverError("ezrin step produced non-finite values; try a smaller time step");
  return out;
}

Trajectory run(const SurfaceMesh& surface, const std::vector<double>& trace, const KineticsParams& kinetics,
               const TimeSteppingConfig& config, const EzrinState& initial) {
  config.validate();
  if (static_cast<int>(trace.size()) != surface.num_dofs()) throw ValidationError("run: trace has wrong length");
  const EzrinStepper stepper(surface, trace, kinetics, config);
  Trajectory traj;
  EzrinState state = initial;
  state.mass = stepper.mass(state.U);
  traj.diagnostics.push_back({state.step, state.time, state.mass, state.min_u, state.max_u, 0.0});
  traj.snapshots.push_back({state.step, state.time, state.U});
  int calm = 0;
  for (int k = 0; k < config.num_steps; ++k) {
    state = stepper.step(state);
    traj.diagnostics.push_back({state.step, state.time, state.mass, state.min_u, state.max_u, state.rate});
    if (state.rate < config.steady_tol) {
      if (++calm >= config.steady_window && !traj.steady_state) {
        traj.steady_state = true;
        traj.steady_time = state.time;
      }
    } else {
      calm = 0;
    }
    if ((k + 1) % config.snapshot_stride == 0 || k + 1 == config.num_steps)
      traj.snapshots.push_back({state.step, state.time, state.U});
  }
  traj.final_state = std::move(state);
  return traj;
}

// ---------------------------------------------------------------------------
// Metrics

namespace {

struct Sample {
  double s;
  double ds;
  double u;
};

// Dense arclength sampling: each segment split into 4 pieces with a
// 3-point Gauss rule.
std::vector<Sample> sample_profile(const SurfaceMesh& surface, std::span<const double> U) {
  std::vector<Sample> out;
  constexpr int kPieces = 4;
  for (int seg = 0; seg < surface.num_segments(); ++seg) {
    const double len = surface.segment_length(seg);
    for (int p = 0; p < kPieces; ++p)
      for (const auto& q : segment_rule()) {
        const double xi = (p + q.xi) / kPieces;
        out.push_back({surface.arclength()[seg] + xi * len, q.weight * len / kPieces, surface_evaluate(surface, U, seg, xi)});
      }
  }
  return out;
}

double cyclic_distance(double a, double b, double period) {
  double d = std::fmod(std::abs(a - b), period);
  return std::min(d, period - d);
}

}  // namespace

PolarizationMetrics polarization_metrics(const SurfaceMesh& surface, std::span<const double> U, Vec2 front_direction) {
  if (static_cast<int>(U.size()) != surface.num_dofs()) throw ValidationError("metrics: wrong coefficient count");
  PolarizationMetrics m;
  const double L = surface.total_length();
  const Vec2 d = normalized(front_direction);
  int front = 0, back = 0;
  for (int i = 0; i < surface.num_dofs(); ++i) {
    const double x = dot(surface.dof_positions()[i], d);
    if (x > dot(surface.dof_positions()[front], d)) front = i;
    if (x < dot(surface.dof_positions()[back], d)) back = i;
  }
  const double s_front = surface.dof_arclength()[front], s_back = surface.dof_arclength()[back];

  const auto samples = sample_profile(surface, U);
  double front_int = 0, front_len = 0, back_int = 0, back_len = 0, depleted = 0;
  for (const auto& p : samples) {
    if (cyclic_distance(p.s, s_front, L) <= L / 8) {
      front_int += p.u * p.ds;
      front_len += p.ds;
    }
    if (cyclic_distance(p.s, s_back, L) <= L / 8) {
      back_int += p.u * p.ds;
      back_len += p.ds;
    }
    if (p.u < 0.1) depleted += p.ds;
  }
  m.front_mean = front_int / front_len;
  m.back_mean = back_int / back_len;
  m.depleted_fraction = depleted / L;

  // Interfaces from the nodal profile (dofs are in arclength order).
  const auto [lo_it, hi_it] = std::minmax_element(U.begin(), U.end());
  const double lo = *lo_it, hi = *hi_it, range = hi - lo;
  if (range < 0.1) return m;
  const double low_band = lo + 0.25 * range, high_band = hi - 0.25 * range;
  const double level10 = lo + 0.1 * range, level90 = lo + 0.9 * range;
  const int n = static_cast<int>(U.size());
  // Unwrapped profile over three laps so walks never need index arithmetic
  // modulo n; the counting pass covers the middle lap.
  std::vector<double> uu(3 * n), ss(3 * n);
  for (int i = 0; i < 3 * n; ++i) {
    uu[i] = U[i % n];
    ss[i] = surface.dof_arclength()[i % n] + L * (i / n);
  }
  auto crossing = [&](int i, double level) {  // between samples i and i + 1
    const double u0 = uu[i], u1 = uu[i + 1];
    const double t = (u1 == u0) ? 0.5 : std::clamp((level - u0) / (u1 - u0), 0.0, 1.0);
    return ss[i] + t * (ss[i + 1] - ss[i]);
  };
  int start = n;
  while (uu[start] > low_band && uu[start] < high_band) ++start;
  int state = uu[start] >= high_band ? 1 : 0;
  std::vector<double> widths;
  for (int j = start + 1; j <= start + n; ++j) {
    const double u = uu[j];
    const int next = u >= high_band ? 1 : (u <= low_band ? 0 : state);
    if (next == state) continue;
    ++m.interface_count;
    const double from_level = state == 0 ? level10 : level90;
    const double to_level = state == 0 ? level90 : level10;
    auto past_from = [&](double v) { return state == 0 ? v <= from_level : v >= from_level; };
    auto past_to = [&](double v) { return state == 0 ? v >= to_level : v <= to_level; };
    int b = j;
    while (b > 0 && !past_from(uu[b])) --b;
    int f = j;
    while (f + 1 < 3 * n && !past_to(uu[f])) ++f;
    const double s_from = crossing(b, from_level);
    const double s_to = crossing(std::max(f - 1, 0), to_level);
    widths.push_back(std::abs(s_to - s_from));
    state = next;
  }
  if (!widths.empty()) {
    double sw = 0.0;
    for (double w : widths) sw += w;
    m.interface_width = sw / static_cast<double>(widths.size());
  }
  return m;
}

}  // namespace blebsim
