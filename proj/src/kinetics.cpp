#include "blebsim/kinetics.hpp"

#include <algorithm>
#include <cmath>

#include "blebsim/error.hpp"

namespace blebsim {

void KineticsParams::validate() const {
  if (!(C1 > 0.0)) throw ConfigError("kinetics: C1 must be > 0");
  if (!(C2 >= 0.0)) throw ConfigError("kinetics: C2 must be >= 0");
  if (!(C3 > 0.0)) throw ConfigError("kinetics: C3 must be > 0");
  if (!(alpha >= 1.0)) throw ConfigError("kinetics: alpha must be >= 1");
  if (!(zeta > 1.0)) throw ConfigError("kinetics: zeta must be > 1");
}

double desorption(double w, double u, const KineticsParams& p) {
  const double k = p.C1 * w + p.C2;
  if (u <= 1.0) return k * u;
  return k * (std::pow(u, p.zeta) + p.zeta - 1.0) / p.zeta;
}

double adsorption(double u, double v, const KineticsParams& p) {
  if (u < 0.0 || u > 1.0) return 0.0;
  return p.C3 * std::pow(u, p.alpha) * (1.0 - u) * v;
}

double potential(double u, double w, const KineticsParams& p) {
  const double k = p.C1 * w + p.C2;
  if (u <= 1.0) {
    // Negative u follows the u <= 1 formulas; adsorption vanishes there so
    // only the desorption part of the antiderivative continues.
    const double a1 = p.alpha + 1.0, a2 = p.alpha + 2.0;
    const double ua = std::max(u, 0.0);
    return 0.5 * k * (u * u - 1.0) - p.C3 * ((std::pow(ua, a1) - 1.0) / a1 - (std::pow(ua, a2) - 1.0) / a2);
  }
  const double z = p.zeta;
  return k / z * ((std::pow(u, z + 1.0) - 1.0) / (z + 1.0) + (z - 1.0) * (u - 1.0));
}

double potential_prime(double u, double w, const KineticsParams& p) {
  return desorption(w, u, p) - adsorption(u, 1.0, p);
}

double phase_threshold(const KineticsParams& p) {
  if (p.alpha == 1.0) return (p.C3 - p.C2) / p.C1;
  const double a = p.alpha;
  return p.C3 / p.C1 * std::pow(1.0 - 1.0 / a, a - 1.0) / a - p.C2 / p.C1;
}

namespace {

template <class F>
double bisect(F&& f, double lo, double hi) {
  double flo = f(lo);
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

PhaseReport classify_phases(double w, const KineticsParams& p) {
  p.validate();
  PhaseReport r;
  r.threshold = phase_threshold(p);
  const double k = p.C1 * w + p.C2;
  if (p.alpha == 1.0) {
    if (w < r.threshold) {
      r.states.push_back({0.0, false});
      r.states.push_back({(p.C3 - p.C2 - p.C1 * w) / p.C3, true});
    } else {
      r.states.push_back({0.0, true});
    }
    return r;
  }
  r.states.push_back({0.0, true});
  if (w >= r.threshold) return r;
  // Nonzero steady states solve g(u) = C3 u^(alpha-1) (1 - u) - k = 0. g
  // peaks at u* = (alpha - 1) / alpha; the unstable root lies below it and
  // the stable root above it, below 1 - C2 / C3.
  const double a = p.alpha;
  const double peak = (a - 1.0) / a;
  auto g = [&](double u) { return p.C3 * std::pow(u, a - 1.0) * (1.0 - u) - k; };
  const double lower = bisect(g, 0.0, peak);
  const double upper = bisect(g, peak, 1.0 - p.C2 / p.C3);
  r.states.push_back({lower, false});
  r.states.push_back({upper, true});
  return r;
}

double interface_width(const KineticsParams& p, double epsilon) {
  return std::sqrt(epsilon / p.C3) * std::pow(1.0 - p.C2 / p.C3, -1.5);
}

double integrate_reaction(double u0, double w, const KineticsParams& p, double dt, double t_end) {
  auto rhs = [&](double u) { return adsorption(u, 1.0, p) - desorption(w, u, p); };
  double u = u0;
  const long steps = std::lround(t_end / dt);
  for (long i = 0; i < steps; ++i) {
    const double k1 = rhs(u);
    const double k2 = rhs(u + 0.5 * dt * k1);
    const double k3 = rhs(u + 0.5 * dt * k2);
    const double k4 = rhs(u + dt * k3);
    u += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return u;
}

}  // namespace blebsim
