#pragma once

#include <vector>

namespace blebsim {

struct KineticsParams {
  double C1 = 50.0;
  double C2 = 0.1;
  double C3 = 5.0;
  double alpha = 1.0;
  double zeta = 2.0;

  /// Throws ConfigError unless C1 > 0, C2 >= 0, C3 > 0, zeta > 1, alpha >= 1.
  void validate() const;
};

/// Desorption rate d(w, u) with k = C1 w + C2; the u > 1 branch models
/// supersaturation and matches value and slope at u = 1.
double desorption(double w_speed, double u, const KineticsParams& p);
/// Adsorption rate a(u, v) = C3 u^alpha (1 - u) v on [0, 1], zero elsewhere.
double adsorption(double u, double v, const KineticsParams& p);

/// W with W' = d - a (v = 1), normalised so that W(1) is the same from both
/// branches.
double potential(double u, double w_speed, const KineticsParams& p);
double potential_prime(double u, double w_speed, const KineticsParams& p);

struct SteadyState {
  double u;
  bool stable;
};

struct PhaseReport {
  double threshold;  // w bar
  std::vector<SteadyState> states;  // sorted by u
};

PhaseReport classify_phases(double w_speed, const KineticsParams& p);
double phase_threshold(const KineticsParams& p);

/// Order-of-magnitude width of a phase interface, sqrt(eps / C3) (1 - C2 / C3)^(-3/2).
double interface_width(const KineticsParams& p, double epsilon);

/// Classic RK4 for du/dt = a(u, 1) - d(w, u); returns u(t_end).
double integrate_reaction(double u0, double w_speed, const KineticsParams& p, double dt, double t_end);

}  // namespace blebsim
