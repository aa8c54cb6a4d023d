#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "blebsim/error.hpp"
#include "blebsim/nondim.hpp"

using namespace blebsim;

namespace {

// Hand conversion: rho lambda [Pa s] / rho [kg/m^3] gives lambda in m^2/s.
double reynolds(const PhysicalParams& p) {
  const double lambda_um2_per_s = p.dyn_viscosity / (p.rho * 1000.0) * 1e12;
  return p.c_w * p.L / lambda_um2_per_s;
}

double round_1sig(double x) {
  const double e = std::pow(10.0, std::floor(std::log10(x)));
  return std::round(x / e) * e;
}

}  // namespace

TEST_CASE("reference parameter set") {
  const PhysicalParams p;
  const DimensionlessReport r = nondimensionalize(p);
  CHECK(r.Re == doctest::Approx(reynolds(p)).epsilon(1e-14));
  CHECK(r.Re == doctest::Approx(3.15e-8).epsilon(1e-12));
  CHECK(r.Pe == doctest::Approx(0.05).epsilon(1e-14));
  CHECK(r.epsilon == doctest::Approx(0.002).epsilon(1e-14));
  CHECK(r.T_hat == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r.C1 == doctest::Approx(49.5).epsilon(1e-14));
  CHECK(r.C2 == doctest::Approx(0.105).epsilon(1e-14));
  CHECK(r.C3 == doctest::Approx(4.5).epsilon(1e-12));
  CHECK(std::abs(r.C1 / 50.0 - 1.0) <= 0.1);
  CHECK(std::abs(r.C2 / 0.1 - 1.0) <= 0.1);
  CHECK(std::abs(r.C3 / 5.0 - 1.0) <= 0.1);
  CHECK(r.kappa_over_L2 == doctest::Approx(0.1 * 0.05 / 225.0).epsilon(1e-14));
  CHECK(r.f_hat_scale == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r.reduction_flags.inertia_negligible);
  CHECK(r.reduction_flags.bulk_reduction_valid);
  CHECK(r.reduction_flags.cytosol_membrane_ratio == doctest::Approx(1.5e5).epsilon(1e-12));
}

TEST_CASE("literature ranges") {
  const auto corners = literature_range_corners();
  REQUIRE(corners.size() == 8u);
  double re_lo = INFINITY, re_hi = 0.0, pe_lo = INFINITY, pe_hi = 0.0, eps_lo = INFINITY, eps_hi = 0.0,
         t_lo = INFINITY, t_hi = 0.0;
  for (const auto& p : corners) {
    const auto r = nondimensionalize(p);
    CHECK(r.Re == doctest::Approx(reynolds(p)).epsilon(1e-14));
    re_lo = std::min(re_lo, r.Re), re_hi = std::max(re_hi, r.Re);
    pe_lo = std::min(pe_lo, r.Pe), pe_hi = std::max(pe_hi, r.Pe);
    eps_lo = std::min(eps_lo, r.epsilon), eps_hi = std::max(eps_hi, r.epsilon);
    t_lo = std::min(t_lo, r.T_hat), t_hi = std::max(t_hi, r.T_hat);
  }
  CHECK(round_1sig(re_lo) == doctest::Approx(1e-8));
  CHECK(round_1sig(re_hi) == doctest::Approx(2e-7));
  CHECK(pe_lo >= 0.03);
  CHECK(pe_hi <= 0.07);
  CHECK(eps_lo == doctest::Approx(0.0015));
  CHECK(eps_hi == doctest::Approx(0.003));
  CHECK(t_lo == doctest::Approx(0.75));
  CHECK(t_hi == doctest::Approx(1.5));
}

TEST_CASE("scaling the typical velocity") {
  const PhysicalParams p;
  const auto a = nondimensionalize(p);
  for (double s : {0.5, 2.0, 7.0}) {
    PhysicalParams q = p;
    q.c_w *= s;
    const auto b = nondimensionalize(q);
    CHECK(b.Re == doctest::Approx(s * a.Re).epsilon(1e-14));
    CHECK(b.Pe == doctest::Approx(s * a.Pe).epsilon(1e-14));
    CHECK(b.epsilon == doctest::Approx(a.epsilon / s).epsilon(1e-14));
    CHECK(b.C2 == doctest::Approx(a.C2 / s).epsilon(1e-14));
    CHECK(b.C3 == doctest::Approx(a.C3 / s).epsilon(1e-14));
    CHECK(b.C1 == a.C1);
  }
}

TEST_CASE("reduction flags follow the thresholds") {
  PhysicalParams p;
  p.mu = 3.0;  // Pe = 0.5
  auto r = nondimensionalize(p);
  CHECK_FALSE(r.reduction_flags.bulk_reduction_valid);
  CHECK(r.reduction_flags.inertia_negligible);
  p = {};
  p.c_v = 1e-22;  // c_v L / u_max = 15 is still enough
  CHECK(nondimensionalize(p).reduction_flags.bulk_reduction_valid);
  p.c_v = 5e-24;
  CHECK_FALSE(nondimensionalize(p).reduction_flags.bulk_reduction_valid);
  p = {};
  p.dyn_viscosity = 1e-9;  // water-like inertia
  p.kappa_tilde = 1e9;
  r = nondimensionalize(p);
  CHECK(r.reduction_flags.inertia_coefficient == doctest::Approx(r.kappa_over_L2 * r.Re));
  CHECK_FALSE(r.reduction_flags.inertia_negligible);
  CHECK_FALSE(r.reduction_flags.notes.empty());
}

TEST_CASE("invalid physical parameters") {
  for (double bad : {0.0, -1.0, double(NAN), double(INFINITY)}) {
    PhysicalParams p;
    p.L = bad;
    CHECK_THROWS_AS(nondimensionalize(p), ConfigError);
    p = {};
    p.gamma = bad;
    CHECK_THROWS_AS(p.validate(), ConfigError);
  }
}

TEST_CASE("physical parameter JSON") {
  PhysicalParams p;
  p.L = 12.5;
  p.beta1 = 2.0;
  const PhysicalParams q = physical_params_from_json(to_json(p));
  CHECK(q.L == 12.5);
  CHECK(q.beta1 == 2.0);
  CHECK(q.gamma == p.gamma);
  CHECK(physical_params_from_json("{\"mu\": 10}").mu == 10.0);
  CHECK(physical_params_from_json("{}").L == 15.0);
  CHECK_THROWS_AS(physical_params_from_json("{\"length\": 10}"), ConfigError);
  CHECK_THROWS_AS(physical_params_from_json("{\"L\": \"ten\"}"), ConfigError);
  CHECK_THROWS_AS(physical_params_from_json("{\"L\": -3}"), ConfigError);
  CHECK_THROWS_AS(physical_params_from_json("[1, 2"), ConfigError);

  const auto r = nondimensionalize(PhysicalParams{});
  const std::string text = format_report(r);
  CHECK(text.find("Re") != std::string::npos);
  CHECK(text.find("C3") != std::string::npos);
  CHECK(to_json(r).find("\"reduction_flags\"") != std::string::npos);
}
