#include "blebsim/nondim.hpp"

#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "blebsim/error.hpp"

namespace blebsim {

namespace {

using nlohmann::json;

struct Field {
  const char* name;
  double PhysicalParams::*ptr;
};

constexpr Field kFields[] = {
    {"L", &PhysicalParams::L},
    {"T_pol", &PhysicalParams::T_pol},
    {"rho", &PhysicalParams::rho},
    {"dyn_viscosity", &PhysicalParams::dyn_viscosity},
    {"c_w", &PhysicalParams::c_w},
    {"kappa_tilde", &PhysicalParams::kappa_tilde},
    {"nu", &PhysicalParams::nu},
    {"mu", &PhysicalParams::mu},
    {"u_max", &PhysicalParams::u_max},
    {"c_v", &PhysicalParams::c_v},
    {"gamma", &PhysicalParams::gamma},
    {"beta1", &PhysicalParams::beta1},
    {"beta2", &PhysicalParams::beta2},
    {"alpha", &PhysicalParams::alpha},
};

}  // namespace

void PhysicalParams::validate() const {
  for (const auto& f : kFields) {
    const double v = this->*f.ptr;
    if (!std::isfinite(v) || !(v > 0.0))
      throw ConfigError(std::string("physical parameters: ") + f.name + " must be finite and > 0");
  }
}

double PhysicalParams::kinematic_viscosity() const {
  const double density = rho * units::kGramPerCm3InKgPerM3;  // kg/m^3
  return dyn_viscosity / density * units::kM2InMicron2;
}

double PhysicalParams::permeability() const {
  return kappa_tilde * dyn_viscosity * units::kPascalInPiconewtonPerMicron2;
}

DimensionlessReport nondimensionalize(const PhysicalParams& p) {
  p.validate();
  DimensionlessReport r;
  const double kappa = p.permeability();
  r.Re = p.c_w * p.L / p.kinematic_viscosity();
  r.Pe = p.c_w * p.L / p.mu;
  r.epsilon = p.nu / (p.L * p.c_w);
  r.kappa_over_L2 = kappa / (p.L * p.L);
  r.C1 = p.L * p.beta1;
  r.C2 = p.L / p.c_w * p.beta2;
  r.C3 = p.L * std::pow(p.u_max, p.alpha) * p.c_v / p.c_w * p.gamma;
  r.T_hat = p.T_pol * p.c_w / p.L;
  r.f_hat_scale = p.dyn_viscosity * units::kPascalInPiconewtonPerMicron2 * p.c_w / kappa;

  auto& fl = r.reduction_flags;
  fl.inertia_coefficient = r.kappa_over_L2 * r.Re;
  fl.cytosol_membrane_ratio = p.c_v * p.L / p.u_max;
  fl.inertia_negligible = fl.inertia_coefficient < kInertiaThreshold;
  fl.bulk_reduction_valid = r.Pe < kPecletThreshold && fl.cytosol_membrane_ratio > kCytosolRatioThreshold;
  char buf[160];
  std::snprintf(buf, sizeof buf, "inertia %s: kappa/L^2 * Re = %.3g (threshold %.0e)",
                fl.inertia_negligible ? "dropped" : "kept", fl.inertia_coefficient, kInertiaThreshold);
  fl.notes.emplace_back(buf);
  std::snprintf(buf, sizeof buf, "cytosolic Ezrin %s: Pe = %.3g (< %.1f), c_v L / u_max = %.3g (> %.0f)",
                fl.bulk_reduction_valid ? "reduced to a constant" : "not reducible", r.Pe, kPecletThreshold,
                fl.cytosol_membrane_ratio, kCytosolRatioThreshold);
  fl.notes.emplace_back(buf);
  return r;
}

std::vector<PhysicalParams> literature_range_corners() {
  std::vector<PhysicalParams> out;
  for (double L : {10.0, 20.0})
    for (double rho : {1.03, 1.1})
      for (double eta : {0.01, 0.1}) {
        PhysicalParams p;
        p.L = L;
        p.rho = rho;
        p.dyn_viscosity = eta;
        out.push_back(p);
      }
  return out;
}

PhysicalParams physical_params_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("physical parameters: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("physical parameters: expected a JSON object");
  PhysicalParams p;
  for (const auto& [key, value] : j.items()) {
    const Field* hit = nullptr;
    for (const auto& f : kFields)
      if (key == f.name) hit = &f;
    if (!hit) throw ConfigError("physical parameters: unknown key '" + key + "'");
    if (!value.is_number()) throw ConfigError("physical parameters: '" + key + "' must be a number");
    p.*(hit->ptr) = value.get<double>();
  }
  p.validate();
  return p;
}

std::string to_json(const PhysicalParams& p) {
  json j = json::object();
  for (const auto& f : kFields) j[f.name] = p.*f.ptr;
  return j.dump(2);
}

std::string to_json(const DimensionlessReport& r) {
  const auto& fl = r.reduction_flags;
  json j = {{"Re", r.Re},
            {"Pe", r.Pe},
            {"epsilon", r.epsilon},
            {"kappa_over_L2", r.kappa_over_L2},
            {"C1", r.C1},
            {"C2", r.C2},
            {"C3", r.C3},
            {"T_hat", r.T_hat},
            {"f_hat_scale", r.f_hat_scale},
            {"reduction_flags",
             {{"inertia_negligible", fl.inertia_negligible},
              {"bulk_reduction_valid", fl.bulk_reduction_valid},
              {"inertia_coefficient", fl.inertia_coefficient},
              {"cytosol_membrane_ratio", fl.cytosol_membrane_ratio},
              {"notes", fl.notes}}}};
  return j.dump(2);
}

std::string format_report(const DimensionlessReport& r) {
  const std::pair<const char*, double> rows[] = {
      {"Re", r.Re}, {"Pe", r.Pe}, {"epsilon", r.epsilon}, {"kappa/L^2", r.kappa_over_L2},
      {"C1", r.C1}, {"C2", r.C2}, {"C3", r.C3},           {"T_hat", r.T_hat},
      {"f_hat scale [pN/um^3]", r.f_hat_scale}};
  std::string out;
  char buf[128];
  for (const auto& [name, v] : rows) {
    std::snprintf(buf, sizeof buf, "%-22s %12.4g\n", name, v);
    out += buf;
  }
  for (const auto& note : r.reduction_flags.notes) out += note + "\n";
  return out;
}

}  // namespace blebsim
