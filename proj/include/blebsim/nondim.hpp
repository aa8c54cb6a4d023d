#pragma once

#include <string>
#include <vector>

namespace blebsim {

// Unit conversions. Lengths are in micrometres, times in seconds, forces in
// piconewtons throughout the module.
namespace units {
inline constexpr double kPascalInPiconewtonPerMicron2 = 1.0;
inline constexpr double kGramPerCm3InKgPerM3 = 1000.0;
inline constexpr double kM2InMicron2 = 1e12;
}  // namespace units

struct PhysicalParams {
  double L = 15.0;              // cell diameter [um]
  double T_pol = 150.0;         // polarization duration [s]
  double rho = 1.05;            // cytoplasm density [g/cm^3]
  double dyn_viscosity = 0.05;  // rho lambda [Pa s]
  double c_w = 0.1;             // typical velocity [um/s]
  double kappa_tilde = 0.1;     // hydraulic permeability [um^4/(pN s)]
  double nu = 0.003;            // membrane Ezrin diffusion [um^2/s]
  double mu = 30.0;             // cytosolic Ezrin diffusion [um^2/s]
  double u_max = 1e-22;         // [mol/um^2]
  double c_v = 1e-18;           // [mol/um^3]
  double gamma = 3e38;          // [um^(2 alpha + 3) / (mol^(alpha + 1) s)]
  double beta1 = 3.3;           // [1/um]
  double beta2 = 0.0007;        // [1/s]
  double alpha = 1.0;

  /// Throws ConfigError unless every field is finite and strictly positive.
  void validate() const;

  /// Kinematic viscosity lambda [um^2/s].
  double kinematic_viscosity() const;
  /// kappa = kappa_tilde * rho lambda [um^2].
  double permeability() const;
};

struct ReductionFlags {
  bool inertia_negligible = false;       // kappa / L^2 * Re < 1e-4
  bool bulk_reduction_valid = false;     // Pe < 0.1 and c_v L / u_max > 10
  double inertia_coefficient = 0.0;      // kappa / L^2 * Re
  double cytosol_membrane_ratio = 0.0;   // c_v L / u_max
  std::vector<std::string> notes;
};

struct DimensionlessReport {
  double Re = 0.0;
  double Pe = 0.0;
  double epsilon = 0.0;
  double kappa_over_L2 = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;
  double C3 = 0.0;
  double T_hat = 0.0;
  double f_hat_scale = 0.0;  // rho lambda c_w / kappa [pN/um^3]
  ReductionFlags reduction_flags;
};

inline constexpr double kInertiaThreshold = 1e-4;
inline constexpr double kPecletThreshold = 0.1;
inline constexpr double kCytosolRatioThreshold = 10.0;

DimensionlessReport nondimensionalize(const PhysicalParams& p);

/// Corners of the literature box L in {10, 20}, rho in {1.03, 1.1},
/// rho lambda in {0.01, 0.1}; everything else at the defaults.
std::vector<PhysicalParams> literature_range_corners();

/// JSON object with the PhysicalParams field names; missing keys keep their
/// defaults, unknown keys are a ConfigError.
PhysicalParams physical_params_from_json(const std::string& text);
std::string to_json(const PhysicalParams& p);
std::string to_json(const DimensionlessReport& r);
/// Aligned two-column text.
std::string format_report(const DimensionlessReport& r);

}  // namespace blebsim
