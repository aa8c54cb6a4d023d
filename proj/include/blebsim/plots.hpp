#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "blebsim/output.hpp"

namespace blebsim {

struct Series {
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
};

/// Self-contained SVG line chart. Throws ValidationError for empty input or
/// series with mismatched lengths.
std::string render_line_chart(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                              const std::vector<Series>& series);

/// Filled-triangle colormap of per-point values.
std::string render_field(const std::string& title, const VtkField& field, const std::vector<double>& values);

inline constexpr const char* kBoundarySpeedPlot = "boundary_speed.svg";
inline constexpr const char* kProfilesPlot = "ezrin_profiles.svg";
inline constexpr const char* kFieldPlot = "flow_speed.svg";

/// Renders the boundary-speed profile, u against arclength per snapshot and
/// the flow-speed colormap from trace.csv, trajectory.csv and flow.vtk in
/// `run_dir`. Returns the written paths.
std::vector<std::filesystem::path> emit_plots(const std::filesystem::path& run_dir);

}  // namespace blebsim
