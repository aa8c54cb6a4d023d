#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "blebsim/darcy.hpp"
#include "blebsim/ezrin.hpp"
#include "blebsim/mesh.hpp"
#include "blebsim/surface_mesh.hpp"

namespace blebsim {

/// Writes `text` to a sibling temporary file and renames it into place.
/// Throws IoError.
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

/// Lowercase hex SHA-256 of the file contents. Throws IoError.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(std::string_view data);

/// Legacy ASCII VTK unstructured grid on the mesh vertices with point data
/// `pressure`, `speed` and vector `velocity`.
std::string format_flow_vtk(const Mesh2D& mesh, const FlowField& flow);

struct VtkField {
  std::vector<Vec2> points;
  std::vector<Triangle> cells;
  std::vector<double> pressure;
  std::vector<double> speed;
};
/// Reads back the subset written by format_flow_vtk. Throws ParseError.
VtkField parse_flow_vtk(const std::string& text);

/// Header `arclength,speed`; speed is the signed tangential trace.
std::string format_trace_csv(const SurfaceMesh& surface, std::span<const double> trace);
/// Header `step,time,arclength,u`, one row per snapshot and dof.
std::string format_trajectory_csv(const SurfaceMesh& surface, const std::vector<Snapshot>& snapshots);
/// Header `step,time,mass,min_u,max_u,residual`.
std::string format_diagnostics_csv(const std::vector<DiagnosticRow>& rows);

/// Splits plain comma-separated numeric rows, skipping the header. Throws
/// ParseError with line numbers.
std::vector<std::vector<double>> parse_numeric_csv(const std::string& text, std::size_t columns);

}  // namespace blebsim
