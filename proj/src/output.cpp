#include "blebsim/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "blebsim/error.hpp"

namespace blebsim {

namespace fs = std::filesystem;

namespace {

void append(std::string& out, const char* fmt, auto... args) {
  char buf[256];
  const int n = std::snprintf(buf, sizeof buf, fmt, args...);
  out.append(buf, static_cast<std::size_t>(n));
}

class Digest {
 public:
  Digest() : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) throw IoError("sha256: init failed");
  }
  ~Digest() { EVP_MD_CTX_free(ctx_); }
  Digest(const Digest&) = delete;
  Digest& operator=(const Digest&) = delete;

  void update(const void* data, std::size_t n) {
    if (EVP_DigestUpdate(ctx_, data, n) != 1) throw IoError("sha256: update failed");
  }
  std::string hex() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx_, md, &len) != 1) throw IoError("sha256: final failed");
    std::string out;
    for (unsigned int i = 0; i < len; ++i) append(out, "%02x", md[i]);
    return out;
  }

 private:
  EVP_MD_CTX* ctx_;
};

}  // namespace

void write_text_file(const fs::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + tmp.string() + " for writing");
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!f) throw IoError("write failed: " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

std::string read_text_file(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string sha256_hex(std::string_view data) {
  Digest d;
  d.update(data.data(), data.size());
  return d.hex();
}

std::string sha256_file(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string());
  Digest d;
  char buf[1 << 16];
  while (f) {
    f.read(buf, sizeof buf);
    if (f.gcount() > 0) d.update(buf, static_cast<std::size_t>(f.gcount()));
  }
  return d.hex();
}

std::string format_flow_vtk(const Mesh2D& mesh, const FlowField& flow) {
  const int nv = mesh.num_vertices();
  const std::size_t n2 = flow.velocity.size() / 2;
  if (static_cast<int>(flow.pressure.size()) != nv || n2 < static_cast<std::size_t>(nv))
    throw ValidationError("vtk: flow field does not match the mesh");
  std::string out = "# vtk DataFile Version 3.0\nblebsim flow\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  append(out, "POINTS %d double\n", nv);
  for (const Vec2& p : mesh.vertices()) append(out, "%.17g %.17g 0\n", p.x, p.y);
  const int nt = mesh.num_triangles();
  append(out, "CELLS %d %d\n", nt, 4 * nt);
  for (const auto& t : mesh.triangles()) append(out, "3 %d %d %d\n", t[0], t[1], t[2]);
  append(out, "CELL_TYPES %d\n", nt);
  for (int t = 0; t < nt; ++t) out += "5\n";
  append(out, "POINT_DATA %d\n", nv);
  out += "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
  for (double p : flow.pressure) append(out, "%.17g\n", p);
  out += "SCALARS speed double 1\nLOOKUP_TABLE default\n";
  for (int i = 0; i < nv; ++i) append(out, "%.17g\n", std::hypot(flow.velocity[i], flow.velocity[n2 + i]));
  out += "VECTORS velocity double\n";
  for (int i = 0; i < nv; ++i) append(out, "%.17g %.17g 0\n", flow.velocity[i], flow.velocity[n2 + i]);
  return out;
}

VtkField parse_flow_vtk(const std::string& text) {
  std::istringstream in(text);
  VtkField f;
  std::string line;
  int lineno = 0;
  auto next = [&]() -> std::istringstream {
    if (!std::getline(in, line)) throw ParseError("vtk: unexpected end of file", lineno);
    ++lineno;
    return std::istringstream(line);
  };
  auto expect_header = [&](const std::string& key) {
    std::istringstream ls = next();
    std::string word;
    ls >> word;
    if (word != key) throw ParseError("vtk: expected " + key, lineno);
    return ls;
  };
  for (int i = 0; i < 4; ++i) next();
  int n = 0;
  expect_header("POINTS") >> n;
  for (int i = 0; i < n; ++i) {
    Vec2 p;
    double z;
    if (!(next() >> p.x >> p.y >> z)) throw ParseError("vtk: bad point", lineno);
    f.points.push_back(p);
  }
  int nt = 0;
  expect_header("CELLS") >> nt;
  for (int i = 0; i < nt; ++i) {
    int k;
    Triangle t;
    if (!(next() >> k >> t[0] >> t[1] >> t[2]) || k != 3) throw ParseError("vtk: bad cell", lineno);
    for (int v : t)
      if (v < 0 || v >= n) throw ParseError("vtk: cell index out of range", lineno);
    f.cells.push_back(t);
  }
  expect_header("CELL_TYPES");
  for (int i = 0; i < nt; ++i) next();
  expect_header("POINT_DATA");
  auto scalars = [&](const std::string& name, std::vector<double>& out) {
    std::string word;
    expect_header("SCALARS") >> word;
    if (word != name) throw ParseError("vtk: expected scalars " + name, lineno);
    next();
    out.resize(n);
    for (double& v : out)
      if (!(next() >> v)) throw ParseError("vtk: bad " + name + " value", lineno);
  };
  scalars("pressure", f.pressure);
  scalars("speed", f.speed);
  return f;
}

std::string format_trace_csv(const SurfaceMesh& surface, std::span<const double> trace) {
  if (static_cast<int>(trace.size()) != surface.num_dofs()) throw ValidationError("trace csv: wrong length");
  std::string out = "arclength,speed\n";
  for (int i = 0; i < surface.num_dofs(); ++i) append(out, "%.17g,%.17g\n", surface.dof_arclength()[i], trace[i]);
  return out;
}

std::string format_trajectory_csv(const SurfaceMesh& surface, const std::vector<Snapshot>& snapshots) {
  std::string out = "step,time,arclength,u\n";
  for (const auto& snap : snapshots) {
    if (static_cast<int>(snap.U.size()) != surface.num_dofs()) throw ValidationError("trajectory csv: wrong length");
    for (int i = 0; i < surface.num_dofs(); ++i)
      append(out, "%d,%.17g,%.17g,%.17g\n", snap.step, snap.time, surface.dof_arclength()[i], snap.U[i]);
  }
  return out;
}

std::string format_diagnostics_csv(const std::vector<DiagnosticRow>& rows) {
  std::string out = "step,time,mass,min_u,max_u,residual\n";
  for (const auto& r : rows)
    append(out, "%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.step, r.time, r.mass, r.min_u, r.max_u, r.residual);
  return out;
}

std::vector<std::vector<double>> parse_numeric_csv(const std::string& text, std::size_t columns) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<double>> rows;
  int lineno = 0;
  while (std::getline(in, line)) {
    if (++lineno == 1 || line.empty()) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const std::size_t comma = std::min(line.find(',', pos), line.size());
      const std::string cell = line.substr(pos, comma - pos);
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (cell.empty() || end != cell.c_str() + cell.size()) throw ParseError("csv: bad number '" + cell + "'", lineno);
      row.push_back(v);
      pos = comma + 1;
    }
    if (row.size() != columns) throw ParseError("csv: expected " + std::to_string(columns) + " columns", lineno);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace blebsim
