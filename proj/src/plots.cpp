#include "blebsim/plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "blebsim/error.hpp"

namespace blebsim {

namespace fs = std::filesystem;

namespace {

constexpr double kWidth = 720, kHeight = 440;
constexpr double kLeft = 80, kRight = 20, kTop = 40, kBottom = 60;

void append(std::string& out, const char* fmt, auto... args) {
  char buf[512];
  const int n = std::snprintf(buf, sizeof buf, fmt, args...);
  out.append(buf, static_cast<std::size_t>(std::min<int>(n, sizeof buf - 1)));
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo, hi;
};

Range padded(double lo, double hi) {
  if (!(hi > lo)) {
    const double pad = std::max(1.0, std::abs(lo)) * 0.5;
    return {lo - pad, hi + pad};
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

// Roughly five ticks at 1/2/5 multiples of a power of ten.
std::vector<double> ticks(Range r) {
  const double raw = (r.hi - r.lo) / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  std::vector<double> out;
  for (double t = std::ceil(r.lo / step) * step; t <= r.hi + 1e-9 * step; t += step)
    out.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
  return out;
}

std::string header(const std::string& title) {
  std::string out;
  append(out,
         "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n",
         kWidth, kHeight, kWidth, kHeight);
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  append(out, "<text x=\"%.0f\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">",
         kWidth / 2);
  out += escape(title) + "</text>\n";
  return out;
}

// Viridis control points.
std::string colormap(double t) {
  static const double stops[][3] = {{68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
  t = std::clamp(std::isfinite(t) ? t : 0.0, 0.0, 1.0) * 4.0;
  const int i = std::min(3, static_cast<int>(t));
  const double f = t - i;
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(stops[i][0] + f * (stops[i + 1][0] - stops[i][0])),
                static_cast<int>(stops[i][1] + f * (stops[i + 1][1] - stops[i][1])),
                static_cast<int>(stops[i][2] + f * (stops[i + 1][2] - stops[i][2])));
  return buf;
}

}  // namespace

std::string render_line_chart(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                              const std::vector<Series>& series) {
  if (series.empty()) throw ValidationError("plot: no series");
  double xlo = INFINITY, xhi = -INFINITY, ylo = INFINITY, yhi = -INFINITY;
  for (const auto& s : series) {
    if (s.x.empty() || s.x.size() != s.y.size()) throw ValidationError("plot: empty or mismatched series");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) throw ValidationError("plot: non-finite data");
      xlo = std::min(xlo, s.x[i]);
      xhi = std::max(xhi, s.x[i]);
      ylo = std::min(ylo, s.y[i]);
      yhi = std::max(yhi, s.y[i]);
    }
  }
  const Range xr = padded(xlo, xhi), yr = padded(ylo, yhi);
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto X = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto Y = [&](double y) { return kTop + (yr.hi - y) / (yr.hi - yr.lo) * ph; };

  std::string out = header(title);
  append(out, "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" stroke=\"black\"/>\n", kLeft,
         kTop, pw, ph);
  for (double t : ticks(xr)) {
    append(out, "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#ddd\"/>\n", X(t), kTop, X(t), kTop + ph);
    append(out,
           "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">%g</text>\n",
           X(t), kTop + ph + 16, t);
  }
  for (double t : ticks(yr)) {
    append(out, "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#ddd\"/>\n", kLeft, Y(t), kLeft + pw, Y(t));
    append(out,
           "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">%g</text>\n",
           kLeft - 6, Y(t) + 4, t);
  }
  append(out, "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">",
         kLeft + pw / 2, kHeight - 16);
  out += escape(xlabel) + "</text>\n";
  append(out,
         "<text x=\"18\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" "
         "transform=\"rotate(-90 18 %.1f)\">",
         kTop + ph / 2, kTop + ph / 2);
  out += escape(ylabel) + "</text>\n";
  for (const auto& s : series) {
    append(out, "<polyline fill=\"none\" stroke=\"%s\" stroke-width=\"1.2\" points=\"", escape(s.color).c_str());
    for (std::size_t i = 0; i < s.x.size(); ++i) append(out, "%s%.2f,%.2f", i ? " " : "", X(s.x[i]), Y(s.y[i]));
    out += "\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

std::string render_field(const std::string& title, const VtkField& field, const std::vector<double>& values) {
  if (field.points.empty() || field.cells.empty()) throw ValidationError("plot: empty field");
  if (values.size() != field.points.size()) throw ValidationError("plot: value count does not match points");
  double xlo = INFINITY, xhi = -INFINITY, ylo = INFINITY, yhi = -INFINITY;
  for (const Vec2& p : field.points) {
    xlo = std::min(xlo, p.x);
    xhi = std::max(xhi, p.x);
    ylo = std::min(ylo, p.y);
    yhi = std::max(yhi, p.y);
  }
  // Colour by log10(1 + v / median).
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const double median = std::max(sorted[sorted.size() / 2], 1e-300);
  const double vmax = std::log10(1.0 + sorted.back() / median);
  const double pw = kWidth - 2 * kRight - 60, ph = kHeight - kTop - 20;
  const double scale = std::min(pw / std::max(xhi - xlo, 1e-12), ph / std::max(yhi - ylo, 1e-12));
  auto X = [&](double x) { return kRight + (x - xlo) * scale; };
  auto Y = [&](double y) { return kTop + (yhi - y) * scale; };

  std::string out = header(title);
  for (const auto& t : field.cells) {
    const double v = (values[t[0]] + values[t[1]] + values[t[2]]) / 3.0;
    const std::string c = colormap(vmax > 0 ? std::log10(1.0 + v / median) / vmax : 0.0);
    append(out, "<polygon points=\"%.2f,%.2f %.2f,%.2f %.2f,%.2f\" fill=\"%s\" stroke=\"%s\" stroke-width=\"0.3\"/>\n",
           X(field.points[t[0]].x), Y(field.points[t[0]].y), X(field.points[t[1]].x), Y(field.points[t[1]].y),
           X(field.points[t[2]].x), Y(field.points[t[2]].y), c.c_str(), c.c_str());
  }
  const double bx = kWidth - 50;
  for (int i = 0; i < 50; ++i)
    append(out, "<rect x=\"%.1f\" y=\"%.1f\" width=\"16\" height=\"%.2f\" fill=\"%s\"/>\n", bx,
           kTop + (49 - i) * ph / 50, ph / 50 + 0.5, colormap(i / 49.0).c_str());
  append(out, "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"10\">%.3g</text>\n", bx - 4, kTop - 4,
         sorted.back());
  append(out, "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"10\">%.3g</text>\n", bx - 4,
         kTop + ph + 12, sorted.front());
  out += "</svg>\n";
  return out;
}

std::vector<fs::path> emit_plots(const fs::path& run_dir) {
  const auto trace = parse_numeric_csv(read_text_file(run_dir / "trace.csv"), 2);
  const auto traj = parse_numeric_csv(read_text_file(run_dir / "trajectory.csv"), 4);
  if (trace.empty()) throw ValidationError("plot: empty boundary trace");
  if (traj.empty()) throw ValidationError("plot: empty trajectory");

  Series speed;
  for (const auto& r : trace) {
    speed.x.push_back(r[0]);
    speed.y.push_back(std::abs(r[1]));
  }
  std::map<int, Series> by_step;
  for (const auto& r : traj) {
    Series& s = by_step[static_cast<int>(r[0])];
    s.x.push_back(r[2]);
    s.y.push_back(r[3]);
  }
  std::vector<Series> profiles;
  const std::size_t n = by_step.size();
  std::size_t k = 0;
  for (auto& [step, s] : by_step) {
    s.color = colormap(n > 1 ? 0.9 * static_cast<double>(k++) / static_cast<double>(n - 1) : 0.0);
    profiles.push_back(std::move(s));
  }
  const VtkField field = parse_flow_vtk(read_text_file(run_dir / "flow.vtk"));

  std::vector<std::pair<fs::path, std::string>> rendered;
  rendered.emplace_back(run_dir / kBoundarySpeedPlot,
                        render_line_chart("Boundary speed", "arclength", "|w| tangential", {speed}));
  rendered.emplace_back(run_dir / kProfilesPlot,
                        render_line_chart("Membrane Ezrin per snapshot (dark: early, light: late)", "arclength", "u",
                                          profiles));
  rendered.emplace_back(run_dir / kFieldPlot, render_field("Flow speed |w|", field, field.speed));
  std::vector<fs::path> out;
  for (const auto& [path, text] : rendered) {
    write_text_file(path, text);
    out.push_back(path);
  }
  return out;
}

}  // namespace blebsim
