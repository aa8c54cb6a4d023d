// Command-line front end. Talks to the simulator only through blebsim.h.
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "blebsim/blebsim.h"

namespace {

struct Globals {
  std::string config_path;
  std::string out_dir;
  uint64_t seed = 0;
  bool seed_set = false;
  int steps = 0;
  bool quiet = false;
};

int exit_code(blebsim_status s) {
  switch (s) {
    case BLEBSIM_OK: return 0;
    case BLEBSIM_ERR_CONFIG:
    case BLEBSIM_ERR_INVALID_ARGUMENT:
    case BLEBSIM_ERR_PARSE:
    case BLEBSIM_ERR_IO: return 1;
    default: return 2;
  }
}

int report(blebsim_status s) {
  if (s != BLEBSIM_OK) std::fprintf(stderr, "blebsim: %s: %s\n", blebsim_status_name(s), blebsim_last_error());
  return exit_code(s);
}

void print_log(const char* line, void*) { std::fprintf(stderr, "%s\n", line); }

// Owns a config handle built from the global flags.
class Config {
 public:
  ~Config() { blebsim_config_free(handle_); }

  blebsim_status load(const Globals& g, const std::string& default_out) {
    blebsim_status s = g.config_path.empty() ? blebsim_config_default(&handle_)
                                             : blebsim_config_load(g.config_path.c_str(), &handle_);
    if (s != BLEBSIM_OK) return s;
    if (g.seed_set && (s = blebsim_config_set_seed(handle_, g.seed)) != BLEBSIM_OK) return s;
    if (g.steps > 0 && (s = blebsim_config_set_steps(handle_, g.steps)) != BLEBSIM_OK) return s;
    if (!g.out_dir.empty()) {
      s = blebsim_config_set_output_dir(handle_, g.out_dir.c_str());
    } else if (!default_out.empty()) {
      s = blebsim_config_set_output_dir(handle_, default_out.c_str());
    }
    if (s != BLEBSIM_OK) return s;
    if (!g.quiet) s = blebsim_config_set_logger(handle_, print_log, nullptr);
    return s;
  }
  blebsim_config* get() const { return handle_; }

 private:
  blebsim_config* handle_ = nullptr;
};

std::string take(char* s) {
  std::string out = s ? s : "";
  blebsim_string_free(s);
  return out;
}

std::string out_or(const Globals& g, const char* fallback) { return g.out_dir.empty() ? fallback : g.out_dir; }

void print_metrics(const blebsim_metrics& m) {
  std::printf("front mean u        %.6g\n", m.front_mean);
  std::printf("back mean u         %.6g\n", m.back_mean);
  std::printf("mean membrane u     %.6g\n", m.mean_u);
  std::printf("depleted fraction   %.6g\n", m.depleted_fraction);
  std::printf("interfaces          %d (mean width %.4g)\n", m.interface_count, m.interface_width);
  std::printf("u range, all steps  [%.6g, %.6g]\n", m.min_u_all, m.max_u_all);
  std::printf("max boundary speed  %.6g\n", m.max_boundary_speed);
  if (m.steady_state)
    std::printf("steady state        reached at t = %.4g\n", m.steady_time);
  else
    std::printf("steady state        not reached\n");
}

int run_and_report(blebsim_config* cfg) {
  blebsim_run* run = nullptr;
  const blebsim_status s = blebsim_run_simulation(cfg, &run);
  if (run) {
    const std::string dir = take([&] {
      char* d = nullptr;
      blebsim_run_directory(run, &d);
      return d;
    }());
    if (s == BLEBSIM_OK) {
      blebsim_metrics m;
      blebsim_run_metrics(run, &m);
      print_metrics(m);
    }
    std::printf("run directory       %s\n", dir.c_str());
    blebsim_run_free(run);
  }
  return report(s);
}

std::vector<double> parse_values(const std::string& list) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < list.size()) {
    std::size_t comma = list.find(',', pos);
    if (comma == std::string::npos) comma = list.size();
    const std::string cell = list.substr(pos, comma - pos);
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (cell.empty() || *end != '\0') throw CLI::ValidationError("--values", "bad number '" + cell + "'");
    out.push_back(v);
    pos = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bulk-surface simulator of flow-driven Ezrin polarization"};
  app.set_version_flag("--version", std::string(blebsim_version()));
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "random seed for the initial condition")->each([&](const std::string&) {
    g.seed_set = true;
  });
  app.add_option("--out", g.out_dir, "output directory");
  app.add_option("--steps", g.steps, "number of time steps M")->check(CLI::PositiveNumber);
  app.add_flag("--quiet", g.quiet, "suppress progress output");

  int code = 0;

  auto* mesh = app.add_subcommand("mesh", "generate the cell mesh");
  mesh->callback([&] {
    Config c;
    blebsim_status s = c.load(g, "");
    if (s != BLEBSIM_OK) return void(code = report(s));
    const std::string path = out_or(g, "out") + "/mesh.txt";
    blebsim_mesh_info info{};
    s = blebsim_generate_mesh(c.get(), path.c_str(), &info);
    if (s == BLEBSIM_OK)
      std::printf("%d vertices, %d triangles, %d surface dofs, area %.6f, min angle %.2f deg, max edge %.4f\n%s\n",
                  info.vertices, info.triangles, info.surface_dofs, info.area, info.min_angle_deg, info.max_edge,
                  path.c_str());
    code = report(s);
  });

  auto* flow = app.add_subcommand("flow", "solve the Darcy flow and write flow.vtk and trace.csv");
  flow->callback([&] {
    Config c;
    blebsim_status s = c.load(g, "");
    if (s != BLEBSIM_OK) return void(code = report(s));
    const std::string dir = out_or(g, "out");
    blebsim_flow_info info{};
    s = blebsim_solve_flow(c.get(), dir.c_str(), &info);
    if (s == BLEBSIM_OK)
      std::printf("max boundary speed %.6g, mean speed %.6g, pressure residual %.2e (%d iterations), "
                  "flux divergence %.2e\n",
                  info.max_boundary_speed, info.mean_speed, info.pressure_residual, info.pressure_iterations,
                  info.flux_divergence_residual);
    code = report(s);
  });

  auto* simulate = app.add_subcommand("simulate", "run the coupled simulation");
  simulate->callback([&] {
    Config c;
    const blebsim_status s = c.load(g, "");
    code = s != BLEBSIM_OK ? report(s) : run_and_report(c.get());
  });

  std::string exp_id;
  auto* experiment = app.add_subcommand("experiment", "run a preset experiment (1a 1b 2a 2b 3a 3b 3c 4)");
  experiment->add_option("id", exp_id, "experiment id")->required();
  experiment->callback([&] {
    Config c;
    blebsim_status s = c.load(g, "out/exp" + exp_id);
    if (s == BLEBSIM_OK) s = blebsim_config_apply_experiment(c.get(), exp_id.c_str());
    code = s != BLEBSIM_OK ? report(s) : run_and_report(c.get());
  });

  std::string sweep_param, sweep_values;
  int jobs = 1;
  auto* sweep = app.add_subcommand("sweep", "one run per parameter value");
  sweep->add_option("--param", sweep_param, "dotted parameter path, e.g. kinetics.C3")->required();
  sweep->add_option("--values", sweep_values, "comma-separated values")->required();
  sweep->add_option("--jobs", jobs, "concurrent runs")->check(CLI::PositiveNumber);
  sweep->callback([&] {
    Config c;
    blebsim_status s = c.load(g, "out/sweep");
    if (s != BLEBSIM_OK) return void(code = report(s));
    const std::vector<double> values = parse_values(sweep_values);
    char* summary = nullptr;
    int failed = 0;
    s = blebsim_run_sweep(c.get(), sweep_param.c_str(), values.data(), values.size(), jobs, &summary, &failed);
    const std::string path = take(summary);
    if (s == BLEBSIM_OK) {
      std::printf("%zu runs, %d failed\n", values.size(), failed);
      if (!path.empty()) std::printf("summary %s\n", path.c_str());
      if (failed > 0) s = BLEBSIM_ERR_SOLVER;
    }
    code = s == BLEBSIM_ERR_SOLVER && failed > 0 ? 2 : report(s);
  });

  std::string params_path;
  bool json_only = false;
  auto* nondim = app.add_subcommand("nondim", "dimensionless groups of a physical parameter set");
  nondim->add_option("params", params_path, "JSON physical parameters (defaults to the reference set)")
      ->check(CLI::ExistingFile);
  nondim->add_flag("--json", json_only, "print only the JSON report");
  nondim->callback([&] {
    std::string text;
    if (!params_path.empty()) {
      FILE* f = std::fopen(params_path.c_str(), "rb");
      if (!f) return void(code = 1);
      char buf[4096];
      for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, f)) > 0;) text.append(buf, n);
      std::fclose(f);
    }
    char* report_text = nullptr;
    char* report_json = nullptr;
    const blebsim_status s = blebsim_nondim(params_path.empty() ? nullptr : text.c_str(), &report_text, &report_json);
    const std::string t = take(report_text), j = take(report_json);
    if (s == BLEBSIM_OK) {
      if (!json_only) std::printf("%s\n", t.c_str());
      std::printf("%s\n", j.c_str());
    }
    code = report(s);
  });

  int samples = 1000;
  auto* oracle = app.add_subcommand("oracle-check", "finite-difference checks of the analytic oracles");
  oracle->add_option("--samples", samples, "random sample points per check")->check(CLI::PositiveNumber);
  oracle->callback([&] {
    char* text = nullptr;
    int passed = 0;
    const blebsim_status s = blebsim_oracle_check(g.seed_set ? g.seed : 7, samples, &text, &passed);
    std::printf("%s", take(text).c_str());
    code = s != BLEBSIM_OK ? report(s) : (passed ? 0 : 2);
  });

  std::string plot_dir;
  auto* plot = app.add_subcommand("plot", "render SVG plots of a finished run");
  plot->add_option("run_dir", plot_dir, "run directory")->required()->check(CLI::ExistingDirectory);
  plot->callback([&] {
    char* listing = nullptr;
    const blebsim_status s = blebsim_emit_plots(plot_dir.c_str(), &listing);
    std::printf("%s", take(listing).c_str());
    code = report(s);
  });

  double w = 0.0;
  auto* phases = app.add_subcommand("phases", "steady states of the reaction law at speed w");
  phases->add_option("--w", w, "tangential flow speed")->required();
  phases->callback([&] {
    Config c;
    blebsim_status s = c.load(g, "");
    char* out = nullptr;
    if (s == BLEBSIM_OK) s = blebsim_phase_report(c.get(), w, &out);
    const std::string text = take(out);
    if (s == BLEBSIM_OK) std::printf("%s\n", text.c_str());
    code = report(s);
  });

  double w_min = 0.0, w_max = 0.2;
  int w_points = 41;
  auto* bif = app.add_subcommand("bifurcation", "steady states against flow speed as CSV");
  bif->add_option("--w-min", w_min, "smallest speed")->check(CLI::NonNegativeNumber);
  bif->add_option("--w-max", w_max, "largest speed")->check(CLI::PositiveNumber);
  bif->add_option("--points", w_points, "number of speeds")->check(CLI::Range(2, 1000000));
  bif->callback([&] {
    Config c;
    blebsim_status s = c.load(g, "");
    char* out = nullptr;
    if (s == BLEBSIM_OK) s = blebsim_bifurcation_csv(c.get(), w_min, w_max, w_points, &out);
    const std::string text = take(out);
    if (s == BLEBSIM_OK) std::printf("%s", text.c_str());
    code = report(s);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  return code;
}
