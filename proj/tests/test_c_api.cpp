#include <doctest.h>

#include <blebsim/blebsim.h>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "test_util.hpp"

namespace {

// Takes ownership of a library string.
std::string take(char* s) {
  std::string out = s ? s : "";
  blebsim_string_free(s);
  return out;
}

struct Config {
  blebsim_config* p = nullptr;
  Config() { REQUIRE(blebsim_config_default(&p) == BLEBSIM_OK); }
  ~Config() { blebsim_config_free(p); }
};

void make_small(blebsim_config* c, const std::string& dir) {
  REQUIRE(blebsim_config_set(c, "domain.target_h", 0.1) == BLEBSIM_OK);
  REQUIRE(blebsim_config_set_steps(c, 100) == BLEBSIM_OK);
  REQUIRE(blebsim_config_set_output_dir(c, dir.c_str()) == BLEBSIM_OK);
}

}  // namespace

TEST_CASE("status names and error messages") {
  CHECK(std::string(blebsim_status_name(BLEBSIM_OK)) == "ok");
  CHECK(std::string(blebsim_status_name(BLEBSIM_ERR_CONFIG)).size() > 0);
  CHECK(std::string(blebsim_status_name(static_cast<blebsim_status>(99))).size() > 0);
  CHECK(std::string(blebsim_version()).find('.') != std::string::npos);
  CHECK(blebsim_last_error() != nullptr);

  blebsim_config* c = nullptr;
  CHECK(blebsim_config_from_json("{\"kinetics\": {\"C9\": 1}}", &c) == BLEBSIM_ERR_CONFIG);
  CHECK(c == nullptr);
  CHECK(std::string(blebsim_last_error()).find("C9") != std::string::npos);
  CHECK(blebsim_config_from_json("{", &c) == BLEBSIM_ERR_CONFIG);
  CHECK(blebsim_config_load("/nonexistent/blebsim.json", &c) == BLEBSIM_ERR_CONFIG);
  blebsim_string_free(nullptr);
  blebsim_config_free(nullptr);
  blebsim_run_free(nullptr);
}

TEST_CASE("NULL arguments are rejected") {
  Config c;
  double v = 0.0;
  char* s = nullptr;
  CHECK(blebsim_config_default(nullptr) == BLEBSIM_ERR_INVALID_ARGUMENT);
  CHECK(blebsim_config_from_json(nullptr, &c.p) == BLEBSIM_ERR_INVALID_ARGUMENT);
  CHECK(blebsim_config_set(nullptr, "kinetics.C3", 1.0) == BLEBSIM_ERR_INVALID_ARGUMENT);
  CHECK(blebsim_config_set(c.p, nullptr, 1.0) == BLEBSIM_ERR_INVALID_ARGUMENT);
  CHECK(blebsim_config_get(c.p, "kinetics.C3", nullptr) == BLEBSIM_ERR_INVALID_ARGUMENT);
  CHECK(blebsim_config_get(nullptr, "kinetics.C3", &v) == BLEBSIM_ERR_INVALID_ARGUMENT);
  CHECK(blebsim_config_to_json(c.p, nullptr) == BLEBSIM_ERR_INVALID_ARGUMENT);
  CHECK(blebsim_config_apply_experiment(c.p, nullptr) == BLEBSIM_ERR_INVALID_ARGUMENT);
  CHECK(blebsim_run_simulation(nullptr, nullptr) == BLEBSIM_ERR_INVALID_ARGUMENT);
  CHECK(blebsim_run_metrics(nullptr, nullptr) == BLEBSIM_ERR_INVALID_ARGUMENT);
  CHECK(blebsim_verify_manifest(nullptr) == BLEBSIM_ERR_INVALID_ARGUMENT);
  CHECK(blebsim_emit_plots(nullptr, &s) == BLEBSIM_ERR_INVALID_ARGUMENT);
  CHECK(blebsim_phase_report(c.p, 0.0, nullptr) == BLEBSIM_ERR_INVALID_ARGUMENT);
  CHECK(blebsim_run_succeeded(nullptr) == 0);
  CHECK(s == nullptr);
}

TEST_CASE("configuration through the C interface") {
  Config c;
  double v = 0.0;
  CHECK(blebsim_config_get(c.p, "kinetics.C3", &v) == BLEBSIM_OK);
  CHECK(v == 5.0);
  CHECK(blebsim_config_set(c.p, "kinetics.C3", 12.5) == BLEBSIM_OK);
  CHECK(blebsim_config_get(c.p, "kinetics.C3", &v) == BLEBSIM_OK);
  CHECK(v == 12.5);
  CHECK(blebsim_config_set(c.p, "kinetics.C1", -1.0) == BLEBSIM_ERR_CONFIG);
  CHECK(blebsim_config_get(c.p, "kinetics.C1", &v) == BLEBSIM_OK);
  CHECK(v == 50.0);
  CHECK(blebsim_config_set(c.p, "nope.nothing", 1.0) == BLEBSIM_ERR_CONFIG);
  CHECK(blebsim_config_set_steps(c.p, 0) == BLEBSIM_ERR_CONFIG);
  CHECK(blebsim_config_set_seed(c.p, 99) == BLEBSIM_OK);

  char* text = nullptr;
  REQUIRE(blebsim_config_to_json(c.p, &text) == BLEBSIM_OK);
  const std::string json = take(text);
  blebsim_config* d = nullptr;
  REQUIRE(blebsim_config_from_json(json.c_str(), &d) == BLEBSIM_OK);
  CHECK(blebsim_config_get(d, "kinetics.C3", &v) == BLEBSIM_OK);
  CHECK(v == 12.5);
  CHECK(blebsim_config_get(d, "time.seed", &v) == BLEBSIM_OK);
  CHECK(v == 99.0);
  blebsim_config_free(d);

  const auto dir = scratch_dir("capi_config");
  {
    std::ofstream(dir / "run.json") << json;
  }
  REQUIRE(blebsim_config_load((dir / "run.json").c_str(), &d) == BLEBSIM_OK);
  blebsim_config_free(d);

  Config e;
  CHECK(blebsim_config_apply_experiment(e.p, "2a") == BLEBSIM_OK);
  CHECK(blebsim_config_get(e.p, "forces.0.magnitude", &v) == BLEBSIM_OK);
  CHECK(v == 100.0);
  CHECK(blebsim_config_apply_experiment(e.p, "9z") == BLEBSIM_ERR_CONFIG);
  CHECK(blebsim_config_get(e.p, "forces.0.magnitude", &v) == BLEBSIM_OK);
  CHECK(v == 100.0);
}

TEST_CASE("analysis entry points") {
  char *text = nullptr, *json = nullptr;
  REQUIRE(blebsim_nondim(nullptr, &text, &json) == BLEBSIM_OK);
  CHECK(take(text).find("Re") != std::string::npos);
  CHECK(take(json).find("\"Pe\"") != std::string::npos);
  CHECK(blebsim_nondim("{\"L\": -1}", &text, &json) == BLEBSIM_ERR_CONFIG);

  int all = 0;
  REQUIRE(blebsim_oracle_check(3, 200, &text, &all) == BLEBSIM_OK);
  CHECK(all == 1);
  CHECK(take(text).find('\n') != std::string::npos);
  CHECK(blebsim_oracle_check(3, 0, &text, &all) != BLEBSIM_OK);
  CHECK(blebsim_oracle_check(1, 10, nullptr, nullptr) == BLEBSIM_OK);

  Config c;
  REQUIRE(blebsim_phase_report(c.p, 0.0, &text) == BLEBSIM_OK);
  const std::string phases = take(text);
  CHECK(phases.find("\"threshold\"") != std::string::npos);
  CHECK(phases.find("0.98") != std::string::npos);

  REQUIRE(blebsim_bifurcation_csv(c.p, 0.0, 0.2, 3, &text) == BLEBSIM_OK);
  std::istringstream rows(take(text));
  std::vector<std::string> lines;
  for (std::string l; std::getline(rows, l);) lines.push_back(l);
  REQUIRE(lines.size() == 4u);
  CHECK(lines[0] == "w,stable_roots,unstable_roots");
  CHECK(lines[1] == "0,0.98,0");
  CHECK(lines[3] == "0.2,0,");
  CHECK(blebsim_bifurcation_csv(c.p, 0.2, 0.1, 3, &text) == BLEBSIM_ERR_INVALID_ARGUMENT);
  CHECK(blebsim_bifurcation_csv(c.p, 0.0, 0.1, 1, &text) == BLEBSIM_ERR_INVALID_ARGUMENT);
}

TEST_CASE("mesh and flow") {
  Config c;
  const auto dir = scratch_dir("capi_flow");
  REQUIRE(blebsim_config_set(c.p, "domain.target_h", 0.1) == BLEBSIM_OK);
  blebsim_mesh_info mi{};
  REQUIRE(blebsim_generate_mesh(c.p, (dir / "mesh.txt").c_str(), &mi) == BLEBSIM_OK);
  CHECK(mi.vertices > 0);
  CHECK(mi.triangles > mi.vertices);
  CHECK(mi.area > 2.0);
  CHECK(mi.min_angle_deg > 20.0);
  CHECK(std::filesystem::exists(dir / "mesh.txt"));

  blebsim_flow_info fi{};
  REQUIRE(blebsim_solve_flow(c.p, dir.c_str(), &fi) == BLEBSIM_OK);
  CHECK(fi.max_boundary_speed > 0.0);
  CHECK(fi.flux_divergence_residual < 1e-8);
  CHECK(std::filesystem::exists(dir / "flow.vtk"));
  CHECK(std::filesystem::exists(dir / "trace.csv"));
}

TEST_CASE("runs, manifests and plots") {
  Config c;
  const auto dir = scratch_dir("capi_run");
  make_small(c.p, dir.string());
  std::vector<std::string> lines;
  REQUIRE(blebsim_config_set_logger(
              c.p, [](const char* line, void* user) { static_cast<std::vector<std::string>*>(user)->push_back(line); },
              &lines) == BLEBSIM_OK);

  blebsim_run* run = nullptr;
  REQUIRE(blebsim_run_simulation(c.p, &run) == BLEBSIM_OK);
  REQUIRE(run != nullptr);
  CHECK(blebsim_run_succeeded(run) == 1);
  CHECK_FALSE(lines.empty());
  blebsim_metrics m{};
  REQUIRE(blebsim_run_metrics(run, &m) == BLEBSIM_OK);
  CHECK(m.mean_u > 0.0);
  CHECK(m.back_mean >= m.front_mean);
  CHECK(m.max_boundary_speed > 0.0);
  char* text = nullptr;
  REQUIRE(blebsim_run_manifest_json(run, &text) == BLEBSIM_OK);
  CHECK(take(text).find("\"files\"") != std::string::npos);
  REQUIRE(blebsim_run_directory(run, &text) == BLEBSIM_OK);
  CHECK(std::filesystem::equivalent(take(text), dir));
  blebsim_run_free(run);

  CHECK(blebsim_verify_manifest(dir.c_str()) == BLEBSIM_OK);
  REQUIRE(blebsim_emit_plots(dir.c_str(), &text) == BLEBSIM_OK);
  const std::string listing = take(text);
  CHECK(listing.find("boundary_speed.svg") != std::string::npos);
  CHECK(listing.find("flow_speed.svg") != std::string::npos);
  CHECK(blebsim_verify_manifest(dir.c_str()) == BLEBSIM_OK);
  std::ofstream(dir / "trajectory.csv", std::ios::app) << "1\n";
  CHECK(blebsim_verify_manifest(dir.c_str()) == BLEBSIM_ERR_VALIDATION);
  CHECK(blebsim_emit_plots((dir / "missing").c_str(), &text) == BLEBSIM_ERR_IO);

  // A force outside the cell fails in the flow stage but still leaves a manifest.
  const auto bad = scratch_dir("capi_bad");
  make_small(c.p, bad.string());
  REQUIRE(blebsim_config_set(c.p, "forces.0.center.0", 1.1) == BLEBSIM_OK);
  run = nullptr;
  CHECK(blebsim_run_simulation(c.p, &run) == BLEBSIM_ERR_CONFIG);
  REQUIRE(run != nullptr);
  CHECK(blebsim_run_succeeded(run) == 0);
  REQUIRE(blebsim_run_manifest_json(run, &text) == BLEBSIM_OK);
  CHECK(take(text).find("\"flow\"") != std::string::npos);
  blebsim_run_free(run);
}

TEST_CASE("sweeps through the C interface") {
  Config c;
  const auto dir = scratch_dir("capi_sweep");
  make_small(c.p, dir.string());
  const double values[] = {1.0, 5.0};
  char* summary = nullptr;
  int failed = -1;
  REQUIRE(blebsim_run_sweep(c.p, "kinetics.C3", values, 2, 2, &summary, &failed) == BLEBSIM_OK);
  CHECK(failed == 0);
  const std::string path = take(summary);
  CHECK(std::filesystem::exists(path));
  CHECK(blebsim_verify_manifest((dir / "run_000").c_str()) == BLEBSIM_OK);
  CHECK(blebsim_verify_manifest((dir / "run_001").c_str()) == BLEBSIM_OK);
  CHECK(blebsim_run_sweep(c.p, "kinetics.C9", values, 2, 2, &summary, &failed) == BLEBSIM_ERR_CONFIG);
  CHECK(blebsim_run_sweep(c.p, "kinetics.C3", nullptr, 2, 2, &summary, &failed) == BLEBSIM_ERR_INVALID_ARGUMENT);
}
