#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "blebsim/config.hpp"
#include "blebsim/error.hpp"
#include "blebsim/harness.hpp"
#include "blebsim/output.hpp"
#include "blebsim/plots.hpp"
#include "test_util.hpp"

using namespace blebsim;
namespace fs = std::filesystem;

namespace {

RunConfig small_config(const fs::path& out) {
  RunConfig c = default_config();
  c.domain.target_h = 0.1;
  c.time.num_steps = 100;
  c.time.snapshot_stride = 20;
  c.output_dir = out;
  return c;
}

// Minimal well-formedness check: one root element, balanced tags.
bool balanced_xml(const std::string& s) {
  std::vector<std::string> stack;
  int roots = 0;
  std::size_t i = 0;
  while ((i = s.find('<', i)) != std::string::npos) {
    const std::size_t j = s.find('>', i);
    if (j == std::string::npos) return false;
    const std::string tag = s.substr(i + 1, j - i - 1);
    i = j + 1;
    if (tag.empty()) return false;
    if (tag[0] == '?' || tag[0] == '!') continue;
    if (tag[0] == '/') {
      const std::string name = tag.substr(1);
      if (stack.empty() || stack.back() != name) return false;
      stack.pop_back();
      continue;
    }
    if (stack.empty()) ++roots;
    if (tag.back() == '/') continue;
    stack.push_back(tag.substr(0, tag.find_first_of(" \t\n")));
  }
  return stack.empty() && roots == 1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("default configuration carries the reference parameters") {
  const RunConfig c = default_config();
  CHECK(c.kinetics.C1 == 50.0);
  CHECK(c.kinetics.C2 == 0.1);
  CHECK(c.kinetics.C3 == 5.0);
  CHECK(c.time.epsilon == 0.002);
  CHECK(c.time.final_time == 1.0);
  CHECK(c.time.num_steps == 1000);
  CHECK(c.domain.semi_major == 1.2);
  CHECK(c.domain.semi_minor == 0.8);
  CHECK(c.domain.nucleus_center == Vec2{0.2, 0.0});
  CHECK(c.domain.nucleus_radius == 0.4);
  REQUIRE(c.force.terms.size() == 1u);
  CHECK(c.force.terms[0].magnitude == 20.0);
  CHECK(c.force.terms[0].direction == Vec2{1.0, 0.0});
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("run configuration JSON") {
  RunConfig c = default_config();
  c.kinetics.C3 = 7.5;
  c.time.seed = 123456789012345ULL;
  c.force.terms.push_back(PointForce{{-0.5, 0.1}, {0.0, 1.0}, 3.0, 0.1});
  const RunConfig r = run_config_from_json(to_json(c));
  CHECK(to_json(r) == to_json(c));
  CHECK(r.time.seed == 123456789012345ULL);
  CHECK(r.force.terms.size() == 2u);
  CHECK(run_config_from_json("{\"kinetics\": {\"C1\": 20}}").kinetics.C1 == 20.0);
  CHECK_THROWS_AS(run_config_from_json("{\"kinetic\": {}}"), ConfigError);
  CHECK_THROWS_AS(run_config_from_json("{\"kinetics\": {\"C4\": 1}}"), ConfigError);
  CHECK_THROWS_AS(run_config_from_json("{\"kinetics\": {\"C1\": \"x\"}}"), ConfigError);
  CHECK_THROWS_AS(run_config_from_json("{\"kinetics\": {\"C1\": -1}}"), ConfigError);
  CHECK_THROWS_AS(run_config_from_json("{\"time\": {\"num_steps\": 2.5}}"), ConfigError);
  CHECK_THROWS_AS(run_config_from_json("{"), ConfigError);
  CHECK_THROWS_AS(load_run_config(scratch_dir("json") / "absent.json"), ConfigError);

  const fs::path p = scratch_dir("json") / "run.json";
  write_text_file(p, to_json(c));
  CHECK(to_json(load_run_config(p)) == to_json(c));
}

TEST_CASE("experiment presets") {
  const RunConfig base = default_config();
  CHECK(experiment_ids().size() == 8u);
  CHECK(experiment_config("1a").kinetics.C3 == 25.0);
  CHECK(experiment_config("1b").kinetics.C3 == doctest::Approx(0.5));
  CHECK(experiment_config("2a").force.terms[0].magnitude == 100.0);
  CHECK(experiment_config("2b").force.terms[0].magnitude == doctest::Approx(2.0));

  const RunConfig a = experiment_config("3a");
  CHECK(a.domain.semi_major == doctest::Approx(9.0 / 5.0));
  CHECK(a.domain.semi_minor == doctest::Approx(5.0 / 18.0));
  CHECK(a.reference_area == doctest::Approx(kPi * 0.96));
  CHECK_FALSE(area_warning(a).empty());

  CHECK(experiment_config("3b").domain.nucleus_center == Vec2{0.2, 0.25});
  CHECK(area_warning(experiment_config("3b")).empty());

  const RunConfig c = experiment_config("3c");
  CHECK(c.domain.semi_major == doctest::Approx(9.0 / 5.0));
  CHECK(c.domain.semi_major * c.domain.semi_minor == doctest::Approx(0.96).epsilon(1e-14));
  CHECK(area_warning(c).empty());

  const RunConfig four = experiment_config("4");
  REQUIRE(four.force.terms.size() == 2u);
  CHECK(four.force.terms[1].center == -base.force.terms[0].center);
  CHECK(four.force.terms[1].direction == -base.force.terms[0].direction);
  CHECK(four.force.terms[1].magnitude == base.force.terms[0].magnitude);
  CHECK(four.label == "exp4");

  CHECK_THROWS_AS(experiment_config("5"), ConfigError);
  for (const auto& id : experiment_ids()) CHECK_NOTHROW(experiment_config(id).validate());
}

TEST_CASE("dotted parameter paths") {
  RunConfig c = default_config();
  set_parameter(c, "kinetics.C3", 12.0);
  CHECK(c.kinetics.C3 == 12.0);
  CHECK(get_parameter(c, "kinetics.C3") == 12.0);
  set_parameter(c, "time.num_steps", 50);
  CHECK(c.time.num_steps == 50);
  c.force.terms.push_back(PointForce{{-0.8, 0.0}, {-1.0, 0.0}, 4.0, 0.15});
  set_parameter(c, "forces.magnitude", 9.0);
  CHECK(c.force.terms[0].magnitude == 9.0);
  CHECK(c.force.terms[1].magnitude == 9.0);
  set_parameter(c, "forces.1.magnitude", 2.0);
  CHECK(c.force.terms[0].magnitude == 9.0);
  CHECK(c.force.terms[1].magnitude == 2.0);
  set_parameter(c, "domain.nucleus_center.1", 0.1);
  CHECK(c.domain.nucleus_center.y == 0.1);

  CHECK_THROWS_AS(set_parameter(c, "kinetics.C9", 1.0), ConfigError);
  CHECK_THROWS_AS(set_parameter(c, "forces.7.magnitude", 1.0), ConfigError);
  CHECK_THROWS_AS(set_parameter(c, "label", 1.0), ConfigError);
  CHECK_THROWS_AS(set_parameter(c, "kinetics.C1", -1.0), ConfigError);
  CHECK_THROWS_AS(set_parameter(c, "time.num_steps", 2.5), ConfigError);
  CHECK_THROWS_AS(get_parameter(c, "nope"), ConfigError);
  CHECK(c.kinetics.C1 == 50.0);  // failed sets leave the config untouched
}

TEST_CASE("stability guard step count") {
  TimeSteppingConfig t;
  KineticsParams k;
  CHECK(stable_step_count(t, k, 30.0) == 1000);  // dt k = 1.5
  CHECK(stable_step_count(t, k, 149.0) == static_cast<int>(std::ceil(50.0 * 149.0 + 0.1)));
  CHECK(stable_step_count(t, k, 0.0) == 1000);
  t.final_time = 1e9;
  CHECK_THROWS_AS(stable_step_count(t, k, 149.0), ConfigError);
}

TEST_CASE("text output helpers") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  const fs::path dir = scratch_dir("io");
  write_text_file(dir / "a.txt", "abc");
  CHECK(read_text_file(dir / "a.txt") == "abc");
  CHECK(sha256_file(dir / "a.txt") == sha256_hex("abc"));
  int entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++entries;
  CHECK(entries == 1);  // no temporary left behind
  write_text_file(dir / "nested" / "b.txt", "x");
  CHECK(read_text_file(dir / "nested" / "b.txt") == "x");
  CHECK_THROWS_AS(write_text_file(dir / "a.txt" / "c.txt", "x"), IoError);
  CHECK_THROWS_AS(read_text_file(dir / "nothing.txt"), IoError);
  CHECK_THROWS_AS(sha256_file(dir / "nothing.txt"), IoError);
}

TEST_CASE("a recorded run persists every artefact with valid checksums") {
  const fs::path dir = scratch_dir("run");
  const RunManifest m = run_experiment(small_config(dir));
  CHECK(m.success);
  CHECK(m.failure_stage.empty());
  std::set<std::string> names;
  for (const auto& f : m.files) names.insert(f.name);
  for (const char* f : {"config.json", "mesh.txt", "flow.vtk", "trace.csv", "trajectory.csv", "diagnostics.csv",
                        kBoundarySpeedPlot, kProfilesPlot, kFieldPlot})
    CHECK(names.count(f) == 1);
  CHECK(fs::exists(dir / kManifestFile));
  std::string problem;
  CHECK(verify_manifest(dir, &problem));

  const RunManifest back = manifest_from_json(read_text_file(dir / kManifestFile));
  CHECK(back.seed == 42u);
  CHECK(back.version == version_string());
  CHECK(back.files.size() == m.files.size());
  CHECK(back.metrics.polarization.back_mean == m.metrics.polarization.back_mean);
  CHECK(to_json(run_config_from_json(back.config_json)) == to_json(small_config(dir)));

  for (const char* svg : {kBoundarySpeedPlot, kProfilesPlot, kFieldPlot}) CHECK(balanced_xml(slurp(dir / svg)));

  // Loading the stored mesh gives the same connectivity.
  const Mesh2D mesh = load_mesh(dir / "mesh.txt");
  CHECK(mesh.num_vertices() == m.metrics.mesh_vertices);

  std::ofstream(dir / "trace.csv", std::ios::app) << "0,0\n";
  CHECK_FALSE(verify_manifest(dir, &problem));
  CHECK(problem.find("trace.csv") != std::string::npos);
  fs::remove(dir / "diagnostics.csv");
  CHECK_FALSE(verify_manifest(dir));
  CHECK_FALSE(verify_manifest(dir / "nowhere"));
}

TEST_CASE("identical config and seed reproduce every CSV bitwise") {
  const fs::path a = scratch_dir("det_a"), b = scratch_dir("det_b");
  run_experiment(small_config(a));
  run_experiment(small_config(b));
  for (const char* f : {"trajectory.csv", "diagnostics.csv", "trace.csv", "mesh.txt"})
    CHECK(slurp(a / f) == slurp(b / f));
  RunConfig other = small_config(scratch_dir("det_c"));
  other.time.seed = 7;
  run_experiment(other);
  CHECK(slurp(a / "trajectory.csv") != slurp(other.output_dir / "trajectory.csv"));
}

TEST_CASE("failures are recorded with their stage") {
  const fs::path dir = scratch_dir("fail");
  RunConfig c = small_config(dir);
  c.force.terms[0].center = {1.1, 0.0};  // support leaves the cell
  const RunManifest m = run_experiment_recorded(c);
  CHECK_FALSE(m.success);
  CHECK(m.failure_stage == "flow");
  CHECK_FALSE(m.error.empty());
  const RunManifest back = manifest_from_json(read_text_file(dir / kManifestFile));
  CHECK_FALSE(back.success);
  CHECK(back.failure_stage == "flow");
  CHECK(verify_manifest(dir));
  CHECK_THROWS_AS(run_experiment(c), ConfigError);

  const fs::path file = scratch_dir("fail_file") / "occupied";
  write_text_file(file, "x");
  RunConfig blocked = small_config(file);
  const RunManifest bm = run_experiment_recorded(blocked);
  CHECK_FALSE(bm.success);
  CHECK(bm.failure_stage == "config");
}

TEST_CASE("plots") {
  const std::string flat = render_line_chart("t", "x", "y", {Series{{0.0, 1.0, 2.0}, {0.5, 0.5, 0.5}}});
  CHECK(balanced_xml(flat));
  const std::size_t p = flat.find("points=\"");
  REQUIRE(p != std::string::npos);
  std::istringstream pts(flat.substr(p + 8, flat.find('"', p + 8) - p - 8));
  std::set<std::string> ys;
  for (std::string xy; pts >> xy;) ys.insert(xy.substr(xy.find(',') + 1));
  CHECK(ys.size() == 1u);

  CHECK_THROWS_AS(render_line_chart("t", "x", "y", {}), ValidationError);
  CHECK_THROWS_AS(render_line_chart("t", "x", "y", {Series{{0.0, 1.0}, {1.0}}}), ValidationError);
  CHECK_THROWS_AS(render_line_chart("t", "x", "y", {Series{{0.0}, {NAN}}}), ValidationError);
  CHECK(render_line_chart("a < b & c", "x", "y", {Series{{0.0}, {1.0}}}).find("a &lt; b &amp; c") !=
        std::string::npos);

  const fs::path dir = scratch_dir("plots_empty");
  run_experiment(small_config(dir));
  write_text_file(dir / "trajectory.csv", "step,time,arclength,u\n");
  CHECK_THROWS_AS(emit_plots(dir), ValidationError);
  CHECK_THROWS_AS(emit_plots(scratch_dir("plots_none")), IoError);
}

TEST_CASE("sweeps") {
  const fs::path dir = scratch_dir("sweep");
  RunConfig base = default_config();
  base.output_dir = dir;
  CHECK(run_sweep(base, "kinetics.C3", {}, 2).empty());
  CHECK_THROWS_AS(run_sweep(base, "kinetics.nothing", {1.0}, 2), ConfigError);
  CHECK_THROWS_AS(run_sweep(base, "kinetics.C3", {1.0}, 0), ConfigError);

  const auto runs = run_sweep(base, "kinetics.C3", {0.5, 5.0, 25.0}, 2);
  REQUIRE(runs.size() == 3u);
  std::set<std::uint64_t> seeds;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    CHECK(runs[i].success);
    CHECK(runs[i].seed == derive_seed(base.time.seed, i));
    seeds.insert(runs[i].seed);
    CHECK(verify_manifest(runs[i].directory));
  }
  CHECK(seeds.size() == 3u);
  CHECK(runs[0].metrics.mean_u < runs[1].metrics.mean_u);
  CHECK(runs[1].metrics.mean_u < runs[2].metrics.mean_u);
  const auto rows = read_text_file(dir / "sweep_summary.csv");
  CHECK(rows.rfind("index,value,seed,success,mean_u,", 0) == 0);
  CHECK(std::count(rows.begin(), rows.end(), '\n') == 4);

  // Values the config rejects fail before any run starts; run failures are
  // reported in their manifests.
  CHECK_THROWS_AS(run_sweep(base, "forces.magnitude", {20.0, -1.0}, 1), ConfigError);
  const auto mixed = run_sweep(base, "forces.0.center.0", {0.8, 1.1}, 1);
  REQUIRE(mixed.size() == 2u);
  CHECK(mixed[0].success);
  CHECK_FALSE(mixed[1].success);
}
