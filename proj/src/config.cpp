#include "blebsim/config.hpp"

#include <cmath>

#include <json.hpp>

#include "blebsim/error.hpp"
#include "blebsim/output.hpp"

namespace blebsim {

namespace {

using nlohmann::json;

json vec_json(Vec2 v) { return json::array({v.x, v.y}); }

// Typed accessors over one JSON object; key sets are checked by check_keys.
class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j.is_object()) fail("expected an object");
  }

  void num(const char* key, double& out) {
    if (const json* v = take(key)) {
      if (!v->is_number()) fail(std::string(key) + " must be a number");
      out = v->get<double>();
    }
  }
  void integer(const char* key, int& out) {
    if (const json* v = take(key)) {
      if (!v->is_number_integer()) fail(std::string(key) + " must be an integer");
      out = v->get<int>();
    }
  }
  void u64(const char* key, std::uint64_t& out) {
    if (const json* v = take(key)) {
      if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<std::int64_t>() >= 0))
        fail(std::string(key) + " must be a non-negative integer");
      out = v->get<std::uint64_t>();
    }
  }
  void boolean(const char* key, bool& out) {
    if (const json* v = take(key)) {
      if (!v->is_boolean()) fail(std::string(key) + " must be a boolean");
      out = v->get<bool>();
    }
  }
  void str(const char* key, std::string& out) {
    if (const json* v = take(key)) {
      if (!v->is_string()) fail(std::string(key) + " must be a string");
      out = v->get<std::string>();
    }
  }
  void vec(const char* key, Vec2& out) {
    if (const json* v = take(key)) {
      if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number())
        fail(std::string(key) + " must be a [x, y] pair");
      out = {(*v)[0].get<double>(), (*v)[1].get<double>()};
    }
  }
  const json* take(const char* key) {
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ConfigError("config " + where_ + ": " + msg); }

  const json& j_;
  std::string where_;
};

json to_json_value(const RunConfig& c) {
  json forces = json::array();
  for (const auto& f : c.force.terms)
    forces.push_back({{"center", vec_json(f.center)},
                      {"direction", vec_json(f.direction)},
                      {"magnitude", f.magnitude},
                      {"kernel_radius", f.kernel_radius}});
  const auto& t = c.time;
  return {{"label", c.label},
          {"output_dir", c.output_dir.string()},
          {"domain",
           {{"semi_major", c.domain.semi_major},
            {"semi_minor", c.domain.semi_minor},
            {"nucleus_center", vec_json(c.domain.nucleus_center)},
            {"nucleus_radius", c.domain.nucleus_radius},
            {"target_h", c.domain.target_h},
            {"gamma_refine", c.domain.gamma_refine}}},
          {"forces", forces},
          {"kinetics",
           {{"C1", c.kinetics.C1},
            {"C2", c.kinetics.C2},
            {"C3", c.kinetics.C3},
            {"alpha", c.kinetics.alpha},
            {"zeta", c.kinetics.zeta}}},
          {"time",
           {{"final_time", t.final_time},
            {"num_steps", t.num_steps},
            {"epsilon", t.epsilon},
            {"snapshot_stride", t.snapshot_stride},
            {"seed", t.seed},
            {"reaction_enabled", t.reaction_enabled},
            {"steady_tol", t.steady_tol},
            {"steady_window", t.steady_window},
            {"solver",
             {{"tol", t.solver.tol},
              {"max_iter", t.solver.max_iter},
              {"direct_threshold", t.solver.direct_threshold}}}}},
          {"flow_tol", c.flow_tol},
          {"front_direction", vec_json(c.front_direction)},
          {"reference_area", c.reference_area},
          {"stability_guard", c.stability_guard}};
}

void check_keys(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  if (!j.is_object()) throw ConfigError("config " + where + ": expected an object");
  for (const auto& [k, v] : j.items()) {
    (void)v;
    bool ok = false;
    for (const char* key : keys) ok = ok || k == key;
    if (!ok) throw ConfigError("config " + where + ": unknown key '" + k + "'");
  }
}

RunConfig from_json_value(const json& j) {
  RunConfig c = default_config();
  check_keys(j, {"label", "output_dir", "domain", "forces", "kinetics", "time", "flow_tol", "front_direction",
                 "reference_area", "stability_guard"},
             "root");
  Reader root(j, "root");
  root.str("label", c.label);
  std::string out = c.output_dir.string();
  root.str("output_dir", out);
  c.output_dir = out;
  root.num("flow_tol", c.flow_tol);
  root.vec("front_direction", c.front_direction);
  root.num("reference_area", c.reference_area);
  root.boolean("stability_guard", c.stability_guard);

  if (const json* d = root.take("domain")) {
    check_keys(*d, {"semi_major", "semi_minor", "nucleus_center", "nucleus_radius", "target_h", "gamma_refine"},
               "domain");
    Reader r(*d, "domain");
    r.num("semi_major", c.domain.semi_major);
    r.num("semi_minor", c.domain.semi_minor);
    r.vec("nucleus_center", c.domain.nucleus_center);
    r.num("nucleus_radius", c.domain.nucleus_radius);
    r.num("target_h", c.domain.target_h);
    r.integer("gamma_refine", c.domain.gamma_refine);
  }
  if (const json* f = root.take("forces")) {
    if (!f->is_array()) throw ConfigError("config forces: expected an array");
    c.force.terms.clear();
    int i = 0;
    for (const auto& item : *f) {
      const std::string where = "forces[" + std::to_string(i++) + "]";
      check_keys(item, {"center", "direction", "magnitude", "kernel_radius"}, where);
      Reader r(item, where);
      PointForce p;
      r.vec("center", p.center);
      r.vec("direction", p.direction);
      r.num("magnitude", p.magnitude);
      r.num("kernel_radius", p.kernel_radius);
      c.force.terms.push_back(p);
    }
  }
  if (const json* k = root.take("kinetics")) {
    check_keys(*k, {"C1", "C2", "C3", "alpha", "zeta"}, "kinetics");
    Reader r(*k, "kinetics");
    r.num("C1", c.kinetics.C1);
    r.num("C2", c.kinetics.C2);
    r.num("C3", c.kinetics.C3);
    r.num("alpha", c.kinetics.alpha);
    r.num("zeta", c.kinetics.zeta);
  }
  if (const json* t = root.take("time")) {
    check_keys(*t, {"final_time", "num_steps", "epsilon", "snapshot_stride", "seed", "reaction_enabled",
                    "steady_tol", "steady_window", "solver"},
               "time");
    Reader r(*t, "time");
    auto& ts = c.time;
    r.num("final_time", ts.final_time);
    r.integer("num_steps", ts.num_steps);
    r.num("epsilon", ts.epsilon);
    r.integer("snapshot_stride", ts.snapshot_stride);
    r.u64("seed", ts.seed);
    r.boolean("reaction_enabled", ts.reaction_enabled);
    r.num("steady_tol", ts.steady_tol);
    r.integer("steady_window", ts.steady_window);
    if (const json* s = r.take("solver")) {
      check_keys(*s, {"tol", "max_iter", "direct_threshold"}, "time.solver");
      Reader rs(*s, "time.solver");
      rs.num("tol", ts.solver.tol);
      rs.integer("max_iter", ts.solver.max_iter);
      rs.integer("direct_threshold", ts.solver.direct_threshold);
    }
  }
  c.validate();
  return c;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

bool is_index(const std::string& s) {
  return !s.empty() && s.find_first_not_of("0123456789") == std::string::npos;
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (true) {
    const std::size_t dot = path.find('.', pos);
    parts.push_back(path.substr(pos, dot - pos));
    if (dot == std::string::npos) break;
    pos = dot + 1;
  }
  for (const auto& p : parts)
    if (p.empty()) throw ConfigError("parameter path '" + path + "': empty component");
  return parts;
}

// Collects every numeric leaf addressed by parts[i..]; arrays without an
// explicit index fan out over all elements.
void resolve(json& node, const std::vector<std::string>& parts, std::size_t i, const std::string& path,
             std::vector<json*>& out) {
  if (i == parts.size()) {
    if (!node.is_number()) throw ConfigError("parameter path '" + path + "' does not name a numeric value");
    out.push_back(&node);
    return;
  }
  const std::string& key = parts[i];
  if (node.is_array()) {
    if (is_index(key)) {
      const std::size_t k = std::stoul(key);
      if (k >= node.size()) throw ConfigError("parameter path '" + path + "': index " + key + " out of range");
      resolve(node[k], parts, i + 1, path, out);
    } else {
      if (node.empty()) throw ConfigError("parameter path '" + path + "': empty list");
      for (auto& item : node) resolve(item, parts, i, path, out);
    }
    return;
  }
  if (!node.is_object() || !node.contains(key))
    throw ConfigError("parameter path '" + path + "': unknown component '" + key + "'");
  resolve(node[key], parts, i + 1, path, out);
}

}  // namespace

void RunConfig::validate() const {
  domain.validate();
  kinetics.validate();
  time.validate();
  if (!(flow_tol > 0.0)) throw ConfigError("config: flow_tol must be > 0");
  if (!(norm(front_direction) > 0.0)) throw ConfigError("config: front_direction must be non-zero");
  for (const auto& f : force.terms) {
    if (!(f.magnitude >= 0.0) || !std::isfinite(f.magnitude)) throw ConfigError("config: force magnitude must be >= 0");
    if (!(f.kernel_radius > 0.0)) throw ConfigError("config: force kernel_radius must be > 0");
    if (!(norm(f.direction) > 0.0)) throw ConfigError("config: force direction must be non-zero");
  }
  if (label.empty()) throw ConfigError("config: label must not be empty");
}

RunConfig default_config() { return RunConfig{}; }

RunConfig run_config_from_json(const std::string& text) { return from_json_value(parse_json(text)); }

RunConfig load_run_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  return run_config_from_json(text);
}

std::string to_json(const RunConfig& config) { return to_json_value(config).dump(2); }

const std::vector<std::string>& experiment_ids() {
  static const std::vector<std::string> ids{"1a", "1b", "2a", "2b", "3a", "3b", "3c", "4"};
  return ids;
}

namespace {

RunConfig stretched(const RunConfig& base, double semi_major, double semi_minor) {
  RunConfig c = base;
  const double sx = semi_major / base.domain.semi_major, sy = semi_minor / base.domain.semi_minor;
  c.domain.semi_major = semi_major;
  c.domain.semi_minor = semi_minor;
  c.domain.nucleus_center = {sx * base.domain.nucleus_center.x, sy * base.domain.nucleus_center.y};
  c.domain.nucleus_radius = base.domain.nucleus_radius * std::min(sx, sy);
  for (auto& f : c.force.terms) f.center = {sx * f.center.x, sy * f.center.y};
  c.reference_area = kPi * base.domain.semi_major * base.domain.semi_minor;
  return c;
}

}  // namespace

RunConfig experiment_config(const std::string& id, const RunConfig& base) {
  RunConfig c = base;
  if (id == "1a") {
    c.kinetics.C3 *= 5.0;
  } else if (id == "1b") {
    c.kinetics.C3 *= 0.1;
  } else if (id == "2a") {
    for (auto& f : c.force.terms) f.magnitude *= 5.0;
  } else if (id == "2b") {
    for (auto& f : c.force.terms) f.magnitude *= 0.1;
  } else if (id == "3a") {
    c = stretched(base, 9.0 / 5.0, 5.0 / 18.0);
  } else if (id == "3b") {
    c.domain.nucleus_center = {base.domain.nucleus_center.x, 0.25};
  } else if (id == "3c") {
    const double a = 9.0 / 5.0;
    c = stretched(base, a, base.domain.semi_major * base.domain.semi_minor / a);
  } else if (id == "4") {
    const auto original = c.force.terms;
    for (const auto& f : original) {
      PointForce m = f;
      m.center = -f.center;
      m.direction = -f.direction;
      c.force.terms.push_back(m);
    }
  } else {
    throw ConfigError("unknown experiment id '" + id + "' (expected 1a, 1b, 2a, 2b, 3a, 3b, 3c or 4)");
  }
  c.label = "exp" + id;
  c.validate();
  return c;
}

void set_parameter(RunConfig& config, const std::string& path, double value) {
  json j = to_json_value(config);
  std::vector<json*> leaves;
  resolve(j, split_path(path), 0, path, leaves);
  for (json* leaf : leaves) {
    if (leaf->is_number_integer()) {
      if (value != std::floor(value)) throw ConfigError("parameter path '" + path + "' expects an integer");
      if (leaf->is_number_unsigned())
        *leaf = static_cast<std::uint64_t>(value);
      else
        *leaf = static_cast<std::int64_t>(value);
    } else {
      *leaf = value;
    }
  }
  config = from_json_value(j);
}

double get_parameter(const RunConfig& config, const std::string& path) {
  json j = to_json_value(config);
  std::vector<json*> leaves;
  resolve(j, split_path(path), 0, path, leaves);
  return leaves.front()->get<double>();
}

}  // namespace blebsim
