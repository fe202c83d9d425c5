#include "pvo/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "pvo/errors.hpp"

namespace pvo::scenario {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(path, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items()) {
    if (!ok.count(key)) fail(path.empty() ? key : path + "." + key, "unknown field");
  }
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "must be finite");
  return v;
}

std::size_t count(const json& j, const std::string& path) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) fail(path, "expected a nonnegative integer");
  if (j.is_number_integer() && j.get<long long>() < 0) fail(path, "expected a nonnegative integer");
  return j.get<std::size_t>();
}

template <class T, class F>
void optional(const json& obj, const std::string& path, const char* key, T& target, F convert) {
  if (obj.contains(key)) target = convert(obj.at(key), join(path, key));
}

const json& required(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) fail(join(path, key), "missing required field");
  return obj.at(key);
}

std::vector<double> number_array(const json& j, const std::string& path, std::size_t size) {
  if (!j.is_array() || j.size() != size) fail(path, "expected an array of " + std::to_string(size) + " numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < size; ++i) out.push_back(number(j[i], index(path, i)));
  return out;
}

uncertainty::MixtureComponent component_from_json(const json& j, const std::string& path) {
  check_keys(j, path, {"kind", "weight", "loc", "scale"});
  uncertainty::MixtureComponent c;
  if (j.contains("kind")) {
    if (!j.at("kind").is_string()) fail(join(path, "kind"), "expected a string");
    try {
      c.kind = uncertainty::component_kind_from_string(j.at("kind").get<std::string>());
    } catch (const ConfigError& e) {
      fail(join(path, "kind"), e.what());
    }
  }
  optional(j, path, "weight", c.weight, number);
  optional(j, path, "loc", c.loc, number);
  c.scale = number(required(j, path, "scale"), join(path, "scale"));
  if (c.weight < 0.0) fail(join(path, "weight"), "must be nonnegative");
  if (c.scale <= 0.0) fail(join(path, "scale"), "must be strictly positive");
  return c;
}

RobotState state_from_json(const json& j, const std::string& path) {
  const auto v = number_array(j, path, 4);
  return RobotState::from_span(v);
}

Vec2 vec2_from_json(const json& j, const std::string& path) {
  const auto v = number_array(j, path, 2);
  return {v[0], v[1]};
}

GridSpec grid_from_json(const json& j, const std::string& path) {
  check_keys(j, path, {"nx", "ny", "ax_min", "ax_max", "ay_min", "ay_max"});
  GridSpec g;
  optional(j, path, "nx", g.nx, count);
  optional(j, path, "ny", g.ny, count);
  optional(j, path, "ax_min", g.ax_min, number);
  optional(j, path, "ax_max", g.ax_max, number);
  optional(j, path, "ay_min", g.ay_min, number);
  optional(j, path, "ay_max", g.ay_max, number);
  if (g.nx == 0) fail(join(path, "nx"), "must be positive");
  if (g.ny == 0) fail(join(path, "ny"), "must be positive");
  if (g.ax_min > g.ax_max) fail(join(path, "ax_max"), "must not be below ax_min");
  if (g.ay_min > g.ay_max) fail(join(path, "ay_max"), "must not be below ay_min");
  return g;
}

planner::PlannerConfig planner_from_json(const json& j, const std::string& path) {
  check_keys(j, path, {"method", "rho", "degree", "gmm_k", "mc_samples", "eta", "grid", "tracking_weight",
                       "control_weight", "f_scale", "seed"});
  planner::PlannerConfig p;
  if (j.contains("method")) {
    if (!j.at("method").is_string()) fail(join(path, "method"), "expected a string");
    try {
      p.method = planner::method_from_string(j.at("method").get<std::string>());
    } catch (const ConfigError& e) {
      fail(join(path, "method"), e.what());
    }
  }
  optional(j, path, "rho", p.rho, number);
  if (j.contains("degree")) p.kernel.degree = static_cast<int>(count(j.at("degree"), join(path, "degree")));
  optional(j, path, "gmm_k", p.gmm_k, count);
  optional(j, path, "mc_samples", p.mc_samples, count);
  optional(j, path, "eta", p.eta, number);
  if (j.contains("grid")) p.grid = grid_from_json(j.at("grid"), join(path, "grid"));
  optional(j, path, "tracking_weight", p.weights.tracking, number);
  optional(j, path, "control_weight", p.weights.control, number);
  optional(j, path, "f_scale", p.f_scale, number);
  if (j.contains("seed")) p.seed = count(j.at("seed"), join(path, "seed"));
  if (p.rho < 0.0) fail(join(path, "rho"), "must be nonnegative");
  if (p.kernel.degree < 1) fail(join(path, "degree"), "must be at least 1");
  if (p.gmm_k < 1) fail(join(path, "gmm_k"), "must be at least 1");
  if (p.mc_samples < 1) fail(join(path, "mc_samples"), "must be at least 1");
  if (!(p.eta > 0.0 && p.eta < 1.0)) fail(join(path, "eta"), "must lie in (0, 1)");
  if (p.weights.tracking < 0.0) fail(join(path, "tracking_weight"), "must be nonnegative");
  if (p.weights.control < 0.0) fail(join(path, "control_weight"), "must be nonnegative");
  return p;
}

}  // namespace

RobotState WaypointPath::state_at(double t) const {
  if (points.empty()) return {};
  if (points.size() == 1 || t <= points.front().t) return {points.front().x, 0.0, points.front().y, 0.0};
  if (t >= points.back().t) return {points.back().x, 0.0, points.back().y, 0.0};
  std::size_t k = 0;
  while (k + 2 < points.size() && t >= points[k + 1].t) ++k;
  const Waypoint& a = points[k];
  const Waypoint& b = points[k + 1];
  const double span = b.t - a.t;
  const double vx = (b.x - a.x) / span;
  const double vy = (b.y - a.y) / span;
  const double s = t - a.t;
  return {a.x + vx * s, vx, a.y + vy * s, vy};
}

uncertainty::NoiseModel noise_from_json(const json& j, std::size_t expected_dim, const std::string& path) {
  if (!j.is_array()) fail(path, "expected a list with one mixture per dimension");
  if (j.size() != expected_dim) {
    fail(path, "expected " + std::to_string(expected_dim) + " dimensions, got " + std::to_string(j.size()));
  }
  std::vector<uncertainty::Mixture> dims;
  for (std::size_t d = 0; d < j.size(); ++d) {
    const std::string dpath = index(path, d);
    uncertainty::Mixture mix;
    if (j[d].is_object()) {
      mix.components.push_back(component_from_json(j[d], dpath));
    } else if (j[d].is_array() && !j[d].empty()) {
      for (std::size_t c = 0; c < j[d].size(); ++c) mix.components.push_back(component_from_json(j[d][c], index(dpath, c)));
    } else {
      fail(dpath, "expected a component object or a nonempty list of components");
    }
    double total = 0.0;
    for (const auto& c : mix.components) total += c.weight;
    if (std::abs(total - 1.0) > 1e-12) fail(dpath, "component weights must sum to 1");
    dims.push_back(std::move(mix));
  }
  try {
    return uncertainty::NoiseModel(std::move(dims));
  } catch (const ConfigError& e) {
    fail(path, e.what());
  }
}

json noise_to_json(const uncertainty::NoiseModel& model) {
  json out = json::array();
  for (const auto& mix : model.dims()) {
    json comps = json::array();
    for (const auto& c : mix.components) {
      comps.push_back({{"kind", std::string(uncertainty::to_string(c.kind))},
                       {"weight", c.weight},
                       {"loc", c.loc},
                       {"scale", c.scale}});
    }
    out.push_back(std::move(comps));
  }
  return out;
}

ScenarioConfig scenario_from_json(const json& doc) {
  check_keys(doc, "", {"name", "dt", "horizon_steps", "goal_radius", "sensing_range", "seed", "robot",
                       "obstacles", "samples", "planner"});
  ScenarioConfig cfg;
  if (doc.contains("name")) {
    if (!doc.at("name").is_string()) fail("name", "expected a string");
    cfg.name = doc.at("name").get<std::string>();
  }
  optional(doc, "", "dt", cfg.dt, number);
  optional(doc, "", "horizon_steps", cfg.horizon_steps, count);
  optional(doc, "", "goal_radius", cfg.goal_radius, number);
  optional(doc, "", "sensing_range", cfg.sensing_range, number);
  if (doc.contains("seed")) cfg.seed = count(doc.at("seed"), "seed");

  const json& robot = required(doc, "", "robot");
  check_keys(robot, "robot", {"initial_state", "radius", "goal", "desired_speed", "state_noise", "control_noise"});
  cfg.robot.initial_state = state_from_json(required(robot, "robot", "initial_state"), "robot.initial_state");
  optional(robot, "robot", "radius", cfg.robot.radius, number);
  cfg.robot.goal = vec2_from_json(required(robot, "robot", "goal"), "robot.goal");
  optional(robot, "robot", "desired_speed", cfg.robot.desired_speed, number);
  if (robot.contains("state_noise")) cfg.robot.state_noise = noise_from_json(robot.at("state_noise"), 4, "robot.state_noise");
  if (robot.contains("control_noise")) {
    cfg.robot.control_noise = noise_from_json(robot.at("control_noise"), 2, "robot.control_noise");
  }

  if (doc.contains("obstacles")) {
    const json& obs = doc.at("obstacles");
    if (!obs.is_array()) fail("obstacles", "expected a list");
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const std::string path = index("obstacles", i);
      check_keys(obs[i], path, {"radius", "waypoints", "noise"});
      ObstacleSpec o;
      optional(obs[i], path, "radius", o.radius, number);
      const json& wps = required(obs[i], path, "waypoints");
      const std::string wpath = join(path, "waypoints");
      if (!wps.is_array() || wps.empty()) fail(wpath, "expected a nonempty list of waypoints");
      for (std::size_t k = 0; k < wps.size(); ++k) {
        const std::string kpath = index(wpath, k);
        check_keys(wps[k], kpath, {"t", "x", "y"});
        Waypoint w;
        w.t = number(required(wps[k], kpath, "t"), join(kpath, "t"));
        w.x = number(required(wps[k], kpath, "x"), join(kpath, "x"));
        w.y = number(required(wps[k], kpath, "y"), join(kpath, "y"));
        if (!o.path.points.empty() && w.t <= o.path.points.back().t) fail(join(kpath, "t"), "waypoint times must increase");
        o.path.points.push_back(w);
      }
      if (obs[i].contains("noise")) o.noise = noise_from_json(obs[i].at("noise"), 4, join(path, "noise"));
      cfg.obstacles.push_back(std::move(o));
    }
  }

  if (doc.contains("samples")) {
    const json& s = doc.at("samples");
    check_keys(s, "samples", {"n", "N", "n_r", "n_o", "l", "validation"});
    optional(s, "samples", "n", cfg.samples.n, count);
    cfg.samples.full = cfg.samples.n;
    optional(s, "samples", "N", cfg.samples.full, count);
    optional(s, "samples", "n_r", cfg.samples.n_r, count);
    optional(s, "samples", "n_o", cfg.samples.n_o, count);
    optional(s, "samples", "l", cfg.samples.l, count);
    optional(s, "samples", "validation", cfg.samples.validation, count);
  }
  if (doc.contains("planner")) cfg.planner = planner_from_json(doc.at("planner"), "planner");
  cfg.validate();
  return cfg;
}

void ScenarioConfig::validate() const {
  if (!(dt > 0.0)) fail("dt", "must be positive");
  if (horizon_steps < 1) fail("horizon_steps", "must be at least 1");
  if (!(goal_radius > 0.0)) fail("goal_radius", "must be positive");
  if (sensing_range < 0.0) fail("sensing_range", "must be nonnegative");
  if (!robot.initial_state.is_finite()) fail("robot.initial_state", "must be finite");
  if (!(robot.radius > 0.0)) fail("robot.radius", "must be positive");
  if (!(robot.desired_speed > 0.0)) fail("robot.desired_speed", "must be positive");
  if (robot.state_noise.dim() != 4) fail("robot.state_noise", "expected 4 dimensions");
  if (robot.control_noise.dim() != 2) fail("robot.control_noise", "expected 2 dimensions");
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    const std::string path = index("obstacles", i);
    if (!(obstacles[i].radius > 0.0)) fail(join(path, "radius"), "must be positive");
    if (obstacles[i].path.points.empty()) fail(join(path, "waypoints"), "must not be empty");
    if (obstacles[i].noise.dim() != 4) fail(join(path, "noise"), "expected 4 dimensions");
  }
  if (samples.n < 2) fail("samples.n", "must be at least 2");
  if (samples.full < samples.n) fail("samples.N", "must be at least samples.n");
  if (samples.n_r < 1 || samples.n_r > samples.n) fail("samples.n_r", "must lie in [1, samples.n]");
  if (samples.n_o < 1 || samples.n_o > samples.n) fail("samples.n_o", "must lie in [1, samples.n]");
  if (samples.l < 1) fail("samples.l", "must be positive");
  if (samples.validation < 1) fail("samples.validation", "must be positive");
  try {
    planner.validate();
  } catch (const ConfigError& e) {
    fail("planner", e.what());
  }
}

ScenarioConfig parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::ostringstream msg;
    msg << "line " << line << ", column " << column << ": syntax error";
    throw ConfigError(msg.str());
  }
  return scenario_from_json(doc);
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open scenario file");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_scenario(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

json scenario_to_json(const ScenarioConfig& cfg) {
  json robot = {{"initial_state", cfg.robot.initial_state.to_array()},
                {"radius", cfg.robot.radius},
                {"goal", {cfg.robot.goal.x, cfg.robot.goal.y}},
                {"desired_speed", cfg.robot.desired_speed},
                {"state_noise", noise_to_json(cfg.robot.state_noise)},
                {"control_noise", noise_to_json(cfg.robot.control_noise)}};
  json obstacles = json::array();
  for (const auto& o : cfg.obstacles) {
    json wps = json::array();
    for (const auto& w : o.path.points) wps.push_back({{"t", w.t}, {"x", w.x}, {"y", w.y}});
    obstacles.push_back({{"radius", o.radius}, {"waypoints", wps}, {"noise", noise_to_json(o.noise)}});
  }
  const auto& p = cfg.planner;
  json planner = {{"method", std::string(planner::to_string(p.method))},
                  {"rho", p.rho},
                  {"degree", p.kernel.degree},
                  {"gmm_k", p.gmm_k},
                  {"mc_samples", p.mc_samples},
                  {"eta", p.eta},
                  {"grid",
                   {{"nx", p.grid.nx},
                    {"ny", p.grid.ny},
                    {"ax_min", p.grid.ax_min},
                    {"ax_max", p.grid.ax_max},
                    {"ay_min", p.grid.ay_min},
                    {"ay_max", p.grid.ay_max}}},
                  {"tracking_weight", p.weights.tracking},
                  {"control_weight", p.weights.control},
                  {"f_scale", p.f_scale},
                  {"seed", p.seed}};
  const auto& s = cfg.samples;
  return {{"name", cfg.name},
          {"dt", cfg.dt},
          {"horizon_steps", cfg.horizon_steps},
          {"goal_radius", cfg.goal_radius},
          {"sensing_range", cfg.sensing_range},
          {"seed", cfg.seed},
          {"robot", robot},
          {"obstacles", obstacles},
          {"samples",
           {{"n", s.n}, {"N", s.full}, {"n_r", s.n_r}, {"n_o", s.n_o}, {"l", s.l}, {"validation", s.validation}}},
          {"planner", planner}};
}

}  // namespace pvo::scenario
