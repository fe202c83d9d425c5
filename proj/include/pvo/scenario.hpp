#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "pvo/noise.hpp"
#include "pvo/planner.hpp"
#include "pvo/types.hpp"

namespace pvo::scenario {

struct Waypoint {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
};

/// Piecewise-linear predicted path. Before the first and after the last
/// waypoint the obstacle rests at that waypoint.
struct WaypointPath {
  std::vector<Waypoint> points;

  RobotState state_at(double t) const;
};

struct RobotSpec {
  RobotState initial_state;
  double radius = 0.5;
  Vec2 goal;
  double desired_speed = 1.0;
  /// 4-d perception noise on (x, vx, y, vy).
  uncertainty::NoiseModel state_noise = uncertainty::NoiseModel::zero(4);
  /// 2-d perturbation of the commanded acceleration.
  uncertainty::NoiseModel control_noise = uncertainty::NoiseModel::zero(2);
};

struct ObstacleSpec {
  WaypointPath path;
  double radius = 0.5;
  /// 4-d prediction noise on (x, vx, y, vy).
  uncertainty::NoiseModel noise = uncertainty::NoiseModel::zero(4);
};

struct SampleSpec {
  /// Planning samples per set.
  std::size_t n = 50;
  /// Full-set size for the reduced-set weights; N == n keeps uniform weights.
  std::size_t full = 50;
  std::size_t n_r = 20;
  std::size_t n_o = 20;
  /// Ground-truth size for consistency runs.
  std::size_t l = 200;
  /// Independent samples per set for the empirical eta.
  std::size_t validation = 100;
};

struct ScenarioConfig {
  std::string name = "scenario";
  double dt = 0.1;
  std::size_t horizon_steps = 200;
  double goal_radius = 0.2;
  /// Obstacles whose mean distance exceeds this are ignored by the planner;
  /// 0 disables the cut-off. Receding obstacles are ignored at any range.
  double sensing_range = 0.0;
  std::uint64_t seed = 0;
  RobotSpec robot;
  std::vector<ObstacleSpec> obstacles;
  SampleSpec samples;
  planner::PlannerConfig planner;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Parses a scenario document. Errors name the JSON path of the offending
/// field, and the line and column for syntax errors.
ScenarioConfig parse_scenario(const std::string& text);
ScenarioConfig load_scenario(const std::filesystem::path& path);

ScenarioConfig scenario_from_json(const nlohmann::json& doc);
nlohmann::json scenario_to_json(const ScenarioConfig& cfg);

/// Noise models as a list with one entry per dimension; an entry is a single
/// component object or a list of components.
uncertainty::NoiseModel noise_from_json(const nlohmann::json& j, std::size_t expected_dim,
                                        const std::string& path);
nlohmann::json noise_to_json(const uncertainty::NoiseModel& model);

}  // namespace pvo::scenario
