#include <cmath>
#include <string>

#include "doctest.h"
#include "gen.hpp"
#include "pvo/errors.hpp"
#include "pvo/report.hpp"
#include "pvo/scenario.hpp"
#include "pvo/sim.hpp"

using namespace pvo;
using namespace pvo::sim;

namespace {

const char* kSmall = R"({
  "name": "small",
  "dt": 0.1,
  "horizon_steps": 60,
  "sensing_range": 6.0,
  "seed": 3,
  "robot": {
    "initial_state": [0, 1, 0, 0],
    "radius": 0.5,
    "goal": [8, 0],
    "desired_speed": 1.0,
    "state_noise": [{"kind": "uniform", "scale": 0.01}, {"kind": "uniform", "scale": 0.02},
                    {"kind": "uniform", "scale": 0.01}, {"kind": "uniform", "scale": 0.02}],
    "control_noise": [{"kind": "uniform", "scale": 0.1}, {"kind": "uniform", "scale": 0.1}]
  },
  "obstacles": [{
    "radius": 0.5,
    "waypoints": [{"t": 0, "x": 8, "y": 0.2}, {"t": 20, "x": -2, "y": 0.2}],
    "noise": [{"kind": "gaussian", "scale": 0.01}, {"kind": "gaussian", "scale": 0.02},
              {"kind": "gaussian", "scale": 0.01}, {"kind": "gaussian", "scale": 0.02}]
  }],
  "samples": {"n": 20, "N": 20, "n_r": 10, "n_o": 10, "l": 40, "validation": 30},
  "planner": {"method": "rkhs", "degree": 2, "rho": 0.2,
              "grid": {"nx": 5, "ny": 9, "ax_min": -4, "ax_max": 4, "ay_min": -4, "ay_max": 4},
              "control_weight": 0.05}
})";

std::string error_of(const std::string& text) {
  try {
    scenario::parse_scenario(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto pos = s.find(from);
  REQUIRE(pos != std::string::npos);
  return s.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("estimate_eta counts satisfied pairs") {
  const vo::ObstacleGeometry geom{0.5, 0.5};
  // robot heading +x; the first obstacle sits on its path, the second far to the side
  const SampleSet w = SampleSet::uniform(6, {0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0});
  const SampleSet o = SampleSet::uniform(4, {5, 0, 0, 0, 5, 0, 10, 0});
  CHECK(estimate_eta(w, o, {0, 0}, geom, 0.1) == doctest::Approx(0.5));
  const SampleSet w2 = SampleSet::uniform(6, {0, 1, 0, 0, 0, 0, 0, 1, -5, 0, 0, 0});
  CHECK(estimate_eta(w2, o, {0, 0}, geom, 0.1) == doctest::Approx(0.75));
  const SampleSet away = SampleSet::uniform(4, {-10, -1, 0, 0});
  CHECK(estimate_eta(SampleSet::uniform(6, {0, 1, 0, 3, 0, 0}), away, {0, 0}, geom, 0.1) == 1.0);
}

TEST_CASE("waypoint path interpolation") {
  scenario::WaypointPath p{{{0, 0, 0}, {2, 4, 2}}};
  const RobotState mid = p.state_at(1.0);
  CHECK(mid.x == doctest::Approx(2));
  CHECK(mid.vx == doctest::Approx(2));
  CHECK(mid.vy == doctest::Approx(1));
  const RobotState after = p.state_at(5.0);
  CHECK(after.x == 4);
  CHECK(after.vx == 0);
}

TEST_CASE("scenario errors name the offending field") {
  CHECK(error_of(replace(kSmall, "\"dt\": 0.1", "\"dt\": -0.1")).find("dt") != std::string::npos);
  CHECK(error_of(replace(kSmall, "\"radius\": 0.5,\n    \"goal\"", "\"radius\": \"big\",\n    \"goal\""))
            .find("robot.radius") != std::string::npos);
  CHECK(error_of(replace(kSmall, "{\"kind\": \"gaussian\", \"scale\": 0.02},\n              {\"kind\": \"gaussian\", \"scale\": 0.01}",
                         "{\"kind\": \"gaussian\", \"scale\": 0.02},\n              {\"kind\": \"gaussian\", \"scale\": -1}"))
            .find("obstacles[0].noise[2].scale") != std::string::npos);
  CHECK(error_of(replace(kSmall, "\"seed\": 3", "\"seed\": 3, \"colour\": 1")).find("colour") != std::string::npos);
  CHECK(error_of(replace(kSmall, "\"method\": \"rkhs\"", "\"method\": \"magic\"")).find("planner.method") !=
        std::string::npos);
  CHECK(error_of(replace(kSmall, "\"n_r\": 10", "\"n_r\": 30")).find("n_r") != std::string::npos);
  const std::string syntax = error_of(replace(kSmall, "\"horizon_steps\": 60,", "\"horizon_steps\": 60,,"));
  CHECK(syntax.find("line 4") != std::string::npos);
}

TEST_CASE("scenario JSON round trip") {
  const auto cfg = scenario::parse_scenario(kSmall);
  const auto again = scenario::scenario_from_json(scenario::scenario_to_json(cfg));
  CHECK(scenario::scenario_to_json(again) == scenario::scenario_to_json(cfg));
  CHECK(again.samples.n_r == 10);
  CHECK(again.planner.grid.ny == 9);
}

TEST_CASE("runs are reproducible and summaries match their records") {
  const auto cfg = scenario::parse_scenario(kSmall);
  const TrajectoryLog a = run_scenario(cfg);
  const TrajectoryLog b = run_scenario(cfg);
  CHECK(report::trajectory_csv(a, false) == report::trajectory_csv(b, false));
  REQUIRE(a.records.size() == a.summary.steps);

  double tracking = 0.0, control = 0.0, dist = 0.0, l2 = 0.0, eta = 1.0, clearance = INFINITY;
  bool collision = false;
  for (const auto& r : a.records) {
    tracking += r.tracking_cost;
    control += r.control_cost;
    for (double d : r.dist_cost) dist += d;
    l2 += r.control.squared_norm();
    eta = std::min(eta, r.eta);
    clearance = std::min(clearance, r.clearance);
    collision = collision || r.collision;
    CHECK(r.collision == (r.clearance < 0.0));
  }
  CHECK(a.summary.cumulative_tracking_cost == tracking);
  CHECK(a.summary.cumulative_control_cost == control);
  CHECK(a.summary.cumulative_dist_cost == dist);
  CHECK(a.summary.control_l2 == std::sqrt(l2));
  CHECK(a.summary.min_eta == eta);
  CHECK(a.summary.min_clearance == clearance);
  CHECK(a.summary.collision == collision);

  auto other = cfg;
  other.seed = 4;
  CHECK(report::trajectory_csv(run_scenario(other), false) != report::trajectory_csv(a, false));
}

TEST_CASE("free straight line reaches the goal on schedule") {
  auto cfg = scenario::parse_scenario(kSmall);
  cfg.obstacles.clear();
  cfg.robot.initial_state = {0, 1, 0, 0};
  cfg.robot.goal = {6.0, 0.0};
  cfg.robot.state_noise = uncertainty::NoiseModel::zero(4);
  cfg.robot.control_noise = uncertainty::NoiseModel::zero(2);
  cfg.horizon_steps = 100;
  const TrajectoryLog log = run_scenario(cfg);
  REQUIRE(log.summary.reached_goal);
  CHECK_FALSE(log.summary.collision);
  // the goal region is entered goal_radius before the goal itself
  const double expect = (6.0 - cfg.goal_radius) / 1.0;
  CHECK(std::abs(log.summary.time_to_goal - expect) <= cfg.dt + 1e-9);
}

TEST_CASE("infeasible desired distribution ends the run gracefully") {
  auto cfg = scenario::parse_scenario(kSmall);
  cfg.planner.grid = {3, 3, -0.05, 0.05, -0.05, 0.05};
  cfg.obstacles[0].path.points = {{0, 3, 0}, {20, -17, 0}};
  const TrajectoryLog log = run_scenario(cfg);
  CHECK(log.summary.termination == Termination::desired_infeasible);
  CHECK_FALSE(log.summary.failure_message.empty());
}

TEST_CASE("trajectory CSV header is frozen") {
  const auto cfg = scenario::parse_scenario(kSmall);
  auto short_cfg = cfg;
  short_cfg.horizon_steps = 2;
  const std::string csv = report::trajectory_csv(run_scenario(short_cfg), true);
  const std::string header = csv.substr(0, csv.find('\n'));
  CHECK(header ==
        "step,time,ax,ay,est_x,est_vx,est_y,est_vy,true_x,true_vx,true_y,true_vy,tracking_cost,control_cost,"
        "dist_cost,total_cost,eta,clearance,collision,obs0_x,obs0_vx,obs0_y,obs0_vy,obs0_active,obs0_dist,"
        "decision_seconds");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

TEST_CASE("format_number round trips") {
  testing::Gen g(71);
  for (int i = 0; i < 200; ++i) {
    const double v = g.normal(0, 1e3) * std::pow(10.0, g.uniform(-8, 8));
    CHECK(std::stod(report::format_number(v)) == v);
  }
}

TEST_CASE("consistency report shape") {
  const auto cfg = scenario::parse_scenario(kSmall);
  const auto rows = consistency_report(cfg, {5, 10, 40}, {1, 2}, {0, 1});
  CHECK(rows.size() == 6);
  for (const auto& r : rows) {
    if (r.n == 40) CHECK(r.mean_error < 1e-10);
  }
}

TEST_CASE("timing table lists every method") {
  const auto cfg = scenario::parse_scenario(kSmall);
  const auto rows = benchmark_timing(cfg, {planner::Method::rkhs, planner::Method::gmm_kld}, 1);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].method == "rkhs");
  CHECK(rows[1].method == "gmm_kld");
  CHECK(rows[0].mean_seconds > 0.0);
}
