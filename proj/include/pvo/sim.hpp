#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pvo/scenario.hpp"
#include "pvo/types.hpp"
#include "pvo/vo.hpp"

namespace pvo::sim {

struct StepRecord {
  std::size_t step = 0;
  /// Time at the end of the step [s].
  double time = 0.0;
  ControlInput control;
  /// Weighted mean of the planning samples at the start of the step.
  RobotState estimate;
  /// Realised robot state at the end of the step.
  RobotState truth;
  /// Predicted mean obstacle states at the end of the step.
  std::vector<RobotState> obstacles;
  /// In sensing range and approaching the robot estimate.
  std::vector<bool> active;
  double tracking_cost = 0.0;
  double control_cost = 0.0;
  std::vector<double> dist_cost;
  double total_cost = 0.0;
  /// Minimum over active obstacles of the validated satisfaction rate.
  double eta = 1.0;
  /// Smallest realised gap |p - p_o| - (R + R_o) over all obstacles.
  double clearance = 0.0;
  bool collision = false;
  double decision_seconds = 0.0;
};

enum class Termination { goal, horizon, desired_infeasible, no_feasible_control };

std::string_view to_string(Termination t);

struct RunSummary {
  std::size_t steps = 0;
  Termination termination = Termination::horizon;
  std::string failure_message;
  bool reached_goal = false;
  /// Negative when the goal was not reached.
  double time_to_goal = -1.0;
  double cumulative_tracking_cost = 0.0;
  double cumulative_control_cost = 0.0;
  double cumulative_dist_cost = 0.0;
  /// sqrt(sum |u|^2) over the run.
  double control_l2 = 0.0;
  double min_eta = 1.0;
  double min_clearance = 0.0;
  bool collision = false;
  double mean_decision_seconds = 0.0;
  double std_decision_seconds = 0.0;
};

struct TrajectoryLog {
  std::string scenario;
  std::string method;
  int degree = 0;
  double rho = 0.0;
  double eta_target = 0.0;
  std::uint64_t seed = 0;
  std::size_t obstacle_count = 0;
  std::vector<StepRecord> records;
  RunSummary summary;
};

/// Recomputes the summary from the records (and the termination fields
/// already stored in `log.summary`).
RunSummary summarise(const TrajectoryLog& log, double dt);

/// Receding-horizon closed loop of one scenario. Deterministic in cfg.seed.
/// Planner failures end the run and are recorded in the summary.
TrajectoryLog run_scenario(const scenario::ScenarioConfig& cfg);

/// Weighted fraction of cross pairs with f <= 0.
double estimate_eta(const SampleSet& w_set, const SampleSet& obs_set, const ControlInput& u,
                    const vo::ObstacleGeometry& geom, double dt);

/// Planning-time sample sets at one instant.
struct PlanningSamples {
  SampleSet w;
  std::vector<SampleSet> obstacles;
};

/// Draws `count` w samples around the measured robot state and `count`
/// predicted samples per obstacle at `time + dt`. When `full > count` the
/// first `count` of `full` draws are kept with reduced-set weights.
PlanningSamples draw_planning_samples(const scenario::ScenarioConfig& cfg, const RobotState& measured,
                                      double time, std::size_t count, std::size_t full,
                                      std::uint64_t seed);

struct TimingRow {
  std::string scenario;
  std::size_t obstacles = 0;
  std::string method;
  int degree = 0;
  std::size_t decisions = 0;
  double mean_seconds = 0.0;
  double std_seconds = 0.0;
};

/// Per-decision wall clock of each method at the scenario's initial state,
/// with every obstacle active. The desired distributions are built once and
/// excluded from the timing.
std::vector<TimingRow> benchmark_timing(const scenario::ScenarioConfig& cfg,
                                        const std::vector<planner::Method>& methods,
                                        std::size_t repeats);

struct ConsistencyRow {
  std::size_t n = 0;
  int degree = 0;
  std::size_t seeds = 0;
  double mean_error = 0.0;
  double std_error = 0.0;
};

/// Seed-averaged consistency error of the f-embedding at the scenario's
/// initial state against its first obstacle, zero control.
std::vector<ConsistencyRow> consistency_report(const scenario::ScenarioConfig& cfg,
                                               const std::vector<std::size_t>& n_values,
                                               const std::vector<int>& d_values,
                                               const std::vector<std::uint64_t>& seeds);

}  // namespace pvo::sim
