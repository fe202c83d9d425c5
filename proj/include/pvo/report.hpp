#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "pvo/sim.hpp"

namespace pvo::report {

/// Per-step CSV. Column order: step, time, ax, ay, est_x, est_vx, est_y,
/// est_vy, true_x, true_vx, true_y, true_vy, tracking_cost, control_cost,
/// dist_cost, total_cost, eta, clearance, collision, then for every obstacle
/// j: obs<j>_x, obs<j>_vx, obs<j>_y, obs<j>_vy, obs<j>_active, obs<j>_dist,
/// and decision_seconds last (omitted when `wall_clock` is false).
std::string trajectory_csv(const sim::TrajectoryLog& log, bool wall_clock = true);

nlohmann::json summary_json(const sim::TrajectoryLog& log);

/// Writes <stem>.csv and <stem>.json into `dir`, creating it if needed.
void write_run(const sim::TrajectoryLog& log, const std::filesystem::path& dir, const std::string& stem);

/// One row per run: scenario, method, degree, rho, eta_target, seed,
/// obstacles, steps, termination, reached_goal, time_to_goal, tracking,
/// control, dist, control_l2, min_eta, min_clearance, collision,
/// mean_decision_seconds.
std::string runs_csv(const std::vector<sim::TrajectoryLog>& logs);

std::string timing_csv(const std::vector<sim::TimingRow>& rows);
std::string consistency_csv(const std::vector<sim::ConsistencyRow>& rows);

/// Shortest decimal text that reads back to the same double.
std::string format_number(double v);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace pvo::report
