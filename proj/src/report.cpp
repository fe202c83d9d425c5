#include "pvo/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pvo/errors.hpp"

namespace pvo::report {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

void state_cells(std::ostringstream& out, const RobotState& s) {
  out << ',' << format_number(s.x) << ',' << format_number(s.vx) << ',' << format_number(s.y) << ','
      << format_number(s.vy);
}

}  // namespace

std::string trajectory_csv(const sim::TrajectoryLog& log, bool wall_clock) {
  std::ostringstream out;
  out << "step,time,ax,ay,est_x,est_vx,est_y,est_vy,true_x,true_vx,true_y,true_vy,tracking_cost,control_cost,"
         "dist_cost,total_cost,eta,clearance,collision";
  for (std::size_t j = 0; j < log.obstacle_count; ++j) {
    out << ",obs" << j << "_x,obs" << j << "_vx,obs" << j << "_y,obs" << j << "_vy,obs" << j << "_active,obs" << j
        << "_dist";
  }
  if (wall_clock) out << ",decision_seconds";
  out << '\n';
  for (const auto& r : log.records) {
    double dist = 0.0;
    for (double d : r.dist_cost) dist += d;
    out << r.step << ',' << format_number(r.time) << ',' << format_number(r.control.ax) << ','
        << format_number(r.control.ay);
    state_cells(out, r.estimate);
    state_cells(out, r.truth);
    out << ',' << format_number(r.tracking_cost) << ',' << format_number(r.control_cost) << ','
        << format_number(dist) << ',' << format_number(r.total_cost) << ',' << format_number(r.eta) << ','
        << format_number(r.clearance) << ',' << (r.collision ? 1 : 0);
    for (std::size_t j = 0; j < log.obstacle_count; ++j) {
      state_cells(out, r.obstacles[j]);
      out << ',' << (r.active[j] ? 1 : 0) << ',' << format_number(r.dist_cost[j]);
    }
    if (wall_clock) out << ',' << format_number(r.decision_seconds);
    out << '\n';
  }
  return out.str();
}

nlohmann::json summary_json(const sim::TrajectoryLog& log) {
  const auto& s = log.summary;
  nlohmann::json j = {{"scenario", log.scenario},
                      {"method", log.method},
                      {"degree", log.degree},
                      {"rho", log.rho},
                      {"eta_target", log.eta_target},
                      {"seed", log.seed},
                      {"obstacles", log.obstacle_count},
                      {"steps", s.steps},
                      {"termination", std::string(sim::to_string(s.termination))},
                      {"reached_goal", s.reached_goal},
                      {"time_to_goal", s.time_to_goal},
                      {"cumulative_tracking_cost", s.cumulative_tracking_cost},
                      {"cumulative_control_cost", s.cumulative_control_cost},
                      {"cumulative_dist_cost", s.cumulative_dist_cost},
                      {"control_l2", s.control_l2},
                      {"min_eta", s.min_eta},
                      {"min_clearance", std::isfinite(s.min_clearance) ? nlohmann::json(s.min_clearance) : nlohmann::json()},
                      {"collision", s.collision},
                      {"mean_decision_seconds", s.mean_decision_seconds},
                      {"std_decision_seconds", s.std_decision_seconds}};
  if (!s.failure_message.empty()) j["failure"] = s.failure_message;
  return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

void write_run(const sim::TrajectoryLog& log, const std::filesystem::path& dir, const std::string& stem) {
  write_text(dir / (stem + ".csv"), trajectory_csv(log));
  write_text(dir / (stem + ".json"), summary_json(log).dump(2) + "\n");
}

std::string runs_csv(const std::vector<sim::TrajectoryLog>& logs) {
  std::ostringstream out;
  out << "scenario,method,degree,rho,eta_target,seed,obstacles,steps,termination,reached_goal,time_to_goal,"
         "tracking,control,dist,control_l2,min_eta,min_clearance,collision,mean_decision_seconds\n";
  for (const auto& log : logs) {
    const auto& s = log.summary;
    out << log.scenario << ',' << log.method << ',' << log.degree << ',' << format_number(log.rho) << ','
        << format_number(log.eta_target) << ',' << log.seed << ',' << log.obstacle_count << ',' << s.steps << ','
        << sim::to_string(s.termination) << ',' << (s.reached_goal ? 1 : 0) << ','
        << format_number(s.time_to_goal) << ',' << format_number(s.cumulative_tracking_cost) << ','
        << format_number(s.cumulative_control_cost) << ',' << format_number(s.cumulative_dist_cost) << ','
        << format_number(s.control_l2) << ',' << format_number(s.min_eta) << ','
        << format_number(s.min_clearance) << ',' << (s.collision ? 1 : 0) << ','
        << format_number(s.mean_decision_seconds) << '\n';
  }
  return out.str();
}

std::string timing_csv(const std::vector<sim::TimingRow>& rows) {
  std::ostringstream out;
  out << "scenario,obstacles,method,degree,decisions,mean_seconds,std_seconds\n";
  for (const auto& r : rows) {
    out << r.scenario << ',' << r.obstacles << ',' << r.method << ',' << r.degree << ',' << r.decisions << ','
        << format_number(r.mean_seconds) << ',' << format_number(r.std_seconds) << '\n';
  }
  return out.str();
}

std::string consistency_csv(const std::vector<sim::ConsistencyRow>& rows) {
  std::ostringstream out;
  out << "n,degree,seeds,mean_error,std_error\n";
  for (const auto& r : rows) {
    out << r.n << ',' << r.degree << ',' << r.seeds << ',' << format_number(r.mean_error) << ','
        << format_number(r.std_error) << '\n';
  }
  return out.str();
}

}  // namespace pvo::report
