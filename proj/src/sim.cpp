#include "pvo/sim.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <optional>

#include "pvo/cost.hpp"
#include "pvo/desired.hpp"
#include "pvo/embedding.hpp"
#include "pvo/errors.hpp"
#include "pvo/grid.hpp"
#include "pvo/noise.hpp"
#include "pvo/uncertainty.hpp"

namespace pvo::sim {

namespace {

using Clock = std::chrono::steady_clock;
using uncertainty::derive_seed;

// seed streams
constexpr std::uint64_t kMeasurementStream = 1;
constexpr std::uint64_t kPlanningStream = 2;
constexpr std::uint64_t kValidationStream = 5;
constexpr std::uint64_t kTruthStream = 6;
constexpr std::uint64_t kOffsetStream = 7;
constexpr std::uint64_t kPlannerStream = 8;
constexpr std::uint64_t kObstacleSubstream = 100;

vo::ObstacleGeometry geometry(const scenario::ScenarioConfig& cfg, std::size_t j) {
  return {cfg.robot.radius, cfg.obstacles[j].radius};
}

RobotState add(const RobotState& a, std::span<const double> b) {
  return {a.x + b[0], a.vx + b[1], a.y + b[2], a.vy + b[3]};
}

bool uses_desired(planner::Method m) { return m == planner::Method::rkhs || m == planner::Method::gmm_kld; }

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::goal: return "goal";
    case Termination::horizon: return "horizon";
    case Termination::desired_infeasible: return "desired_infeasible";
    case Termination::no_feasible_control: return "no_feasible_control";
  }
  return "horizon";
}

double estimate_eta(const SampleSet& w_set, const SampleSet& obs_set, const ControlInput& u,
                    const vo::ObstacleGeometry& geom, double dt) {
  const ConstraintSampleSet f = vo::pvo_samples(w_set, obs_set, u, geom, dt);
  double safe = 0.0, total = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    total += f.weights[i];
    if (f.values[i] <= 0.0) safe += f.weights[i];
  }
  return safe / total;
}

PlanningSamples draw_planning_samples(const scenario::ScenarioConfig& cfg, const RobotState& measured,
                                      double time, std::size_t count, std::size_t full, std::uint64_t seed) {
  if (count == 0 || full < count) throw ShapeError("draw_planning_samples: need 1 <= count <= full");
  const embedding::KernelSpec kernel = cfg.planner.kernel;
  auto finish = [&](std::size_t dim, std::vector<double> data) {
    SampleSet all = SampleSet::uniform(dim, std::move(data), seed);
    if (full == count) return all;
    SampleSet reduced = all.head(count);
    reduced.set_weights(embedding::reduced_set_weights(all, reduced, kernel).weights);
    return reduced;
  };

  PlanningSamples out;
  {
    uncertainty::Rng rng(seed);
    std::vector<double> data(full * uncertainty::kWDim);
    double e[4];
    for (std::size_t i = 0; i < full; ++i) {
      cfg.robot.state_noise.draw_into(e, rng);
      double* row = data.data() + i * uncertainty::kWDim;
      row[0] = measured.x + e[0];
      row[1] = measured.vx + e[1];
      row[2] = measured.y + e[2];
      row[3] = measured.vy + e[3];
      cfg.robot.control_noise.draw_into(std::span<double>(row + 4, 2), rng);
    }
    out.w = finish(uncertainty::kWDim, std::move(data));
  }
  for (std::size_t j = 0; j < cfg.obstacles.size(); ++j) {
    const auto& o = cfg.obstacles[j];
    uncertainty::Rng rng(derive_seed(seed, kObstacleSubstream, j));
    const RobotState pred = o.path.state_at(time + cfg.dt);
    std::vector<double> data(full * RobotState::kDim);
    double e[4];
    for (std::size_t i = 0; i < full; ++i) {
      o.noise.draw_into(e, rng);
      const RobotState s = add(pred, e);
      const auto a = s.to_array();
      std::copy(a.begin(), a.end(), data.begin() + static_cast<std::ptrdiff_t>(i * RobotState::kDim));
    }
    out.obstacles.push_back(finish(RobotState::kDim, std::move(data)));
  }
  return out;
}

RunSummary summarise(const TrajectoryLog& log, double dt) {
  RunSummary s;
  s.termination = log.summary.termination;
  s.failure_message = log.summary.failure_message;
  s.steps = log.records.size();
  s.min_clearance = std::numeric_limits<double>::infinity();
  double u2 = 0.0, t_sum = 0.0;
  for (const auto& r : log.records) {
    s.cumulative_tracking_cost += r.tracking_cost;
    s.cumulative_control_cost += r.control_cost;
    for (double d : r.dist_cost) s.cumulative_dist_cost += d;
    u2 += r.control.squared_norm();
    s.min_eta = std::min(s.min_eta, r.eta);
    s.min_clearance = std::min(s.min_clearance, r.clearance);
    s.collision = s.collision || r.collision;
    t_sum += r.decision_seconds;
  }
  s.control_l2 = std::sqrt(u2);
  s.reached_goal = s.termination == Termination::goal;
  s.time_to_goal = s.reached_goal ? static_cast<double>(s.steps) * dt : -1.0;
  if (s.steps > 0) {
    const double n = static_cast<double>(s.steps);
    s.mean_decision_seconds = t_sum / n;
    double var = 0.0;
    for (const auto& r : log.records) var += (r.decision_seconds - s.mean_decision_seconds) * (r.decision_seconds - s.mean_decision_seconds);
    s.std_decision_seconds = std::sqrt(var / n);
  }
  return s;
}

TrajectoryLog run_scenario(const scenario::ScenarioConfig& cfg) {
  cfg.validate();
  TrajectoryLog log;
  log.scenario = cfg.name;
  log.method = std::string(planner::to_string(cfg.planner.method));
  log.degree = cfg.planner.kernel.degree;
  log.rho = cfg.planner.rho;
  log.eta_target = cfg.planner.eta;
  log.seed = cfg.seed;
  log.obstacle_count = cfg.obstacles.size();

  const std::size_t m = cfg.obstacles.size();
  const std::vector<ControlInput> grid = make_grid(cfg.planner.grid);
  planner::PlannerConfig pcfg = cfg.planner;
  pcfg.seed = derive_seed(cfg.seed, kPlannerStream, cfg.planner.seed);

  // persistent estimation errors: the truth is one draw of each believed
  // distribution
  std::array<double, 4> bias{};
  std::vector<std::array<double, 4>> offsets(m);
  {
    uncertainty::Rng rng(derive_seed(cfg.seed, kMeasurementStream));
    cfg.robot.state_noise.draw_into(bias, rng);
  }
  {
    uncertainty::Rng rng(derive_seed(cfg.seed, kOffsetStream));
    for (std::size_t j = 0; j < m; ++j) cfg.obstacles[j].noise.draw_into(offsets[j], rng);
  }

  RobotState truth = cfg.robot.initial_state;
  log.summary.termination = Termination::horizon;
  for (std::size_t k = 0; k < cfg.horizon_steps; ++k) {
    const double t = static_cast<double>(k) * cfg.dt;

    const RobotState measured{truth.x - bias[0], truth.vx - bias[1], truth.y - bias[2], truth.vy - bias[3]};
    const PlanningSamples samples = draw_planning_samples(cfg, measured, t, cfg.samples.n, cfg.samples.full,
                                                          derive_seed(cfg.seed, kPlanningStream, k));

    StepRecord rec;
    rec.step = k;
    rec.time = t + cfg.dt;
    rec.estimate = cost::mean_state(samples.w);
    rec.active.assign(m, false);
    rec.dist_cost.assign(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
      rec.obstacles.push_back(cost::mean_state(samples.obstacles[j]));
      const Vec2 rel = rec.estimate.position() - rec.obstacles[j].position();
      const Vec2 rel_v = rec.estimate.velocity() - rec.obstacles[j].velocity();
      const bool in_range = cfg.sensing_range <= 0.0 || squared_norm(rel) <= cfg.sensing_range * cfg.sensing_range;
      // active: within sensing range and closing in
      rec.active[j] = in_range && dot(rel, rel_v) < 0.0;
    }
    const RobotState target = cost::desired_state(rec.estimate.position(), cfg.robot.goal, cfg.robot.desired_speed, cfg.dt);

    std::vector<std::size_t> active;
    for (std::size_t j = 0; j < m; ++j) {
      if (rec.active[j]) active.push_back(j);
    }

    const auto start = Clock::now();
    planner::ControlDecision decision;
    try {
      std::vector<desired::DesiredDistribution> targets;
      if (uses_desired(pcfg.method) && !active.empty()) {
        std::vector<desired::ObstacleScenario> scen;
        for (std::size_t j : active) scen.push_back({&samples.obstacles[j], geometry(cfg, j)});
        targets = desired::build_desired(samples.w, scen, cfg.samples.n_r, cfg.samples.n_o, grid, target, cfg.dt,
                                         pcfg.weights);
      }
      std::vector<planner::ObstacleContext> ctx;
      for (std::size_t a = 0; a < active.size(); ++a) {
        const std::size_t j = active[a];
        ctx.push_back({&samples.obstacles[j], geometry(cfg, j), targets.empty() ? nullptr : &targets[a]});
      }
      decision = planner::select_control(samples.w, ctx, target, pcfg, cfg.dt);
      for (std::size_t a = 0; a < active.size(); ++a) rec.dist_cost[active[a]] = decision.per_obstacle_dist[a];
    } catch (const DesiredDistributionInfeasible& err) {
      log.summary.termination = Termination::desired_infeasible;
      log.summary.failure_message = err.what();
      break;
    } catch (const NoFeasibleControl& err) {
      log.summary.termination = Termination::no_feasible_control;
      log.summary.failure_message = err.what();
      break;
    }
    rec.decision_seconds = seconds_since(start);
    rec.control = decision.control;
    rec.tracking_cost = decision.tracking_cost;
    rec.control_cost = decision.control_cost;
    rec.total_cost = decision.total;

    if (!active.empty()) {
      const PlanningSamples check = draw_planning_samples(cfg, measured, t, cfg.samples.validation,
                                                          cfg.samples.validation,
                                                          derive_seed(cfg.seed, kValidationStream, k));
      double eta = 1.0;
      for (std::size_t j : active) {
        eta = std::min(eta, estimate_eta(check.w, check.obstacles[j], decision.control, geometry(cfg, j), cfg.dt));
      }
      rec.eta = eta;
    }

    double noise[2];
    {
      uncertainty::Rng rng(derive_seed(cfg.seed, kTruthStream, k));
      cfg.robot.control_noise.draw_into(noise, rng);
    }
    truth = uncertainty::step(truth, decision.control, noise[0], noise[1], cfg.dt);
    rec.truth = truth;
    rec.clearance = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m; ++j) {
      const RobotState o = add(cfg.obstacles[j].path.state_at(rec.time), offsets[j]);
      const double gap = std::sqrt(squared_norm(truth.position() - o.position())) -
                         (cfg.robot.radius + cfg.obstacles[j].radius);
      rec.clearance = std::min(rec.clearance, gap);
    }
    rec.collision = rec.clearance < 0.0;
    log.records.push_back(std::move(rec));

    if (squared_norm(truth.position() - cfg.robot.goal) <= cfg.goal_radius * cfg.goal_radius) {
      log.summary.termination = Termination::goal;
      break;
    }
  }
  log.summary = summarise(log, cfg.dt);
  return log;
}

std::vector<TimingRow> benchmark_timing(const scenario::ScenarioConfig& cfg,
                                        const std::vector<planner::Method>& methods, std::size_t repeats) {
  cfg.validate();
  if (repeats == 0) throw ConfigError("benchmark_timing: repeats must be positive");
  const std::vector<ControlInput> grid = make_grid(cfg.planner.grid);
  const PlanningSamples samples =
      draw_planning_samples(cfg, cfg.robot.initial_state, 0.0, cfg.samples.n, cfg.samples.full,
                            derive_seed(cfg.seed, kPlanningStream, 0));
  const RobotState target =
      cost::desired_state(cfg.robot.initial_state.position(), cfg.robot.goal, cfg.robot.desired_speed, cfg.dt);

  std::vector<desired::ObstacleScenario> scen;
  for (std::size_t j = 0; j < cfg.obstacles.size(); ++j) scen.push_back({&samples.obstacles[j], geometry(cfg, j)});
  const auto targets = desired::build_desired(samples.w, scen, cfg.samples.n_r, cfg.samples.n_o, grid, target,
                                              cfg.dt, cfg.planner.weights);
  std::vector<planner::ObstacleContext> ctx;
  for (std::size_t j = 0; j < cfg.obstacles.size(); ++j) ctx.push_back({&samples.obstacles[j], geometry(cfg, j), &targets[j]});

  std::vector<TimingRow> rows;
  for (planner::Method method : methods) {
    planner::PlannerConfig pcfg = cfg.planner;
    pcfg.method = method;
    pcfg.seed = derive_seed(cfg.seed, kPlannerStream, cfg.planner.seed);
    std::vector<double> times;
    for (std::size_t r = 0; r < repeats; ++r) {
      const auto start = Clock::now();
      const auto decision = planner::select_control(samples.w, ctx, target, pcfg, cfg.dt);
      times.push_back(seconds_since(start));
      (void)decision;
    }
    TimingRow row;
    row.scenario = cfg.name;
    row.obstacles = cfg.obstacles.size();
    row.method = std::string(planner::to_string(method));
    row.degree = method == planner::Method::rkhs ? cfg.planner.kernel.degree : 0;
    row.decisions = times.size();
    for (double t : times) row.mean_seconds += t;
    row.mean_seconds /= static_cast<double>(times.size());
    for (double t : times) row.std_seconds += (t - row.mean_seconds) * (t - row.mean_seconds);
    row.std_seconds = std::sqrt(row.std_seconds / static_cast<double>(times.size()));
    rows.push_back(row);
  }
  return rows;
}

std::vector<ConsistencyRow> consistency_report(const scenario::ScenarioConfig& cfg,
                                               const std::vector<std::size_t>& n_values,
                                               const std::vector<int>& d_values,
                                               const std::vector<std::uint64_t>& seeds) {
  cfg.validate();
  if (cfg.obstacles.empty()) throw ConfigError("consistency_report: scenario has no obstacle");
  if (seeds.empty()) throw ConfigError("consistency_report: no seeds");
  const std::size_t l = cfg.samples.l;
  for (std::size_t n : n_values) {
    if (n == 0 || n > l) throw ConfigError("consistency_report: every n must lie in [1, samples.l]");
  }
  const vo::ObstacleGeometry geom = geometry(cfg, 0);
  const double scale = planner::f_scale_for(cfg.planner, geom);

  std::vector<PlanningSamples> sets;
  for (std::uint64_t s : seeds) {
    sets.push_back(draw_planning_samples(cfg, cfg.robot.initial_state, 0.0, l, l, derive_seed(s, kPlanningStream)));
  }
  std::vector<ConsistencyRow> rows;
  for (int d : d_values) {
    // errs[n index][seed index]
    std::vector<std::vector<double>> errs(n_values.size(), std::vector<double>(seeds.size()));
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      const auto truth = embedding::consistency_truth(sets[i].w, sets[i].obstacles[0], {0.0, 0.0}, l,
                                                      embedding::KernelSpec{d}, geom, cfg.dt, scale);
      for (std::size_t k = 0; k < n_values.size(); ++k) {
        const std::size_t n = n_values[k];
        errs[k][i] = embedding::consistency_error(truth, sets[i].w, sets[i].obstacles[0], {0.0, 0.0}, n, l, geom,
                                                  cfg.dt, derive_seed(seeds[i], 9, n), scale);
      }
    }
    for (std::size_t k = 0; k < n_values.size(); ++k) {
      ConsistencyRow row;
      row.n = n_values[k];
      row.degree = d;
      row.seeds = seeds.size();
      for (double e : errs[k]) row.mean_error += e;
      row.mean_error /= static_cast<double>(seeds.size());
      for (double e : errs[k]) row.std_error += (e - row.mean_error) * (e - row.mean_error);
      row.std_error = std::sqrt(row.std_error / static_cast<double>(seeds.size()));
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace pvo::sim
