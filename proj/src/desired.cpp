#include "pvo/desired.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "pvo/errors.hpp"

namespace pvo::desired {

namespace {

bool all_pairs_safe(const SampleSet& w, const SampleSet& obs, const ControlInput& u,
                    const vo::ObstacleGeometry& geom, double dt) {
  return vo::pvo_samples(w, obs, u, geom, dt).max_value() <= 0.0;
}

}  // namespace

std::vector<DesiredDistribution> build_desired(const SampleSet& w_set,
                                               const std::vector<ObstacleScenario>& obstacles,
                                               std::size_t n_r, std::size_t n_o,
                                               const std::vector<ControlInput>& grid,
                                               const RobotState& target, double dt,
                                               const cost::CostWeights& weights) {
  if (grid.empty()) throw ConfigError("build_desired: empty control grid");
  if (n_r == 0 || n_o == 0) throw ConfigError("build_desired: n_r and n_o must be positive");
  if (n_r > w_set.size()) throw ShapeError("build_desired: n_r exceeds the robot sample count");
  for (const auto& o : obstacles) {
    if (o.samples == nullptr) throw ShapeError("build_desired: missing obstacle samples");
    if (n_o > o.samples->size()) throw ShapeError("build_desired: n_o exceeds the obstacle sample count");
  }

  const SampleSet w_des = w_set.head(n_r);
  std::vector<SampleSet> obs_des;
  obs_des.reserve(obstacles.size());
  for (const auto& o : obstacles) obs_des.push_back(o.samples->head(n_o));

  const RobotState mean = cost::mean_state(w_set);
  std::vector<cost::CostTerms> terms(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    terms[i] = cost::weighted(cost::tracking_control_cost(mean, grid[i], target, dt), weights);
  }
  std::vector<std::size_t> order(grid.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return candidate_less(terms[a].total(), terms[a].control, grid[a], terms[b].total(),
                          terms[b].control, grid[b]);
  });

  for (std::size_t idx : order) {
    const ControlInput& u = grid[idx];
    bool ok = true;
    for (std::size_t j = 0; j < obstacles.size() && ok; ++j) {
      ok = all_pairs_safe(w_des, obs_des[j], u, obstacles[j].geom, dt);
    }
    if (!ok) continue;
    std::vector<DesiredDistribution> out;
    out.reserve(obstacles.size());
    for (std::size_t j = 0; j < obstacles.size(); ++j) {
      DesiredDistribution d;
      d.u_nom = u;
      d.constraint_samples = vo::pvo_samples(w_des, obs_des[j], u, obstacles[j].geom, dt);
      d.w_des = w_des;
      d.obs_des = obs_des[j];
      d.objective = terms[idx].total();
      out.push_back(std::move(d));
    }
    return out;
  }
  std::ostringstream msg;
  msg << "no grid control satisfies all " << n_r * n_o << " scenario pairs for " << obstacles.size()
      << " obstacle(s)";
  throw DesiredDistributionInfeasible(msg.str());
}

DesiredDistribution build_desired(const SampleSet& w_set, const SampleSet& obs_set, std::size_t n_r,
                                  std::size_t n_o, const std::vector<ControlInput>& grid,
                                  const RobotState& target, const vo::ObstacleGeometry& geom,
                                  double dt, const cost::CostWeights& weights) {
  auto all = build_desired(w_set, {ObstacleScenario{&obs_set, geom}}, n_r, n_o, grid, target, dt, weights);
  return std::move(all.front());
}

}  // namespace pvo::desired
