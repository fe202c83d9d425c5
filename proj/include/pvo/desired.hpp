#pragma once

#include <cstddef>
#include <vector>

#include "pvo/cost.hpp"
#include "pvo/grid.hpp"
#include "pvo/types.hpp"
#include "pvo/vo.hpp"

namespace pvo::desired {

/// Target distribution of f for one obstacle: the scenario-program control
/// and the constraint values of every scenario pair under it.
struct DesiredDistribution {
  ControlInput u_nom;
  /// n_r * n_o values, all <= 0, uniform weights.
  ConstraintSampleSet constraint_samples;
  SampleSet w_des;
  SampleSet obs_des;
  /// Weighted J(u_nom).
  double objective = 0.0;
};

struct ObstacleScenario {
  const SampleSet* samples = nullptr;
  vo::ObstacleGeometry geom;
};

/// Scenario program on the control grid: the minimum-J control (ties broken
/// as in the planner) for which f <= 0 holds for every pair of the first n_r
/// robot and first n_o obstacle samples.
/// Throws DesiredDistributionInfeasible when no grid control qualifies.
DesiredDistribution build_desired(const SampleSet& w_set, const SampleSet& obs_set, std::size_t n_r,
                                  std::size_t n_o, const std::vector<ControlInput>& control_grid,
                                  const RobotState& tracking_target, const vo::ObstacleGeometry& geom,
                                  double dt, const cost::CostWeights& weights = {});

/// One shared u_nom against the union of all obstacles' scenario
/// constraints; returns one desired distribution per obstacle, in order.
std::vector<DesiredDistribution> build_desired(const SampleSet& w_set,
                                               const std::vector<ObstacleScenario>& obstacles,
                                               std::size_t n_r, std::size_t n_o,
                                               const std::vector<ControlInput>& control_grid,
                                               const RobotState& tracking_target, double dt,
                                               const cost::CostWeights& weights = {});

}  // namespace pvo::desired
