#pragma once

#include "pvo/types.hpp"

namespace pvo::cost {

/// Scalarisation weights of the receding-horizon cost
/// J(u) = tracking * |xi_mean' - xi_d|^2 + control * |u|^2.
struct CostWeights {
  double tracking = 1.0;
  double control = 1.0;
};

struct CostTerms {
  double tracking = 0.0;
  double control = 0.0;

  double total() const { return tracking + control; }
};

/// Propagates the weighted mean state of `samples` (4-d states or 6-d w
/// samples; only the first four coordinates are used) one step under `u`
/// without noise and compares it with `desired_state`. Terms are unweighted.
CostTerms tracking_control_cost(const SampleSet& samples, const ControlInput& u,
                                const RobotState& desired_state, double dt);

/// Same as above from a precomputed mean state.
CostTerms tracking_control_cost(const RobotState& mean_state, const ControlInput& u,
                                const RobotState& desired_state, double dt);

CostTerms weighted(const CostTerms& raw, const CostWeights& w);

/// Next point of the constant-speed straight line from `position` to `goal`:
/// position advanced by speed*dt (clipped at the goal) with the matching
/// velocity.
RobotState desired_state(Vec2 position, Vec2 goal, double speed, double dt);

/// Mean of the first four coordinates of a sample set as a state.
RobotState mean_state(const SampleSet& samples);

}  // namespace pvo::cost
