#include "pvo/cost.hpp"

#include <algorithm>
#include <cmath>

#include "pvo/errors.hpp"
#include "pvo/uncertainty.hpp"

namespace pvo::cost {

RobotState mean_state(const SampleSet& samples) {
  if (samples.empty()) throw ShapeError("mean_state: empty sample set");
  if (samples.dim() < RobotState::kDim) throw ShapeError("mean_state: samples have fewer than 4 dims");
  const std::vector<double> m = samples.mean();
  return RobotState::from_span(m);
}

CostTerms tracking_control_cost(const RobotState& mean, const ControlInput& u,
                                const RobotState& desired, double dt) {
  const RobotState next = uncertainty::step(mean, u, 0.0, 0.0, dt);
  const double ex = next.x - desired.x;
  const double evx = next.vx - desired.vx;
  const double ey = next.y - desired.y;
  const double evy = next.vy - desired.vy;
  return {ex * ex + evx * evx + ey * ey + evy * evy, u.squared_norm()};
}

CostTerms tracking_control_cost(const SampleSet& samples, const ControlInput& u,
                                const RobotState& desired, double dt) {
  return tracking_control_cost(mean_state(samples), u, desired, dt);
}

CostTerms weighted(const CostTerms& raw, const CostWeights& w) {
  return {w.tracking * raw.tracking, w.control * raw.control};
}

RobotState desired_state(Vec2 position, Vec2 goal, double speed, double dt) {
  const Vec2 to_goal = goal - position;
  const double dist = std::sqrt(squared_norm(to_goal));
  if (dist <= 0.0 || dt <= 0.0) return {position.x, 0.0, position.y, 0.0};
  const double advance = std::min(speed * dt, dist);
  const Vec2 dir = (1.0 / dist) * to_goal;
  const double v = advance / dt;
  return {position.x + advance * dir.x, v * dir.x, position.y + advance * dir.y, v * dir.y};
}

}  // namespace pvo::cost
