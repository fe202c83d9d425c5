#pragma once

#include <span>

#include "pvo/types.hpp"
#include "pvo/uncertainty.hpp"

namespace pvo::vo {

inline constexpr double kVelocityEpsilon = 1e-9;

struct ObstacleGeometry {
  double robot_radius = 0.5;
  double obstacle_radius = 0.5;

  double combined_radius() const { return robot_radius + obstacle_radius; }
};

struct VoValue {
  double value = 0.0;
  /// Relative speed at or below kVelocityEpsilon; `value` is the static
  /// overlap limit -|r|^2 + (R + R_o)^2.
  bool degenerate_velocity = false;
};

/// Velocity-obstacle constraint for disks: (r.v)^2/|v|^2 - |r|^2 + (R+R_o)^2.
/// Nonpositive means the relative course does not intersect the obstacle.
VoValue vo_value(Vec2 rel_pos, Vec2 rel_vel, const ObstacleGeometry& geom);

/// Propagates the robot part of `w` (x, vx, y, vy, dx, dy) one step under `u`
/// with its own control perturbation, then evaluates the VO against `obs`
/// (x, vx, y, vy) at the same time.
VoValue vo_of_control(std::span<const double> w, std::span<const double> obs,
                      const ControlInput& u, const ObstacleGeometry& geom, double dt,
                      uncertainty::InputCoupling coupling = uncertainty::InputCoupling::full);

/// Coefficients of f * |v|^2 as a quadratic in (ux, uy):
/// h1 ux^2 + h2 ux uy + h3 uy^2 + h4 ux + h5 uy + h6.
/// Exact when relative position is taken as control independent
/// (InputCoupling::velocity_only).
struct VOCoefficients {
  double h1 = 0.0, h2 = 0.0, h3 = 0.0, h4 = 0.0, h5 = 0.0, h6 = 0.0;

  double evaluate(const ControlInput& u) const {
    return h1 * u.ax * u.ax + h2 * u.ax * u.ay + h3 * u.ay * u.ay + h4 * u.ax + h5 * u.ay + h6;
  }
};

VOCoefficients vo_coefficients(std::span<const double> w, std::span<const double> obs,
                               const ObstacleGeometry& geom, double dt);

/// Every cross pair f(w_p, obs_q, u) with weight alpha_p * beta_q, flattened
/// row-major in p.
ConstraintSampleSet pvo_samples(const SampleSet& w_set, const SampleSet& obs_set,
                                const ControlInput& u, const ObstacleGeometry& geom, double dt);

}  // namespace pvo::vo
