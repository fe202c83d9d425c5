#include "pvo/vo.hpp"

#include <sstream>

#include "pvo/errors.hpp"

namespace pvo::vo {

namespace {

void check_shapes(std::size_t w_dim, std::size_t obs_dim) {
  if (w_dim != uncertainty::kWDim || obs_dim != RobotState::kDim) {
    std::ostringstream msg;
    msg << "VO evaluation expects 6-d w samples and 4-d obstacle samples, got " << w_dim << " and "
        << obs_dim;
    throw ShapeError(msg.str());
  }
}

}  // namespace

VoValue vo_value(Vec2 rel_pos, Vec2 rel_vel, const ObstacleGeometry& geom) {
  const double rr = geom.combined_radius();
  const double v2 = squared_norm(rel_vel);
  const double r2 = squared_norm(rel_pos);
  if (v2 <= kVelocityEpsilon * kVelocityEpsilon) return {-r2 + rr * rr, true};
  const double rv = dot(rel_pos, rel_vel);
  return {rv * rv / v2 - r2 + rr * rr, false};
}

VoValue vo_of_control(std::span<const double> w, std::span<const double> obs,
                      const ControlInput& u, const ObstacleGeometry& geom, double dt,
                      uncertainty::InputCoupling coupling) {
  check_shapes(w.size(), obs.size());
  const auto ws = uncertainty::WSample::from_span(w);
  const RobotState next = uncertainty::step(ws.state, u, ws.delta_x, ws.delta_y, dt, coupling);
  const RobotState o = RobotState::from_span(obs);
  return vo_value(next.position() - o.position(), next.velocity() - o.velocity(), geom);
}

VOCoefficients vo_coefficients(std::span<const double> w, std::span<const double> obs,
                               const ObstacleGeometry& geom, double dt) {
  check_shapes(w.size(), obs.size());
  const auto ws = uncertainty::WSample::from_span(w);
  const RobotState o = RobotState::from_span(obs);
  // position without any input contribution; velocity v = v0 + u dt
  const Vec2 r{ws.state.x + dt * ws.state.vx - o.x, ws.state.y + dt * ws.state.vy - o.y};
  const Vec2 v0{ws.state.vx + dt * ws.delta_x - o.vx, ws.state.vy + dt * ws.delta_y - o.vy};
  const double rr = geom.combined_radius();
  const double s = squared_norm(r) - rr * rr;
  const double a = dot(r, v0);
  const double dt2 = dt * dt;

  VOCoefficients h;
  h.h1 = dt2 * (r.x * r.x - s);
  h.h2 = 2.0 * dt2 * r.x * r.y;
  h.h3 = dt2 * (r.y * r.y - s);
  h.h4 = 2.0 * dt * (a * r.x - s * v0.x);
  h.h5 = 2.0 * dt * (a * r.y - s * v0.y);
  h.h6 = a * a - s * squared_norm(v0);
  return h;
}

ConstraintSampleSet pvo_samples(const SampleSet& w_set, const SampleSet& obs_set,
                                const ControlInput& u, const ObstacleGeometry& geom, double dt) {
  check_shapes(w_set.dim(), obs_set.dim());
  if (w_set.empty() || obs_set.empty()) throw ShapeError("pvo_samples: empty sample set");

  ConstraintSampleSet out;
  const std::size_t np = w_set.size();
  const std::size_t nq = obs_set.size();
  out.values.resize(np * nq);
  out.weights.resize(np * nq);

  const double rr2 = geom.combined_radius() * geom.combined_radius();
  const double half_dt2 = 0.5 * dt * dt;
  for (std::size_t p = 0; p < np; ++p) {
    const auto w = w_set[p];
    const double ax = u.ax + w[4];
    const double ay = u.ay + w[5];
    const double px = w[0] + dt * w[1] + half_dt2 * ax;
    const double vx = w[1] + dt * ax;
    const double py = w[2] + dt * w[3] + half_dt2 * ay;
    const double vy = w[3] + dt * ay;
    const double alpha = w_set.weight(p);
    for (std::size_t q = 0; q < nq; ++q) {
      const auto o = obs_set[q];
      const double rx = px - o[0];
      const double ry = py - o[2];
      const double wx = vx - o[1];
      const double wy = vy - o[3];
      const double v2 = wx * wx + wy * wy;
      const double r2 = rx * rx + ry * ry;
      double f;
      if (v2 <= kVelocityEpsilon * kVelocityEpsilon) {
        f = -r2 + rr2;
      } else {
        const double rv = rx * wx + ry * wy;
        f = rv * rv / v2 - r2 + rr2;
      }
      out.values[p * nq + q] = f;
      out.weights[p * nq + q] = alpha * obs_set.weight(q);
    }
  }
  return out;
}

}  // namespace pvo::vo
