#pragma once

#include <cstdint>
#include <span>

#include "pvo/noise.hpp"
#include "pvo/types.hpp"

namespace pvo::uncertainty {

/// Which rows of the input matrix act on the state. `velocity_only` zeroes
/// the position rows, i.e. position advances by v*dt alone.
enum class InputCoupling { full, velocity_only };

/// xi' = A xi + B (u + delta) for the planar double integrator with step dt.
RobotState step(const RobotState& xi, const ControlInput& u, double ax_noise, double ay_noise,
                double dt, InputCoupling coupling = InputCoupling::full);

/// Applies the motion model to every state sample with a fresh noise draw
/// per sample. Weights are carried through unchanged.
SampleSet propagate(const SampleSet& state_samples, const ControlInput& control,
                    const NoiseModel& noise, double dt, std::uint64_t seed);

/// Pairs the i-th state with the i-th control-noise draw into 6-d w samples
/// (x, vx, y, vy, dx, dy) with uniform weights.
SampleSet concat_w(const SampleSet& state_samples, const SampleSet& noise_samples);

inline constexpr std::size_t kWDim = 6;

/// View of one w sample.
struct WSample {
  RobotState state;
  double delta_x = 0.0;
  double delta_y = 0.0;

  static WSample from_span(std::span<const double> w) {
    return {RobotState::from_span(w), w[4], w[5]};
  }
};

}  // namespace pvo::uncertainty
