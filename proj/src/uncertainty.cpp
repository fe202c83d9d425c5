#include "pvo/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "pvo/errors.hpp"

namespace pvo {

bool RobotState::is_finite() const {
  return std::isfinite(x) && std::isfinite(vx) && std::isfinite(y) && std::isfinite(vy);
}

SampleSet::SampleSet(std::size_t dim, std::vector<double> data, std::vector<double> weights,
                     std::uint64_t seed)
    : dim_(dim), data_(std::move(data)), weights_(std::move(weights)), seed_(seed) {
  if (dim_ == 0 && !data_.empty()) throw ShapeError("SampleSet: zero dimension with data");
  if (dim_ != 0 && data_.size() != dim_ * weights_.size()) {
    std::ostringstream msg;
    msg << "SampleSet: " << data_.size() << " values do not form " << weights_.size()
        << " rows of dimension " << dim_;
    throw ShapeError(msg.str());
  }
}

SampleSet SampleSet::uniform(std::size_t dim, std::vector<double> data, std::uint64_t seed) {
  if (dim == 0 || data.size() % dim != 0) throw ShapeError("SampleSet::uniform: ragged data");
  const std::size_t n = data.size() / dim;
  std::vector<double> w(n, n ? 1.0 / static_cast<double>(n) : 0.0);
  return SampleSet(dim, std::move(data), std::move(w), seed);
}

void SampleSet::set_weights(std::vector<double> weights) {
  if (weights.size() != weights_.size()) throw ShapeError("SampleSet::set_weights: count mismatch");
  weights_ = std::move(weights);
}

SampleSet SampleSet::head(std::size_t count) const {
  if (count > size()) throw ShapeError("SampleSet::head: not enough samples");
  std::vector<double> data(data_.begin(), data_.begin() + static_cast<std::ptrdiff_t>(count * dim_));
  return uniform(dim_, std::move(data), seed_);
}

std::vector<double> SampleSet::mean() const {
  std::vector<double> m(dim_, 0.0);
  for (std::size_t i = 0; i < size(); ++i) {
    const auto row = (*this)[i];
    for (std::size_t d = 0; d < dim_; ++d) m[d] += weights_[i] * row[d];
  }
  return m;
}

double SampleSet::weight_sum() const { return std::accumulate(weights_.begin(), weights_.end(), 0.0); }

ConstraintSampleSet ConstraintSampleSet::uniform(std::vector<double> values) {
  const std::size_t n = values.size();
  ConstraintSampleSet out{std::move(values), {}};
  out.weights.assign(n, n ? 1.0 / static_cast<double>(n) : 0.0);
  return out;
}

double ConstraintSampleSet::weighted_mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) m += weights[i] * values[i];
  return m;
}

double ConstraintSampleSet::weighted_variance() const {
  const double m = weighted_mean();
  double v = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) v += weights[i] * (values[i] - m) * (values[i] - m);
  return std::max(v, 0.0);
}

double ConstraintSampleSet::max_value() const {
  double m = -INFINITY;
  for (double v : values) m = std::max(m, v);
  return m;
}

namespace uncertainty {

RobotState step(const RobotState& xi, const ControlInput& u, double ax_noise, double ay_noise,
                double dt, InputCoupling coupling) {
  const double ax = u.ax + ax_noise;
  const double ay = u.ay + ay_noise;
  const double half = coupling == InputCoupling::full ? 0.5 * dt * dt : 0.0;
  return {xi.x + dt * xi.vx + half * ax, xi.vx + dt * ax, xi.y + dt * xi.vy + half * ay,
          xi.vy + dt * ay};
}

SampleSet propagate(const SampleSet& state_samples, const ControlInput& control,
                    const NoiseModel& noise, double dt, std::uint64_t seed) {
  if (state_samples.dim() != RobotState::kDim) {
    std::ostringstream msg;
    msg << "propagate: expected 4-d state samples, got dimension " << state_samples.dim();
    throw ShapeError(msg.str());
  }
  if (noise.dim() != ControlInput::kDim) {
    std::ostringstream msg;
    msg << "propagate: expected 2-d control noise, got dimension " << noise.dim();
    throw ShapeError(msg.str());
  }
  if (!(dt > 0.0)) throw ShapeError("propagate: dt must be positive");

  Rng rng(seed);
  std::vector<double> out(state_samples.data().size());
  for (std::size_t i = 0; i < state_samples.size(); ++i) {
    const double dx = noise.draw(0, rng);
    const double dy = noise.draw(1, rng);
    const RobotState next = step(RobotState::from_span(state_samples[i]), control, dx, dy, dt);
    const auto a = next.to_array();
    std::copy(a.begin(), a.end(), out.begin() + static_cast<std::ptrdiff_t>(i * 4));
  }
  return SampleSet(4, std::move(out), state_samples.weights(), seed);
}

SampleSet concat_w(const SampleSet& state_samples, const SampleSet& noise_samples) {
  if (state_samples.size() != noise_samples.size()) {
    std::ostringstream msg;
    msg << "concat_w: " << state_samples.size() << " state samples vs " << noise_samples.size()
        << " noise samples";
    throw ShapeError(msg.str());
  }
  if (state_samples.dim() != 4 || noise_samples.dim() != 2) {
    throw ShapeError("concat_w: expected 4-d states and 2-d control noise");
  }
  std::vector<double> data;
  data.reserve(state_samples.size() * kWDim);
  for (std::size_t i = 0; i < state_samples.size(); ++i) {
    const auto s = state_samples[i];
    const auto d = noise_samples[i];
    data.insert(data.end(), s.begin(), s.end());
    data.insert(data.end(), d.begin(), d.end());
  }
  return SampleSet::uniform(kWDim, std::move(data), state_samples.seed());
}

}  // namespace uncertainty
}  // namespace pvo
