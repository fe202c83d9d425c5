#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace pvo {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double squared_norm(Vec2 a) { return dot(a, a); }

/// Planar double-integrator state, laid out as (x, vx, y, vy).
struct RobotState {
  double x = 0.0;
  double vx = 0.0;
  double y = 0.0;
  double vy = 0.0;

  static constexpr std::size_t kDim = 4;

  static RobotState from_span(std::span<const double> v) {
    return {v[0], v[1], v[2], v[3]};
  }
  std::array<double, 4> to_array() const { return {x, vx, y, vy}; }
  Vec2 position() const { return {x, y}; }
  Vec2 velocity() const { return {vx, vy}; }
  bool is_finite() const;

  friend bool operator==(const RobotState&, const RobotState&) = default;
};

/// Acceleration command (ax, ay) in m/s^2.
struct ControlInput {
  double ax = 0.0;
  double ay = 0.0;

  static constexpr std::size_t kDim = 2;

  double squared_norm() const { return ax * ax + ay * ay; }
  friend bool operator==(const ControlInput&, const ControlInput&) = default;
};

/// Weighted collection of equally sized vectors standing in for an unknown
/// distribution. Rows are stored contiguously.
class SampleSet {
 public:
  SampleSet() = default;
  SampleSet(std::size_t dim, std::vector<double> data, std::vector<double> weights,
            std::uint64_t seed = 0);

  /// Uniform weights 1/count.
  static SampleSet uniform(std::size_t dim, std::vector<double> data, std::uint64_t seed = 0);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return weights_.size(); }
  bool empty() const { return weights_.empty(); }
  std::uint64_t seed() const { return seed_; }

  std::span<const double> operator[](std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }
  std::span<double> mutable_row(std::size_t i) { return {data_.data() + i * dim_, dim_}; }

  const std::vector<double>& data() const { return data_; }
  const std::vector<double>& weights() const { return weights_; }
  double weight(std::size_t i) const { return weights_[i]; }

  void set_weights(std::vector<double> weights);

  /// First `count` rows, weights renormalised to uniform.
  SampleSet head(std::size_t count) const;

  /// Weighted mean of every coordinate.
  std::vector<double> mean() const;

  double weight_sum() const;

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
  std::vector<double> weights_;
  std::uint64_t seed_ = 0;
};

/// Scalar samples of a constraint function with their weights.
struct ConstraintSampleSet {
  std::vector<double> values;
  std::vector<double> weights;

  std::size_t size() const { return values.size(); }
  bool empty() const { return values.empty(); }

  static ConstraintSampleSet uniform(std::vector<double> values);
  double weighted_mean() const;
  double weighted_variance() const;
  double max_value() const;
};

}  // namespace pvo
