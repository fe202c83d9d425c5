#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "pvo/types.hpp"

namespace pvo::uncertainty {

inline constexpr double kScaleFloor = 1e-9;

enum class ComponentKind { gaussian, uniform, triangular };

std::string_view to_string(ComponentKind kind);
ComponentKind component_kind_from_string(std::string_view name);

/// One mixture component. `loc` is the mean (gaussian), centre (uniform) or
/// mode (triangular); `scale` is the standard deviation or the half-width.
struct MixtureComponent {
  ComponentKind kind = ComponentKind::gaussian;
  double weight = 1.0;
  double loc = 0.0;
  double scale = 1.0;
};

/// Finite mixture for a single coordinate.
struct Mixture {
  std::vector<MixtureComponent> components;

  double mean() const;
  double variance() const;
};

/// Independent per-dimension mixtures. Validated on construction.
class NoiseModel {
 public:
  NoiseModel() = default;
  explicit NoiseModel(std::vector<Mixture> dims);

  /// Near-deterministic model: every dimension is a single gaussian at zero
  /// with the scale floor.
  static NoiseModel zero(std::size_t dim);
  static NoiseModel isotropic_gaussian(std::size_t dim, double sigma);

  std::size_t dim() const { return dims_.size(); }
  const std::vector<Mixture>& dims() const { return dims_; }

  std::vector<double> mean() const;

  template <class Rng>
  double draw(std::size_t d, Rng& rng) const;

  template <class Rng>
  void draw_into(std::span<double> out, Rng& rng) const {
    for (std::size_t d = 0; d < dims_.size(); ++d) out[d] = draw(d, rng);
  }

 private:
  std::vector<Mixture> dims_;
};

/// `count` i.i.d. draws with uniform weights; deterministic in `seed`.
SampleSet sample_noise(const NoiseModel& model, std::size_t count, std::uint64_t seed);

using Rng = std::mt19937_64;

/// Independent stream seed from a base seed and two labels (splitmix64).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index = 0);

template <class R>
double NoiseModel::draw(std::size_t d, R& rng) const {
  const auto& comps = dims_[d].components;
  std::size_t pick = 0;
  if (comps.size() > 1) {
    double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    double acc = 0.0;
    pick = comps.size() - 1;
    for (std::size_t k = 0; k < comps.size(); ++k) {
      acc += comps[k].weight;
      if (u < acc) {
        pick = k;
        break;
      }
    }
  }
  const MixtureComponent& c = comps[pick];
  switch (c.kind) {
    case ComponentKind::gaussian:
      return c.loc + c.scale * std::normal_distribution<double>(0.0, 1.0)(rng);
    case ComponentKind::uniform:
      return c.loc + c.scale * std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
    case ComponentKind::triangular: {
      // symmetric triangle on [loc - scale, loc + scale]: sum of two uniforms
      std::uniform_real_distribution<double> half(-0.5, 0.5);
      return c.loc + c.scale * (half(rng) + half(rng));
    }
  }
  return c.loc;
}

}  // namespace pvo::uncertainty
