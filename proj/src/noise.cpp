#include "pvo/noise.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pvo/errors.hpp"

namespace pvo::uncertainty {

std::string_view to_string(ComponentKind kind) {
  switch (kind) {
    case ComponentKind::gaussian:
      return "gaussian";
    case ComponentKind::uniform:
      return "uniform";
    case ComponentKind::triangular:
      return "triangular";
  }
  return "gaussian";
}

ComponentKind component_kind_from_string(std::string_view name) {
  if (name == "gaussian" || name == "normal") return ComponentKind::gaussian;
  if (name == "uniform") return ComponentKind::uniform;
  if (name == "triangular") return ComponentKind::triangular;
  throw ConfigError("unknown mixture component kind '" + std::string(name) +
                    "' (expected gaussian, uniform or triangular)");
}

namespace {

double component_variance(const MixtureComponent& c) {
  switch (c.kind) {
    case ComponentKind::gaussian:
      return c.scale * c.scale;
    case ComponentKind::uniform:
      return c.scale * c.scale / 3.0;
    case ComponentKind::triangular:
      return c.scale * c.scale / 6.0;
  }
  return 0.0;
}

}  // namespace

double Mixture::mean() const {
  double m = 0.0;
  for (const auto& c : components) m += c.weight * c.loc;
  return m;
}

double Mixture::variance() const {
  const double m = mean();
  double second = 0.0;
  for (const auto& c : components) second += c.weight * (component_variance(c) + c.loc * c.loc);
  return second - m * m;
}

NoiseModel::NoiseModel(std::vector<Mixture> dims) : dims_(std::move(dims)) {
  for (std::size_t d = 0; d < dims_.size(); ++d) {
    auto& comps = dims_[d].components;
    if (comps.empty()) {
      std::ostringstream msg;
      msg << "noise dimension " << d << " has no mixture components";
      throw ConfigError(msg.str());
    }
    double total = 0.0;
    for (std::size_t k = 0; k < comps.size(); ++k) {
      auto& c = comps[k];
      if (!std::isfinite(c.weight) || c.weight < 0.0) {
        std::ostringstream msg;
        msg << "noise dimension " << d << " component " << k << ": weight must be a nonnegative number";
        throw ConfigError(msg.str());
      }
      if (!std::isfinite(c.loc) || !std::isfinite(c.scale) || c.scale < 0.0) {
        std::ostringstream msg;
        msg << "noise dimension " << d << " component " << k
            << ": loc must be finite and scale a nonnegative number";
        throw ConfigError(msg.str());
      }
      c.scale = std::max(c.scale, kScaleFloor);
      total += c.weight;
    }
    if (std::abs(total - 1.0) > 1e-12) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "noise dimension " << d << ": mixture weights sum to " << total << ", expected 1";
      throw ConfigError(msg.str());
    }
  }
}

NoiseModel NoiseModel::zero(std::size_t dim) { return isotropic_gaussian(dim, 0.0); }

NoiseModel NoiseModel::isotropic_gaussian(std::size_t dim, double sigma) {
  std::vector<Mixture> dims(dim, Mixture{{MixtureComponent{ComponentKind::gaussian, 1.0, 0.0, sigma}}});
  return NoiseModel(std::move(dims));
}

std::vector<double> NoiseModel::mean() const {
  std::vector<double> m;
  m.reserve(dims_.size());
  for (const auto& mix : dims_) m.push_back(mix.mean());
  return m;
}

SampleSet sample_noise(const NoiseModel& model, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw ConfigError("sample_noise: count must be at least 1");
  if (model.dim() == 0) throw ConfigError("sample_noise: noise model has no dimensions");
  Rng rng(seed);
  std::vector<double> data(count * model.dim());
  for (std::size_t i = 0; i < count; ++i) {
    model.draw_into(std::span<double>(data.data() + i * model.dim(), model.dim()), rng);
  }
  return SampleSet::uniform(model.dim(), std::move(data), seed);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(base) ^ (stream * 0x632be59bd9b4e019ULL)) ^ index);
}

}  // namespace pvo::uncertainty
