#pragma once

#include <cstdint>
#include <vector>

#include "pvo/types.hpp"

namespace pvo::gmm {

inline constexpr double kVarianceFloor = 1e-9;
inline constexpr double kDensityFloor = 1e-300;

/// One-dimensional Gaussian mixture.
struct GmmModel {
  std::vector<double> weights;
  std::vector<double> means;
  std::vector<double> variances;

  std::size_t components() const { return weights.size(); }
  double density(double x) const;
  double log_density(double x) const;
};

struct FitOptions {
  std::size_t components = 3;
  std::uint64_t seed = 0;
  int max_iter = 100;
  /// Convergence threshold on the change of the mean log-likelihood.
  double tol = 1e-3;
};

struct FitResult {
  GmmModel model;
  /// Mean weighted log-likelihood after initialisation and after every EM
  /// iteration.
  std::vector<double> log_likelihood;
  int iterations = 0;
  bool converged = false;
};

/// EM fit of a k-component mixture to weighted scalar samples. Initial means
/// come from a weighted 1-d k-means seeded at quantile-spaced points.
/// Negative sample weights are clipped to zero before fitting.
FitResult fit_gmm_traced(const ConstraintSampleSet& samples, const FitOptions& options);

GmmModel fit_gmm(const ConstraintSampleSet& samples, std::size_t k, std::uint64_t seed,
                 int max_iter = 100, double tol = 1e-3);

struct KlEstimate {
  double value = 0.0;
  double standard_error = 0.0;
  /// Some q-density evaluation underflowed and was floored.
  bool tail_warning = false;
};

/// Monte-Carlo estimate of KL(p || q) = E_p[log p - log q] with draws from p.
KlEstimate kl_divergence_estimate(const GmmModel& p, const GmmModel& q, std::size_t mc_samples,
                                  std::uint64_t seed);

double kl_divergence(const GmmModel& p, const GmmModel& q, std::size_t mc_samples,
                     std::uint64_t seed);

}  // namespace pvo::gmm
