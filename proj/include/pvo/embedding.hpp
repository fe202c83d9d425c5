#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pvo/types.hpp"
#include "pvo/vo.hpp"

namespace pvo::embedding {

/// Polynomial kernel (1 + x1.x2)^d.
struct KernelSpec {
  int degree = 2;
};

double poly_kernel(std::span<const double> x1, std::span<const double> x2, const KernelSpec& spec);
double poly_kernel(double x1, double x2, const KernelSpec& spec);

/// Reduced-set weights; they sum to one and may be negative.
struct EmbeddingWeights {
  std::vector<double> weights;
};

/// Re-weights `reduced` so its kernel mean approximates the uniform kernel
/// mean of `full`, subject to sum(alpha) = 1.
///
/// The problem is solved in the affine parametrisation
/// alpha = 1/n + P y (P an orthonormal basis of sum-zero vectors), so the
/// uniform weighting is always a candidate and the returned objective never
/// exceeds it. The projected Gram matrix is regularised with a ridge of
/// 1e-8 relative to its largest eigenvalue; eigen-directions below that
/// threshold are dropped, which keeps the minimum-norm solution when the
/// Gram matrix is rank deficient.
EmbeddingWeights reduced_set_weights(const SampleSet& full, const SampleSet& reduced,
                                     const KernelSpec& spec);

/// Squared RKHS distance between the uniform kernel mean of `full` and the
/// weighted kernel mean of `reduced`, evaluated from Gram matrices.
double reduced_set_objective(const SampleSet& full, const SampleSet& reduced,
                             std::span<const double> weights, const KernelSpec& spec);

/// Weighted quadratic form c_a K_ab c_b^T for scalar samples.
double gram_form(std::span<const double> xa, std::span<const double> ca,
                 std::span<const double> xb, std::span<const double> cb, const KernelSpec& spec);

/// c K c^T for one scalar set, using the symmetry of K.
double gram_self_form(std::span<const double> x, std::span<const double> c, const KernelSpec& spec);

/// Kernel mean of a scalar set with its cached self inner product, so a
/// fixed target can be compared against many candidates.
class ScalarEmbedding {
 public:
  ScalarEmbedding(const ConstraintSampleSet& samples, const KernelSpec& spec);

  const ConstraintSampleSet& samples() const { return samples_; }
  const KernelSpec& kernel() const { return spec_; }
  double self_inner() const { return self_; }

  /// ||mu_this - mu_other||^2.
  double distance_squared(const ScalarEmbedding& other) const;

 private:
  ConstraintSampleSet samples_;
  KernelSpec spec_;
  double self_ = 0.0;
};

/// ||mu_a - mu_b||^2 = C_a K_aa C_a^T - 2 C_a K_ab C_b^T + C_b K_bb C_b^T,
/// clamped at zero. Symmetric in its arguments bit for bit.
double mmd_squared(const ConstraintSampleSet& a, const ConstraintSampleSet& b,
                   const KernelSpec& spec);

/// Squared distance between the uniform embedding of f over `small_n`
/// randomly chosen samples of each set and the embedding over the first
/// `large_l` samples of each set, for a fixed control.
double consistency_error(const SampleSet& w_set, const SampleSet& obs_set, const ControlInput& u,
                         std::size_t small_n, std::size_t large_l, const KernelSpec& spec,
                         const vo::ObstacleGeometry& geom, double dt, std::uint64_t seed,
                         double f_scale = 1.0);

/// Embedding of f over the first `large_l` samples of each set, the ground
/// truth of consistency_error.
ScalarEmbedding consistency_truth(const SampleSet& w_set, const SampleSet& obs_set, const ControlInput& u,
                                  std::size_t large_l, const KernelSpec& spec, const vo::ObstacleGeometry& geom,
                                  double dt, double f_scale = 1.0);

/// consistency_error against a precomputed ground truth.
double consistency_error(const ScalarEmbedding& truth, const SampleSet& w_set, const SampleSet& obs_set,
                         const ControlInput& u, std::size_t small_n, std::size_t large_l,
                         const vo::ObstacleGeometry& geom, double dt, std::uint64_t seed, double f_scale = 1.0);

}  // namespace pvo::embedding
