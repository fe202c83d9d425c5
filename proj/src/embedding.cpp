#include "pvo/embedding.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "pvo/errors.hpp"
#include "pvo/noise.hpp"

namespace pvo::embedding {

namespace {

void check_degree(const KernelSpec& spec) {
  if (spec.degree < 1) throw ConfigError("kernel degree must be at least 1");
}

double ipow(double t, int d) {
  double r = 1.0;
  for (int k = 0; k < d; ++k) r *= t;
  return r;
}

template <int D>
inline double kpow(double t) {
  if constexpr (D == 1) return t;
  if constexpr (D == 2) return t * t;
  if constexpr (D == 3) return t * t * t;
  if constexpr (D == 4) {
    const double s = t * t;
    return s * s;
  }
  return ipow(t, D);
}

// sum_j c[j] * (1 + x * y[j])^D
template <int D>
double row_sum(double x, const double* y, const double* c, std::size_t n) {
  double acc = 0.0;
#pragma omp simd reduction(+ : acc)
  for (std::size_t j = 0; j < n; ++j) acc += c[j] * kpow<D>(1.0 + x * y[j]);
  return acc;
}

double row_sum_any(double x, const double* y, const double* c, std::size_t n, int d) {
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) acc += c[j] * ipow(1.0 + x * y[j], d);
  return acc;
}

template <class RowFn>
double dispatch(int degree, RowFn&& fn) {
  switch (degree) {
    case 1:
      return fn(std::integral_constant<int, 1>{});
    case 2:
      return fn(std::integral_constant<int, 2>{});
    case 3:
      return fn(std::integral_constant<int, 3>{});
    case 4:
      return fn(std::integral_constant<int, 4>{});
    default:
      return fn(std::integral_constant<int, 0>{});
  }
}

// Canonical argument order for cross terms so that mmd(a, b) == mmd(b, a).
bool canonical_less(const ConstraintSampleSet& a, const ConstraintSampleSet& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  if (a.values != b.values) return a.values < b.values;
  return a.weights < b.weights;
}

double dot_kernel(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

double poly_kernel(std::span<const double> x1, std::span<const double> x2, const KernelSpec& spec) {
  check_degree(spec);
  if (x1.size() != x2.size()) {
    std::ostringstream msg;
    msg << "poly_kernel: dimension mismatch " << x1.size() << " vs " << x2.size();
    throw ShapeError(msg.str());
  }
  return ipow(1.0 + dot_kernel(x1, x2), spec.degree);
}

double poly_kernel(double x1, double x2, const KernelSpec& spec) {
  check_degree(spec);
  return ipow(1.0 + x1 * x2, spec.degree);
}

double gram_form(std::span<const double> xa, std::span<const double> ca,
                 std::span<const double> xb, std::span<const double> cb, const KernelSpec& spec) {
  check_degree(spec);
  if (xa.size() != ca.size() || xb.size() != cb.size()) {
    throw ShapeError("gram_form: values and weights differ in length");
  }
  return dispatch(spec.degree, [&](auto tag) {
    constexpr int D = decltype(tag)::value;
    double total = 0.0;
    for (std::size_t i = 0; i < xa.size(); ++i) {
      const double row = D == 0 ? row_sum_any(xa[i], xb.data(), cb.data(), xb.size(), spec.degree)
                                : row_sum<D>(xa[i], xb.data(), cb.data(), xb.size());
      total += ca[i] * row;
    }
    return total;
  });
}

double gram_self_form(std::span<const double> x, std::span<const double> c, const KernelSpec& spec) {
  check_degree(spec);
  if (x.size() != c.size()) throw ShapeError("gram_self_form: values and weights differ in length");
  return dispatch(spec.degree, [&](auto tag) {
    constexpr int D = decltype(tag)::value;
    double diag = 0.0;
    double off = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double kii = D == 0 ? ipow(1.0 + x[i] * x[i], spec.degree) : kpow<D>(1.0 + x[i] * x[i]);
      diag += c[i] * c[i] * kii;
      const std::size_t rest = x.size() - i - 1;
      if (rest == 0) continue;
      const double row = D == 0 ? row_sum_any(x[i], x.data() + i + 1, c.data() + i + 1, rest, spec.degree)
                                : row_sum<D>(x[i], x.data() + i + 1, c.data() + i + 1, rest);
      off += c[i] * row;
    }
    return diag + 2.0 * off;
  });
}

ScalarEmbedding::ScalarEmbedding(const ConstraintSampleSet& samples, const KernelSpec& spec)
    : samples_(samples), spec_(spec) {
  if (samples_.values.size() != samples_.weights.size()) {
    throw ShapeError("ScalarEmbedding: values and weights differ in length");
  }
  self_ = gram_self_form(samples_.values, samples_.weights, spec_);
}

double ScalarEmbedding::distance_squared(const ScalarEmbedding& other) const {
  if (other.spec_.degree != spec_.degree) throw ConfigError("embeddings use different kernels");
  const bool forward = !canonical_less(other.samples_, samples_);
  const auto& first = forward ? samples_ : other.samples_;
  const auto& second = forward ? other.samples_ : samples_;
  const double cross = gram_form(first.values, first.weights, second.values, second.weights, spec_);
  const double d2 = (self_ + other.self_) - 2.0 * cross;
  // exact arithmetic gives d2 >= 0; negative values are round-off
  return d2 < 0.0 ? 0.0 : d2;
}

double mmd_squared(const ConstraintSampleSet& a, const ConstraintSampleSet& b,
                   const KernelSpec& spec) {
  if (a.empty() || b.empty()) throw ShapeError("mmd_squared: empty sample set");
  return ScalarEmbedding(a, spec).distance_squared(ScalarEmbedding(b, spec));
}

namespace {

Eigen::MatrixXd gram(const SampleSet& a, const SampleSet& b, const KernelSpec& spec) {
  Eigen::MatrixXd k(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          ipow(1.0 + dot_kernel(a[i], b[j]), spec.degree);
    }
  }
  return k;
}

}  // namespace

double reduced_set_objective(const SampleSet& full, const SampleSet& reduced,
                             std::span<const double> weights, const KernelSpec& spec) {
  check_degree(spec);
  if (full.dim() != reduced.dim()) throw ShapeError("reduced_set_objective: dimension mismatch");
  if (weights.size() != reduced.size()) throw ShapeError("reduced_set_objective: weight count mismatch");
  const Eigen::MatrixXd k_full = gram(full, full, spec);
  const Eigen::MatrixXd k_cross = gram(full, reduced, spec);
  const Eigen::MatrixXd k_red = gram(reduced, reduced, spec);
  const double inv_n = 1.0 / static_cast<double>(full.size());
  const Eigen::Map<const Eigen::VectorXd> alpha(weights.data(), static_cast<Eigen::Index>(weights.size()));
  const double t_full = inv_n * inv_n * k_full.sum();
  const double t_cross = inv_n * (k_cross.colwise().sum() * alpha)(0);
  const double t_red = alpha.dot(k_red * alpha);
  return t_full - 2.0 * t_cross + t_red;
}

EmbeddingWeights reduced_set_weights(const SampleSet& full, const SampleSet& reduced,
                                     const KernelSpec& spec) {
  check_degree(spec);
  if (reduced.empty()) throw ShapeError("reduced_set_weights: reduced set is empty");
  if (reduced.size() > full.size()) throw ShapeError("reduced_set_weights: reduced set larger than full set");
  if (full.dim() != reduced.dim()) throw ShapeError("reduced_set_weights: dimension mismatch");

  const auto n = static_cast<Eigen::Index>(reduced.size());
  const double inv_n = 1.0 / static_cast<double>(n);
  if (n == 1) return {{1.0}};

  const Eigen::MatrixXd k_red = gram(reduced, reduced, spec);
  const Eigen::MatrixXd k_cross = gram(full, reduced, spec);
  if (!k_red.allFinite() || !k_cross.allFinite()) {
    throw NumericalError("reduced_set_weights: non-finite kernel values");
  }
  const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(n, inv_n);
  // b_p = (1/N) sum_i k(full_i, reduced_p), evaluated with the same product
  // as K_nn * uniform so identical sets cancel exactly
  const Eigen::MatrixXd k_cross_t = k_cross.transpose();
  const Eigen::VectorXd b =
      k_cross_t * Eigen::VectorXd::Constant(static_cast<Eigen::Index>(full.size()),
                                            1.0 / static_cast<double>(full.size()));

  // Orthonormal basis of {v : sum(v) = 0} from the QR factor of the ones vector.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(Eigen::MatrixXd::Ones(n, 1));
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd basis = q.rightCols(n - 1);

  const Eigen::MatrixXd projected = basis.transpose() * k_red * basis;
  const Eigen::VectorXd rhs = basis.transpose() * (b - k_red * uniform);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(projected);
  if (eig.info() != Eigen::Success) throw NumericalError("reduced_set_weights: eigen-decomposition failed");
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const double lambda_max = lambda.cwiseAbs().maxCoeff();
  const double ridge = 1e-8 * lambda_max;

  Eigen::VectorXd y = Eigen::VectorXd::Zero(n - 1);
  if (lambda_max > 0.0) {
    const Eigen::VectorXd coeff = eig.eigenvectors().transpose() * rhs;
    for (Eigen::Index i = 0; i < n - 1; ++i) {
      if (lambda(i) > ridge) y += eig.eigenvectors().col(i) * (coeff(i) / (lambda(i) + ridge));
    }
  }
  const Eigen::VectorXd alpha = uniform + basis * y;
  if (!alpha.allFinite()) throw NumericalError("reduced_set_weights: singular system");

  EmbeddingWeights out;
  out.weights.assign(alpha.data(), alpha.data() + n);
  return out;
}

namespace {

void check_consistency_sizes(const SampleSet& w_set, const SampleSet& obs_set, std::size_t small_n,
                             std::size_t large_l) {
  if (small_n == 0 || small_n > large_l) throw ShapeError("consistency_error: need 1 <= n <= l");
  if (w_set.size() < large_l || obs_set.size() < large_l) {
    throw ShapeError("consistency_error: sample sets smaller than l");
  }
}

ConstraintSampleSet scaled(ConstraintSampleSet s, double f_scale) {
  for (double& v : s.values) v /= f_scale;
  return s;
}

}  // namespace

ScalarEmbedding consistency_truth(const SampleSet& w_set, const SampleSet& obs_set, const ControlInput& u,
                                  std::size_t large_l, const KernelSpec& spec, const vo::ObstacleGeometry& geom,
                                  double dt, double f_scale) {
  check_consistency_sizes(w_set, obs_set, large_l, large_l);
  return ScalarEmbedding(scaled(vo::pvo_samples(w_set.head(large_l), obs_set.head(large_l), u, geom, dt), f_scale),
                         spec);
}

double consistency_error(const ScalarEmbedding& truth, const SampleSet& w_set, const SampleSet& obs_set,
                         const ControlInput& u, std::size_t small_n, std::size_t large_l,
                         const vo::ObstacleGeometry& geom, double dt, std::uint64_t seed, double f_scale) {
  check_consistency_sizes(w_set, obs_set, small_n, large_l);
  auto pick = [&](const SampleSet& set, std::uint64_t stream) {
    std::vector<std::size_t> idx(large_l);
    std::iota(idx.begin(), idx.end(), 0);
    if (small_n < large_l) {
      uncertainty::Rng rng(uncertainty::derive_seed(seed, stream));
      std::shuffle(idx.begin(), idx.end(), rng);
      idx.resize(small_n);
      std::sort(idx.begin(), idx.end());
    }
    std::vector<double> data;
    data.reserve(small_n * set.dim());
    for (std::size_t i : idx) data.insert(data.end(), set[i].begin(), set[i].end());
    return SampleSet::uniform(set.dim(), std::move(data), seed);
  };
  const ScalarEmbedding approx(scaled(vo::pvo_samples(pick(w_set, 1), pick(obs_set, 2), u, geom, dt), f_scale),
                               truth.kernel());
  return approx.distance_squared(truth);
}

double consistency_error(const SampleSet& w_set, const SampleSet& obs_set, const ControlInput& u,
                         std::size_t small_n, std::size_t large_l, const KernelSpec& spec,
                         const vo::ObstacleGeometry& geom, double dt, std::uint64_t seed, double f_scale) {
  check_consistency_sizes(w_set, obs_set, small_n, large_l);
  const ScalarEmbedding truth = consistency_truth(w_set, obs_set, u, large_l, spec, geom, dt, f_scale);
  return consistency_error(truth, w_set, obs_set, u, small_n, large_l, geom, dt, seed, f_scale);
}

}  // namespace pvo::embedding
