#include "pvo/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "pvo/errors.hpp"

namespace pvo::gmm {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

double log_normal(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * (kLogTwoPi + std::log(var) + d * d / var);
}

double log_sum_exp(const double* v, std::size_t n) {
  double m = -INFINITY;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, v[i]);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::exp(v[i] - m);
  return m + std::log(s);
}

struct Weighted {
  std::vector<double> x;
  std::vector<double> w;  // nonnegative, sums to one
};

Weighted prepare(const ConstraintSampleSet& samples) {
  Weighted out;
  out.x = samples.values;
  out.w.resize(samples.weights.size());
  double total = 0.0;
  for (std::size_t i = 0; i < samples.weights.size(); ++i) {
    out.w[i] = std::max(samples.weights[i], 0.0);
    total += out.w[i];
  }
  if (!(total > 0.0)) {
    std::fill(out.w.begin(), out.w.end(), 1.0 / static_cast<double>(out.w.size()));
  } else {
    for (double& w : out.w) w /= total;
  }
  return out;
}

// Weighted quantiles at (j + 0.5) / k, refined by Lloyd iterations.
GmmModel kmeans_init(const Weighted& data, std::size_t k, std::uint64_t seed) {
  const std::size_t n = data.x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return data.x[a] < data.x[b]; });

  std::vector<double> centres(k);
  {
    double acc = 0.0;
    std::size_t pos = 0;
    for (std::size_t j = 0; j < k; ++j) {
      const double target = (static_cast<double>(j) + 0.5) / static_cast<double>(k);
      while (pos + 1 < n && acc + data.w[order[pos]] < target) acc += data.w[order[pos++]];
      centres[j] = data.x[order[pos]];
    }
  }
  // coincident seeds (heavily duplicated data) get a small seeded spread
  std::mt19937_64 rng(seed);
  const double span = data.x[order.back()] - data.x[order.front()];
  for (std::size_t j = 1; j < k; ++j) {
    if (centres[j] <= centres[j - 1]) {
      const double jitter = std::max(span, 1.0) * 1e-6 *
                            (1.0 + std::uniform_real_distribution<double>(0.0, 1.0)(rng));
      centres[j] = centres[j - 1] + jitter;
    }
  }

  std::vector<std::size_t> label(n, 0);
  for (int iter = 0; iter < 20; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = std::abs(data.x[i] - centres[0]);
      for (std::size_t j = 1; j < k; ++j) {
        const double d = std::abs(data.x[i] - centres[j]);
        if (d < best_d) {
          best_d = d;
          best = j;
        }
      }
      if (label[i] != best || iter == 0) changed = changed || label[i] != best;
      label[i] = best;
    }
    std::vector<double> mass(k, 0.0), sum(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      mass[label[i]] += data.w[i];
      sum[label[i]] += data.w[i] * data.x[i];
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (mass[j] > 0.0) centres[j] = sum[j] / mass[j];
    }
    if (!changed && iter > 0) break;
  }

  GmmModel model;
  model.weights.assign(k, 0.0);
  model.means = centres;
  model.variances.assign(k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = label[i];
    model.weights[j] += data.w[i];
    const double d = data.x[i] - centres[j];
    model.variances[j] += data.w[i] * d * d;
  }
  double global_mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) global_mean += data.w[i] * data.x[i];
  double global_var = 0.0;
  for (std::size_t i = 0; i < n; ++i) global_var += data.w[i] * (data.x[i] - global_mean) * (data.x[i] - global_mean);

  for (std::size_t j = 0; j < k; ++j) {
    if (model.weights[j] > 0.0) {
      model.variances[j] = std::max(model.variances[j] / model.weights[j], kVarianceFloor);
    } else {
      model.variances[j] = std::max(global_var, kVarianceFloor);
    }
  }
  // empty clusters keep a small share so EM can still move them
  double total = 0.0;
  for (double& w : model.weights) {
    w = std::max(w, 1e-6);
    total += w;
  }
  for (double& w : model.weights) w /= total;
  return model;
}

}  // namespace

double GmmModel::log_density(double x) const {
  double terms[64];
  std::vector<double> heap;
  double* t = terms;
  if (weights.size() > 64) {
    heap.resize(weights.size());
    t = heap.data();
  }
  for (std::size_t j = 0; j < weights.size(); ++j) {
    t[j] = weights[j] > 0.0 ? std::log(weights[j]) + log_normal(x, means[j], variances[j]) : -INFINITY;
  }
  return log_sum_exp(t, weights.size());
}

double GmmModel::density(double x) const { return std::exp(log_density(x)); }

FitResult fit_gmm_traced(const ConstraintSampleSet& samples, const FitOptions& options) {
  const std::size_t k = options.components;
  if (k == 0) throw ConfigError("fit_gmm: component count must be at least 1");
  if (samples.values.size() != samples.weights.size()) throw ShapeError("fit_gmm: values/weights mismatch");
  if (samples.size() < k) throw ShapeError("fit_gmm: fewer samples than components");

  const Weighted data = prepare(samples);
  const std::size_t n = data.x.size();

  FitResult result;
  result.model = kmeans_init(data, k, options.seed);
  GmmModel& m = result.model;

  std::vector<double> resp(n * k);
  std::vector<double> log_terms(k);

  // E-step; returns the mean weighted log-likelihood of the current model.
  auto expectation = [&]() {
    std::vector<double> log_w(k), log_var(k), inv_var(k);
    for (std::size_t j = 0; j < k; ++j) {
      log_w[j] = m.weights[j] > 0.0 ? std::log(m.weights[j]) : -INFINITY;
      log_var[j] = std::log(m.variances[j]);
      inv_var[j] = 1.0 / m.variances[j];
    }
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double top = -INFINITY;
      for (std::size_t j = 0; j < k; ++j) {
        const double d = data.x[i] - m.means[j];
        log_terms[j] = log_w[j] - 0.5 * (kLogTwoPi + log_var[j] + d * d * inv_var[j]);
        top = std::max(top, log_terms[j]);
      }
      double* r = resp.data() + i * k;
      double sum = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        r[j] = std::exp(log_terms[j] - top);
        sum += r[j];
      }
      const double inv = 1.0 / sum;
      for (std::size_t j = 0; j < k; ++j) r[j] *= inv;
      ll += data.w[i] * (top + std::log(sum));
    }
    return ll;
  };

  double ll = expectation();
  result.log_likelihood.push_back(ll);
  for (int iter = 0; iter < options.max_iter; ++iter) {
    // M-step
    for (std::size_t j = 0; j < k; ++j) {
      double mass = 0.0, sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double r = data.w[i] * resp[i * k + j];
        mass += r;
        sum += r * data.x[i];
      }
      if (mass <= 1e-300) {
        m.weights[j] = 0.0;
        continue;
      }
      const double mean = sum / mass;
      double var = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = data.x[i] - mean;
        var += data.w[i] * resp[i * k + j] * d * d;
      }
      m.weights[j] = mass;
      m.means[j] = mean;
      m.variances[j] = std::max(var / mass, kVarianceFloor);
    }
    const double total = std::accumulate(m.weights.begin(), m.weights.end(), 0.0);
    for (double& w : m.weights) w /= total;

    const double next = expectation();
    result.log_likelihood.push_back(next);
    result.iterations = iter + 1;
    const double delta = next - ll;
    ll = next;
    if (std::abs(delta) < options.tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

GmmModel fit_gmm(const ConstraintSampleSet& samples, std::size_t k, std::uint64_t seed, int max_iter,
                 double tol) {
  FitOptions opts;
  opts.components = k;
  opts.seed = seed;
  opts.max_iter = max_iter;
  opts.tol = tol;
  return fit_gmm_traced(samples, opts).model;
}

KlEstimate kl_divergence_estimate(const GmmModel& p, const GmmModel& q, std::size_t mc_samples,
                                  std::uint64_t seed) {
  if (mc_samples == 0) throw ConfigError("kl_divergence: mc_samples must be at least 1");
  if (p.components() == 0 || q.components() == 0) throw ShapeError("kl_divergence: empty mixture");

  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> pick(p.weights.begin(), p.weights.end());
  std::normal_distribution<double> normal(0.0, 1.0);
  const double log_floor = std::log(kDensityFloor);

  KlEstimate out;
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t s = 0; s < mc_samples; ++s) {
    const std::size_t j = pick(rng);
    const double x = p.means[j] + std::sqrt(p.variances[j]) * normal(rng);
    const double lp = p.log_density(x);
    double lq = q.log_density(x);
    if (!(lq >= log_floor)) {
      lq = log_floor;
      out.tail_warning = true;
    }
    const double term = lp - lq;
    sum += term;
    sum_sq += term * term;
  }
  const double m = static_cast<double>(mc_samples);
  out.value = sum / m;
  if (mc_samples > 1) {
    const double var = std::max((sum_sq - m * out.value * out.value) / (m - 1.0), 0.0);
    out.standard_error = std::sqrt(var / m);
  }
  return out;
}

double kl_divergence(const GmmModel& p, const GmmModel& q, std::size_t mc_samples, std::uint64_t seed) {
  return kl_divergence_estimate(p, q, mc_samples, seed).value;
}

}  // namespace pvo::gmm
