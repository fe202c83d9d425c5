#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "gen.hpp"
#include "pvo/errors.hpp"
#include "pvo/gmm.hpp"

using namespace pvo;
using namespace pvo::gmm;

namespace {

GmmModel gaussian(double mean, double var) { return {{1.0}, {mean}, {var}}; }

}  // namespace

TEST_CASE("constant data collapses to a floored component") {
  const GmmModel m = fit_gmm(ConstraintSampleSet::uniform(std::vector<double>(20, 3.5)), 1, 0);
  CHECK(m.means[0] == doctest::Approx(3.5));
  CHECK(m.variances[0] == kVarianceFloor);
  CHECK(m.weights[0] == 1.0);
}

TEST_CASE("two separated Gaussians are recovered") {
  testing::Gen g(31);
  std::vector<double> x;
  for (int i = 0; i < 1000; ++i) x.push_back(g.normal(i % 2 ? 10.0 : -10.0, 1.0));
  const GmmModel m = fit_gmm(ConstraintSampleSet::uniform(x), 2, 1);
  const auto lo = std::min_element(m.means.begin(), m.means.end()) - m.means.begin();
  const auto hi = 1 - lo;
  CHECK(std::abs(m.means[lo] + 10.0) < 0.5);
  CHECK(std::abs(m.means[hi] - 10.0) < 0.5);
  CHECK(std::abs(m.weights[lo] - 0.5) < 0.1);
  CHECK(std::abs(m.weights[hi] - 0.5) < 0.1);
}

TEST_CASE("fitted models satisfy the mixture invariants") {
  testing::Gen g(32);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = g.index(3, 200);
    auto s = g.scalar_set(n, -5, 5);
    // a few duplicated values stress the variance floor
    for (std::size_t i = 0; i + 1 < n; i += 7) s.values[i + 1] = s.values[i];
    const std::size_t k = g.index(1, 3);
    const FitResult r = fit_gmm_traced(s, {k, static_cast<std::uint64_t>(trial), 100, 1e-3});
    double total = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      CHECK(r.model.weights[j] >= 0.0);
      CHECK(r.model.variances[j] >= kVarianceFloor);
      total += r.model.weights[j];
    }
    CHECK(std::abs(total - 1.0) < 1e-9);
    // EM never decreases the likelihood
    for (std::size_t i = 1; i < r.log_likelihood.size(); ++i) {
      CHECK(r.log_likelihood[i] >= r.log_likelihood[i - 1] - 1e-9);
    }
  }
}

TEST_CASE("mixture density integrates to one") {
  const GmmModel m{{0.2, 0.5, 0.3}, {-2.0, 0.5, 3.0}, {0.3, 1.0, 2.0}};
  // trapezoid rule on a wide interval
  const double lo = -20.0, hi = 20.0;
  const int steps = 40000;
  const double h = (hi - lo) / steps;
  double sum = 0.5 * (m.density(lo) + m.density(hi));
  for (int i = 1; i < steps; ++i) sum += m.density(lo + i * h);
  CHECK(sum * h == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(m.log_density(0.7) == doctest::Approx(std::log(m.density(0.7))));
}

TEST_CASE("fit errors") {
  CHECK_THROWS_AS(fit_gmm(ConstraintSampleSet::uniform({1.0, 2.0}), 3, 0), ShapeError);
  CHECK_THROWS_AS(fit_gmm(ConstraintSampleSet::uniform({1.0, 2.0}), 0, 0), ConfigError);
}

TEST_CASE("negative sample weights are clipped") {
  const ConstraintSampleSet s{{0.0, 1.0, 100.0}, {0.6, 0.6, -0.2}};
  const GmmModel m = fit_gmm(s, 1, 0);
  CHECK(m.means[0] == doctest::Approx(0.5));
}

TEST_CASE("KL of a model against itself is near zero") {
  const GmmModel p{{0.3, 0.7}, {-1.0, 2.0}, {0.5, 1.5}};
  const KlEstimate e = kl_divergence_estimate(p, p, 2000, 5);
  CHECK(std::abs(e.value) <= 2.0 * e.standard_error + 1e-12);
  CHECK_FALSE(e.tail_warning);
}

TEST_CASE("KL between unit Gaussians matches the closed form") {
  const double kl = kl_divergence(gaussian(0, 1), gaussian(1, 1), 100000, 7);
  CHECK(std::abs(kl - 0.5) < 0.02);
}

TEST_CASE("KL between Gaussians of different variance") {
  testing::Gen g(33);
  for (int trial = 0; trial < 5; ++trial) {
    const double m0 = g.uniform(-1, 1), m1 = g.uniform(-1, 1);
    const double v0 = g.uniform(0.5, 2), v1 = g.uniform(0.5, 2);
    const double exact = 0.5 * (std::log(v1 / v0) + (v0 + (m0 - m1) * (m0 - m1)) / v1 - 1.0);
    const KlEstimate e = kl_divergence_estimate(gaussian(m0, v0), gaussian(m1, v1), 50000, trial);
    CHECK(std::abs(e.value - exact) < 4.0 * e.standard_error + 1e-3);
  }
}

TEST_CASE("KL flags floored tail densities") {
  const KlEstimate e = kl_divergence_estimate(gaussian(0, 1), gaussian(100, 1e-4), 100, 3);
  CHECK(e.tail_warning);
  CHECK(std::isfinite(e.value));
  CHECK_THROWS_AS(kl_divergence(gaussian(0, 1), gaussian(0, 1), 0, 1), ConfigError);
}
