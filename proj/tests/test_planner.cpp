#include <cmath>
#include <cstdlib>

#include "doctest.h"
#include "gen.hpp"
#include "pvo/errors.hpp"
#include "pvo/planner.hpp"
#include "pvo/sim.hpp"

using namespace pvo;
using namespace pvo::planner;

namespace {

struct Setup {
  SampleSet w;
  SampleSet obs;
  desired::DesiredDistribution target;
  RobotState goal_state{0.1, 1, 0, 0};
  vo::ObstacleGeometry geom{0.5, 0.5};
  GridSpec grid{5, 7, -4, 4, -4, 4};
};

Setup head_on(std::uint64_t seed, double dist = 8.0) {
  testing::Gen g(seed);
  Setup s;
  s.w = g.w_set(30, {0, 1, 0, 0}, 0.03, 0.05, 0.1);
  s.obs = g.state_set(30, {dist, -1, 0.2, 0}, 0.03, 0.05);
  s.target = desired::build_desired(s.w, s.obs, 15, 15, make_grid(s.grid), s.goal_state, s.geom, 0.1);
  return s;
}

PlannerConfig config(Method m, const GridSpec& grid) {
  PlannerConfig c;
  c.method = m;
  c.grid = grid;
  c.mc_samples = 300;
  return c;
}

}  // namespace

TEST_CASE("method names round trip") {
  for (Method m : {Method::rkhs, Method::gmm_kld, Method::linearized_gaussian, Method::ev_gauss, Method::deterministic}) {
    CHECK(method_from_string(to_string(m)) == m);
  }
  CHECK_THROWS_AS(method_from_string("mpc"), ConfigError);
}

TEST_CASE("config validation") {
  PlannerConfig c;
  c.rho = -1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.eta = 1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.kernel.degree = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("without obstacles the planner minimises tracking and control cost") {
  testing::Gen g(51);
  const SampleSet w = g.w_set(20, {0, 0.5, 0, 0}, 0.1, 0.1, 0.1);
  for (Method m : {Method::rkhs, Method::gmm_kld, Method::ev_gauss, Method::linearized_gaussian, Method::deterministic}) {
    const PlannerConfig cfg = config(m, {9, 9, -2, 2, -2, 2});
    const RobotState target{0.1, 1.2, 0.02, 0.3};
    const ControlDecision d = select_control(w, {}, target, cfg, 0.1);
    const RobotState mean = cost::mean_state(w);
    for (const auto& u : make_grid(cfg.grid)) {
      const auto t = cost::tracking_control_cost(mean, u, target, 0.1);
      CHECK(d.total <= t.total() + 1e-12);
    }
    CHECK(d.dist_cost == 0.0);
  }
}

TEST_CASE("selected control dominates the grid") {
  for (Method m : {Method::rkhs, Method::gmm_kld}) {
    const Setup s = head_on(52);
    const PlannerConfig cfg = config(m, s.grid);
    const std::vector<ObstacleContext> ctx{{&s.obs, s.geom, &s.target}};
    const auto all = evaluate_grid(s.w, ctx, s.goal_state, cfg, 0.1);
    const ControlDecision best = select_best(all);
    for (const auto& c : all) {
      CHECK(best.total <= c.total);
      CHECK(c.total == doctest::Approx(c.tracking_cost + c.control_cost + cfg.rho * c.dist_cost));
    }
  }
}

TEST_CASE("larger rho never increases the chosen distance") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Setup s = head_on(60 + seed);
    const std::vector<ObstacleContext> ctx{{&s.obs, s.geom, &s.target}};
    PlannerConfig cfg = config(Method::rkhs, s.grid);
    double prev = INFINITY;
    for (double rho : {0.01, 0.1, 1.0, 10.0, 100.0}) {
      cfg.rho = rho;
      const double dist = select_control(s.w, ctx, s.goal_state, cfg, 0.1).dist_cost;
      CHECK(dist <= prev + 1e-12);
      prev = dist;
    }
  }
}

TEST_CASE("desired control has zero distance when the target uses every sample") {
  Setup s = head_on(53);
  s.target = desired::build_desired(s.w, s.obs, 30, 30, make_grid(s.grid), s.goal_state, s.geom, 0.1);
  const std::vector<ObstacleContext> ctx{{&s.obs, s.geom, &s.target}};
  const PlannerConfig cfg = config(Method::rkhs, s.grid);
  int hits = 0;
  for (const auto& c : evaluate_grid(s.w, ctx, s.goal_state, cfg, 0.1)) {
    if (c.control == s.target.u_nom) {
      CHECK(c.dist_cost < 1e-9);
      ++hits;
    } else {
      CHECK(c.dist_cost >= 0.0);
    }
  }
  CHECK(hits == 1);
}

TEST_CASE("parallel and serial evaluation agree") {
  const Setup s = head_on(54);
  const std::vector<ObstacleContext> ctx{{&s.obs, s.geom, &s.target}};
  for (Method m : {Method::rkhs, Method::gmm_kld}) {
    const PlannerConfig cfg = config(m, s.grid);
    const auto par = evaluate_grid(s.w, ctx, s.goal_state, cfg, 0.1);
    setenv("PVO_THREADS", "1", 1);
    const auto ser = evaluate_grid(s.w, ctx, s.goal_state, cfg, 0.1);
    unsetenv("PVO_THREADS");
    REQUIRE(par.size() == ser.size());
    for (std::size_t i = 0; i < par.size(); ++i) {
      CHECK(par[i].total == ser[i].total);
      CHECK(par[i].control == ser[i].control);
    }
  }
}

TEST_CASE("EV-Gauss surrogate arithmetic") {
  CHECK(ev_gauss_feasible(ConstraintSampleSet::uniform(std::vector<double>(10, -5.0)), 0.95));
  CHECK_FALSE(ev_gauss_feasible(ConstraintSampleSet::uniform({-1.0, 1.0}), 0.5));
  CHECK(ev_gauss_feasible(ConstraintSampleSet::uniform({-4.0, -2.0}), 0.8));
  CHECK_FALSE(ev_gauss_feasible(ConstraintSampleSet::uniform({-2.0, 0.2}), 0.8));
}

TEST_CASE("linearized Gaussian special cases") {
  testing::Gen g(55);
  const vo::ObstacleGeometry geom{0.5, 0.5};
  // identical samples: the test is f at the mean
  const SampleSet w = SampleSet::uniform(6, {0, 1, 0.3, 0, 0, 0, 0, 1, 0.3, 0, 0, 0});
  const SampleSet o = SampleSet::uniform(4, {5, -1, 0, 0, 5, -1, 0, 0});
  for (const ControlInput u : {ControlInput{0, 0}, ControlInput{0, 4}, ControlInput{0, -4}}) {
    const double f = vo::vo_of_control(w[0], o[0], u, geom, 0.1).value;
    CHECK(linearized_gaussian(w, o, u, geom, 0.1).stddev < 1e-3);
    CHECK(linearized_gaussian_feasible(w, o, u, 0.9, geom, 0.1) == (f <= 0.0));
  }
  // eta = 0.5 reduces to f at the mean for any spread
  const SampleSet wr = g.w_set(40, {0, 1, 0.3, 0}, 0.2, 0.2, 0.2);
  const SampleSet orr = g.state_set(40, {5, -1, 0, 0}, 0.2, 0.2);
  const auto mw = wr.mean();
  const auto mo = orr.mean();
  for (const auto& u : make_grid({3, 5, -4, 4, -4, 4})) {
    const double f = vo::vo_of_control(mw, mo, u, geom, 0.1).value;
    CHECK(linearized_gaussian(wr, orr, u, geom, 0.1).mean == doctest::Approx(f));
    CHECK(linearized_gaussian_feasible(wr, orr, u, 0.5, geom, 0.1) == (f <= 0.0));
  }
}

TEST_CASE("linearized spread matches Monte Carlo for small noise") {
  testing::Gen g(56);
  const vo::ObstacleGeometry geom{0.5, 0.5};
  const SampleSet w = g.w_set(4000, {0, 1, 0.4, 0.1}, 1e-3, 1e-3, 1e-3);
  const SampleSet o = g.state_set(4000, {5, -1, 0, 0}, 1e-3, 1e-3);
  const ControlInput u{0.5, 1.0};
  const GaussianApprox lin = linearized_gaussian(w, o, u, geom, 0.1);
  double mean = 0.0, sq = 0.0;
  std::vector<double> f(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) mean += (f[i] = vo::vo_of_control(w[i], o[i], u, geom, 0.1).value);
  mean /= w.size();
  for (double x : f) sq += (x - mean) * (x - mean);
  const double sd = std::sqrt(sq / (w.size() - 1));
  CHECK(lin.stddev == doctest::Approx(sd).epsilon(0.05));
}

TEST_CASE("EV-Gauss is sound under Gaussian noise") {
  testing::Gen g(57);
  const vo::ObstacleGeometry geom{0.5, 0.5};
  const double eta = 0.8;
  int checked = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const RobotState rc{0, 1, 0, 0}, oc{g.uniform(6, 10), -1, g.uniform(-1.5, 1.5), 0};
    const SampleSet w = g.w_set(50, rc, 0.05, 0.1, 0.2);
    const SampleSet o = g.state_set(50, oc, 0.05, 0.1);
    const SampleSet wv = g.w_set(300, rc, 0.05, 0.1, 0.2);
    const SampleSet ov = g.state_set(300, oc, 0.05, 0.1);
    for (const auto& u : make_grid({5, 9, -4, 4, -4, 4})) {
      if (!ev_gauss_feasible(vo::pvo_samples(w, o, u, geom, 0.1), eta)) continue;
      const double sat = sim::estimate_eta(wv, ov, u, geom, 0.1);
      const double se = std::sqrt(eta * (1 - eta) / 300.0);
      CHECK(1.0 - sat <= 1.0 - eta + 3.0 * se);
      ++checked;
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("hard-constrained methods report empty feasible sets") {
  const Setup s = head_on(58);
  const std::vector<ObstacleContext> ctx{{&s.obs, s.geom, nullptr}};
  for (Method m : {Method::ev_gauss, Method::linearized_gaussian, Method::deterministic}) {
    PlannerConfig cfg = config(m, {3, 3, -0.1, 0.1, -0.1, 0.1});
    cfg.eta = 0.95;
    CHECK_THROWS_AS(select_control(s.w, ctx, s.goal_state, cfg, 0.1), NoFeasibleControl);
  }
  std::vector<ObstacleContext> soft{{&s.obs, s.geom, &s.target}};
  CHECK_NOTHROW(select_control(s.w, soft, s.goal_state, config(Method::rkhs, {3, 3, -0.1, 0.1, -0.1, 0.1}), 0.1));
}

TEST_CASE("matching methods need a desired distribution") {
  const Setup s = head_on(59);
  const std::vector<ObstacleContext> ctx{{&s.obs, s.geom, nullptr}};
  CHECK_THROWS_AS(select_control(s.w, ctx, s.goal_state, config(Method::rkhs, s.grid), 0.1), ShapeError);
}

TEST_CASE("f scale defaults to the squared combined radius") {
  PlannerConfig c;
  CHECK(f_scale_for(c, {0.5, 1.0}) == doctest::Approx(2.25));
  c.f_scale = 3.0;
  CHECK(f_scale_for(c, {0.5, 1.0}) == 3.0);
}
