#include <cmath>

#include "doctest.h"
#include "gen.hpp"
#include "pvo/cost.hpp"
#include "pvo/desired.hpp"
#include "pvo/errors.hpp"
#include "pvo/grid.hpp"

using namespace pvo;

TEST_CASE("tracking and control cost") {
  const SampleSet s = SampleSet::uniform(4, {0, 0, 0, 0});
  const RobotState drift = cost::desired_state({0, 0}, {0, 0}, 1.0, 1.0);
  const auto zero = cost::tracking_control_cost(s, {0, 0}, drift, 1.0);
  CHECK(zero.tracking == 0.0);
  CHECK(zero.control == 0.0);
  CHECK(cost::tracking_control_cost(RobotState{3, 1, -2, 4}, {1, 1}, RobotState{}, 0.1).control == 2.0);
  CHECK(cost::tracking_control_cost(s, {0, 0}, RobotState{1, 0, 0, 0}, 1.0).tracking == doctest::Approx(1.0));
  const auto w = cost::weighted({2.0, 3.0}, {0.5, 2.0});
  CHECK(w.tracking == 1.0);
  CHECK(w.control == 6.0);
}

TEST_CASE("desired state advances toward the goal") {
  const RobotState d = cost::desired_state({0, 0}, {3, 4}, 1.0, 0.5);
  CHECK(d.x == doctest::Approx(0.3));
  CHECK(d.y == doctest::Approx(0.4));
  CHECK(d.vx == doctest::Approx(0.6));
  CHECK(d.vy == doctest::Approx(0.8));
  const RobotState near = cost::desired_state({0, 0}, {0.1, 0}, 1.0, 0.5);
  CHECK(near.x == doctest::Approx(0.1));
  CHECK(near.vx == doctest::Approx(0.2));
}

TEST_CASE("grid lattice layout") {
  const auto g = make_grid({2, 3, -1, 1, -2, 2});
  REQUIRE(g.size() == 6);
  CHECK(g[0] == ControlInput{-1, -2});
  CHECK(g[1] == ControlInput{-1, 0});
  CHECK(g[5] == ControlInput{1, 2});
  const auto mid = make_grid({1, 1, -1, 3, 0, 2});
  REQUIRE(mid.size() == 1);
  CHECK(mid[0] == ControlInput{1, 1});
  CHECK_THROWS_AS(make_grid({0, 3, -1, 1, -1, 1}), ConfigError);
  CHECK_THROWS_AS(make_grid({3, 3, 1, -1, -1, 1}), ConfigError);
}

TEST_CASE("candidate ordering breaks ties") {
  CHECK(candidate_less(1.0, 5.0, {3, 3}, 2.0, 0.0, {0, 0}));
  CHECK(candidate_less(1.0, 0.5, {3, 3}, 1.0, 0.6, {0, 0}));
  CHECK(candidate_less(1.0, 0.5, {-1, 3}, 1.0, 0.5, {0, -3}));
  CHECK(candidate_less(1.0, 0.5, {0, -1}, 1.0, 0.5, {0, 1}));
  CHECK_FALSE(candidate_less(1.0, 0.5, {0, 1}, 1.0, 0.5, {0, 1}));
}

namespace {

// every pair evaluated one by one
bool oracle_feasible(const SampleSet& w, const SampleSet& o, std::size_t n_r, std::size_t n_o,
                     const ControlInput& u, const vo::ObstacleGeometry& geom, double dt) {
  for (std::size_t p = 0; p < n_r; ++p)
    for (std::size_t q = 0; q < n_o; ++q)
      if (vo::vo_of_control(w[p], o[q], u, geom, dt).value > 0.0) return false;
  return true;
}

}  // namespace

TEST_CASE("far receding obstacle leaves the unconstrained minimiser") {
  testing::Gen g(41);
  const SampleSet w = g.w_set(20, {0, 1, 0, 0}, 1e-6, 1e-6, 1e-6);
  const SampleSet o = g.state_set(20, {-30, -1, 20, 0}, 1e-6, 1e-6);
  const auto grid = make_grid({7, 7, -2, 2, -2, 2});
  const RobotState target{0.1, 1, 0.05, 0.5};
  const auto d = desired::build_desired(w, o, 20, 20, grid, target, {0.5, 0.5}, 0.1);
  const RobotState mean = cost::mean_state(w);
  ControlInput best = grid[0];
  double best_j = INFINITY, best_c = INFINITY;
  for (const auto& u : grid) {
    const auto t = cost::tracking_control_cost(mean, u, target, 0.1);
    if (candidate_less(t.total(), t.control, u, best_j, best_c, best)) {
      best = u;
      best_j = t.total();
      best_c = t.control;
    }
  }
  CHECK(d.u_nom == best);
  CHECK(d.constraint_samples.max_value() < 0.0);
}

TEST_CASE("scenario program returns the cheapest feasible control") {
  testing::Gen g(42);
  for (int trial = 0; trial < 20; ++trial) {
    const double dist = g.uniform(3, 8);
    const SampleSet w = g.w_set(30, {0, 1, 0, 0}, 0.05, 0.05, 0.1);
    const SampleSet o = g.state_set(30, {dist, -1, g.uniform(-0.5, 0.5), 0}, 0.05, 0.05);
    const auto grid = make_grid({5, 9, -4, 4, -4, 4});
    const RobotState target{0.1, 1, 0, 0};
    const vo::ObstacleGeometry geom{0.5, 0.5};
    const std::size_t n_r = g.index(5, 30), n_o = g.index(5, 30);
    const cost::CostWeights weights{1.0, g.uniform(0.01, 1.0)};
    const RobotState mean = cost::mean_state(w);

    bool any = false;
    ControlInput best{};
    double best_j = INFINITY, best_c = INFINITY;
    for (const auto& u : grid) {
      if (!oracle_feasible(w, o, n_r, n_o, u, geom, 0.1)) continue;
      const auto t = cost::weighted(cost::tracking_control_cost(mean, u, target, 0.1), weights);
      if (!any || candidate_less(t.total(), t.control, u, best_j, best_c, best)) {
        best = u;
        best_j = t.total();
        best_c = t.control;
        any = true;
      }
    }
    if (!any) {
      CHECK_THROWS_AS(desired::build_desired(w, o, n_r, n_o, grid, target, geom, 0.1, weights),
                      DesiredDistributionInfeasible);
      continue;
    }
    const auto d = desired::build_desired(w, o, n_r, n_o, grid, target, geom, 0.1, weights);
    CHECK(d.u_nom == best);
    CHECK(d.objective == doctest::Approx(best_j));
    CHECK(d.constraint_samples.size() == n_r * n_o);
    CHECK(d.constraint_samples.max_value() <= 0.0);
    for (double x : d.constraint_samples.weights) CHECK(x == doctest::Approx(1.0 / (n_r * n_o)));
  }
}

TEST_CASE("boxed-in robot has no desired distribution") {
  testing::Gen g(43);
  const SampleSet w = g.w_set(10, {0, 1, 0, 0}, 1e-3, 1e-3, 1e-3);
  const SampleSet o = g.state_set(10, {3, -1, 0, 0}, 1e-3, 1e-3);
  const auto grid = make_grid({3, 3, -0.1, 0.1, -0.1, 0.1});
  CHECK_THROWS_AS(desired::build_desired(w, o, 10, 10, grid, {0.1, 1, 0, 0}, {0.5, 0.5}, 0.1),
                  DesiredDistributionInfeasible);
}

TEST_CASE("multi-obstacle program shares one control") {
  testing::Gen g(44);
  const SampleSet w = g.w_set(20, {0, 1, 0, 0}, 0.02, 0.02, 0.05);
  const SampleSet a = g.state_set(20, {5, -1, 0.3, 0}, 0.02, 0.02);
  const SampleSet b = g.state_set(20, {4, 0, -3, 1}, 0.02, 0.02);
  const auto grid = make_grid({7, 7, -4, 4, -4, 4});
  const auto out = desired::build_desired(w, {{&a, {0.5, 0.5}}, {&b, {0.5, 0.4}}}, 10, 10, grid, {0.1, 1, 0, 0}, 0.1);
  REQUIRE(out.size() == 2);
  CHECK(out[0].u_nom == out[1].u_nom);
  CHECK(out[0].constraint_samples.max_value() <= 0.0);
  CHECK(out[1].constraint_samples.max_value() <= 0.0);
}

TEST_CASE("scenario program argument checks") {
  testing::Gen g(45);
  const SampleSet w = g.w_set(5, {}, 1, 1, 1);
  const SampleSet o = g.state_set(5, {5, 0, 0, 0}, 1, 1);
  const auto grid = make_grid({});
  CHECK_THROWS_AS(desired::build_desired(w, o, 6, 5, grid, {}, {}, 0.1), ShapeError);
  CHECK_THROWS_AS(desired::build_desired(w, o, 5, 6, grid, {}, {}, 0.1), ShapeError);
  CHECK_THROWS_AS(desired::build_desired(w, o, 0, 5, grid, {}, {}, 0.1), ConfigError);
  CHECK_THROWS_AS(desired::build_desired(w, o, 5, 5, {}, {}, {}, 0.1), ConfigError);
}
