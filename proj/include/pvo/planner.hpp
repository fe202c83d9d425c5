#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "pvo/cost.hpp"
#include "pvo/desired.hpp"
#include "pvo/embedding.hpp"
#include "pvo/grid.hpp"
#include "pvo/types.hpp"
#include "pvo/vo.hpp"

namespace pvo::planner {

enum class Method { rkhs, gmm_kld, linearized_gaussian, ev_gauss, deterministic };

std::string_view to_string(Method m);
/// Throws ConfigError for unknown names.
Method method_from_string(std::string_view name);

struct PlannerConfig {
  Method method = Method::rkhs;
  double rho = 1.0;
  embedding::KernelSpec kernel;
  std::size_t gmm_k = 3;
  std::size_t mc_samples = 1000;
  /// Target probability for the surrogate methods.
  double eta = 0.9;
  GridSpec grid;
  cost::CostWeights weights;
  /// Divisor applied to f before matching; <= 0 selects (R + R_o)^2.
  double f_scale = 0.0;
  /// Seed of the Monte-Carlo KL estimator (gmm_kld) and EM initialisation.
  std::uint64_t seed = 0;

  /// Throws ConfigError when a field is out of range.
  void validate() const;
};

/// Planning inputs for one obstacle. `desired` is required by rkhs and
/// gmm_kld and ignored by the other methods.
struct ObstacleContext {
  const SampleSet* samples = nullptr;
  vo::ObstacleGeometry geom;
  const desired::DesiredDistribution* desired = nullptr;
};

struct ControlDecision {
  ControlInput control;
  /// Weighted tracking and control terms of J.
  double tracking_cost = 0.0;
  double control_cost = 0.0;
  /// Sum of per-obstacle distances (0 for the hard-constrained methods).
  double dist_cost = 0.0;
  double total = 0.0;
  std::vector<double> per_obstacle_dist;
  /// False when a hard-constrained method rejects the control.
  bool feasible = true;
};

/// Scores every grid control, in grid order.
std::vector<ControlDecision> evaluate_grid(const SampleSet& w_set,
                                           const std::vector<ObstacleContext>& obstacles,
                                           const RobotState& desired_state, const PlannerConfig& cfg,
                                           double dt);

/// Feasible candidate with the lowest total; ties go to the lower control
/// cost, then to lexicographic (ax, ay). Throws NoFeasibleControl when every
/// candidate is rejected.
ControlDecision select_control(const SampleSet& w_set, const std::vector<ObstacleContext>& obstacles,
                               const RobotState& desired_state, const PlannerConfig& cfg, double dt);

/// Same reduction over precomputed candidates.
ControlDecision select_best(const std::vector<ControlDecision>& candidates);

/// Cantelli surrogate: mean(f) + sqrt(eta / (1 - eta)) * std(f) <= 0 with
/// weighted sample moments.
bool ev_gauss_feasible(const ConstraintSampleSet& f_samples, double eta);

struct GaussianApprox {
  double mean = 0.0;
  double stddev = 0.0;
};

/// Affine approximation of f around the joint sample mean of (w, obstacle),
/// propagated through the block-diagonal sample covariance.
GaussianApprox linearized_gaussian(const SampleSet& w_set, const SampleSet& obs_set,
                                   const ControlInput& u, const vo::ObstacleGeometry& geom, double dt);

/// mean + z_eta * stddev <= 0 for the approximation above.
bool linearized_gaussian_feasible(const SampleSet& w_set, const SampleSet& obs_set,
                                  const ControlInput& u, double eta, const vo::ObstacleGeometry& geom,
                                  double dt);

/// Divisor used for f-values of one obstacle.
double f_scale_for(const PlannerConfig& cfg, const vo::ObstacleGeometry& geom);

}  // namespace pvo::planner
