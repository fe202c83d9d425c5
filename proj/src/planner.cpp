#include "pvo/planner.hpp"

#include <Eigen/Dense>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <optional>
#include <sstream>

#include "pvo/errors.hpp"
#include "pvo/gmm.hpp"
#include "pvo/noise.hpp"
#include "pvo/parallel.hpp"

namespace pvo::planner {

namespace {

constexpr double kFiniteDifferenceStep = 1e-5;
constexpr double kCovarianceRidge = 1e-9;

ConstraintSampleSet scaled(ConstraintSampleSet s, double scale) {
  for (double& v : s.values) v /= scale;
  return s;
}

Eigen::MatrixXd covariance(const SampleSet& s, const Eigen::VectorXd& mean) {
  const std::size_t d = s.dim();
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
  const double total = s.weight_sum();
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto row = s[i];
    Eigen::VectorXd diff(d);
    for (std::size_t k = 0; k < d; ++k) diff(k) = row[k] - mean(k);
    cov.noalias() += s.weight(i) * diff * diff.transpose();
  }
  return cov / total;
}

Eigen::VectorXd mean_vector(const SampleSet& s) {
  const std::vector<double> m = s.mean();
  const double total = s.weight_sum();
  Eigen::VectorXd out(m.size());
  for (std::size_t k = 0; k < m.size(); ++k) out(k) = m[k] / total;
  return out;
}

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::rkhs: return "rkhs";
    case Method::gmm_kld: return "gmm_kld";
    case Method::linearized_gaussian: return "linearized_gaussian";
    case Method::ev_gauss: return "ev_gauss";
    case Method::deterministic: return "deterministic";
  }
  return "rkhs";
}

Method method_from_string(std::string_view name) {
  for (Method m : {Method::rkhs, Method::gmm_kld, Method::linearized_gaussian, Method::ev_gauss,
                   Method::deterministic}) {
    if (name == to_string(m)) return m;
  }
  throw ConfigError("unknown planner method '" + std::string(name) + "'");
}

void PlannerConfig::validate() const {
  if (!(rho >= 0.0)) throw ConfigError("planner.rho must be nonnegative");
  if (kernel.degree < 1) throw ConfigError("planner.degree must be at least 1");
  if (gmm_k < 1) throw ConfigError("planner.gmm_k must be at least 1");
  if (mc_samples < 1) throw ConfigError("planner.mc_samples must be at least 1");
  if (!(eta > 0.0 && eta < 1.0)) throw ConfigError("planner.eta must lie in (0, 1)");
  if (grid.nx == 0 || grid.ny == 0) throw ConfigError("planner.grid resolution must be positive");
  if (!(grid.ax_min <= grid.ax_max && grid.ay_min <= grid.ay_max)) {
    throw ConfigError("planner.grid bounds are empty");
  }
  if (!(weights.tracking >= 0.0 && weights.control >= 0.0)) {
    throw ConfigError("planner cost weights must be nonnegative");
  }
}

double f_scale_for(const PlannerConfig& cfg, const vo::ObstacleGeometry& geom) {
  if (cfg.f_scale > 0.0) return cfg.f_scale;
  const double rr = geom.combined_radius();
  return rr * rr;
}

bool ev_gauss_feasible(const ConstraintSampleSet& f, double eta) {
  if (f.size() < 2) throw ShapeError("ev_gauss_feasible: need at least two samples");
  const double eps = std::sqrt(eta / (1.0 - eta));
  return f.weighted_mean() + eps * std::sqrt(f.weighted_variance()) <= 0.0;
}

GaussianApprox linearized_gaussian(const SampleSet& w_set, const SampleSet& obs_set,
                                   const ControlInput& u, const vo::ObstacleGeometry& geom, double dt) {
  if (w_set.size() < 2 || obs_set.size() < 2) throw ShapeError("linearized_gaussian: need at least two samples per set");
  if (w_set.dim() != uncertainty::kWDim || obs_set.dim() != RobotState::kDim) {
    throw ShapeError("linearized_gaussian: expects 6-d w and 4-d obstacle samples");
  }
  const Eigen::VectorXd mw = mean_vector(w_set);
  const Eigen::VectorXd mo = mean_vector(obs_set);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(10, 10);
  cov.topLeftCorner(6, 6) = covariance(w_set, mw);
  cov.bottomRightCorner(4, 4) = covariance(obs_set, mo);
  cov.diagonal().array() += kCovarianceRidge;

  Eigen::VectorXd z(10);
  z << mw, mo;
  auto f = [&](const Eigen::VectorXd& p) {
    return vo::vo_of_control(std::span<const double>(p.data(), 6), std::span<const double>(p.data() + 6, 4),
                             u, geom, dt)
        .value;
  };
  Eigen::VectorXd grad(10);
  for (int k = 0; k < 10; ++k) {
    Eigen::VectorXd hi = z, lo = z;
    hi(k) += kFiniteDifferenceStep;
    lo(k) -= kFiniteDifferenceStep;
    grad(k) = (f(hi) - f(lo)) / (2.0 * kFiniteDifferenceStep);
  }
  const double var = grad.dot(cov * grad);
  return {f(z), std::sqrt(std::max(var, 0.0))};
}

bool linearized_gaussian_feasible(const SampleSet& w_set, const SampleSet& obs_set,
                                  const ControlInput& u, double eta, const vo::ObstacleGeometry& geom,
                                  double dt) {
  const GaussianApprox g = linearized_gaussian(w_set, obs_set, u, geom, dt);
  const double z = boost::math::quantile(boost::math::normal(), eta);
  return g.mean + z * g.stddev <= 0.0;
}

std::vector<ControlDecision> evaluate_grid(const SampleSet& w_set,
                                           const std::vector<ObstacleContext>& obstacles,
                                           const RobotState& desired_state, const PlannerConfig& cfg,
                                           double dt) {
  cfg.validate();
  const std::vector<ControlInput> grid = make_grid(cfg.grid);
  const RobotState mean = cost::mean_state(w_set);
  const bool matching = cfg.method == Method::rkhs || cfg.method == Method::gmm_kld;
  const std::size_t m = obstacles.size();

  for (const auto& o : obstacles) {
    if (o.samples == nullptr) throw ShapeError("select_control: missing obstacle samples");
    if (matching && o.desired == nullptr) throw ShapeError("select_control: missing desired distribution");
  }

  // per-obstacle targets shared by every candidate
  std::vector<double> scales(m);
  std::vector<std::optional<embedding::ScalarEmbedding>> targets(m);
  std::vector<gmm::GmmModel> target_gmms(m);
  std::vector<std::uint64_t> kl_seeds(m);
  for (std::size_t j = 0; j < m; ++j) {
    scales[j] = f_scale_for(cfg, obstacles[j].geom);
    if (cfg.method == Method::rkhs) {
      targets[j].emplace(scaled(obstacles[j].desired->constraint_samples, scales[j]), cfg.kernel);
    } else if (cfg.method == Method::gmm_kld) {
      target_gmms[j] = gmm::fit_gmm(scaled(obstacles[j].desired->constraint_samples, scales[j]), cfg.gmm_k,
                                    uncertainty::derive_seed(cfg.seed, 21, j));
      kl_seeds[j] = uncertainty::derive_seed(cfg.seed, 22, j);
    }
  }
  std::vector<double> det_mean_w;
  std::vector<std::vector<double>> det_mean_obs(m);
  if (cfg.method == Method::deterministic) {
    const Eigen::VectorXd mw = mean_vector(w_set);
    det_mean_w.assign(mw.data(), mw.data() + mw.size());
    for (std::size_t j = 0; j < m; ++j) {
      const Eigen::VectorXd mo = mean_vector(*obstacles[j].samples);
      det_mean_obs[j].assign(mo.data(), mo.data() + mo.size());
    }
  }

  std::vector<ControlDecision> out(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    const ControlInput& u = grid[i];
    ControlDecision d;
    d.control = u;
    const cost::CostTerms terms = cost::weighted(cost::tracking_control_cost(mean, u, desired_state, dt), cfg.weights);
    d.tracking_cost = terms.tracking;
    d.control_cost = terms.control;
    d.per_obstacle_dist.assign(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
      const ObstacleContext& o = obstacles[j];
      switch (cfg.method) {
        case Method::rkhs: {
          const embedding::ScalarEmbedding emb(scaled(vo::pvo_samples(w_set, *o.samples, u, o.geom, dt), scales[j]),
                                               cfg.kernel);
          d.per_obstacle_dist[j] = emb.distance_squared(*targets[j]);
          break;
        }
        case Method::gmm_kld: {
          const auto f = scaled(vo::pvo_samples(w_set, *o.samples, u, o.geom, dt), scales[j]);
          const gmm::GmmModel fit = gmm::fit_gmm(f, cfg.gmm_k, uncertainty::derive_seed(cfg.seed, 21, j));
          d.per_obstacle_dist[j] = gmm::kl_divergence(fit, target_gmms[j], cfg.mc_samples, kl_seeds[j]);
          break;
        }
        case Method::ev_gauss:
          d.feasible = d.feasible && ev_gauss_feasible(vo::pvo_samples(w_set, *o.samples, u, o.geom, dt), cfg.eta);
          break;
        case Method::linearized_gaussian:
          d.feasible = d.feasible && linearized_gaussian_feasible(w_set, *o.samples, u, cfg.eta, o.geom, dt);
          break;
        case Method::deterministic:
          d.feasible = d.feasible &&
                       vo::vo_of_control(det_mean_w, det_mean_obs[j], u, o.geom, dt).value <= 0.0;
          break;
      }
    }
    for (double v : d.per_obstacle_dist) d.dist_cost += v;
    d.total = d.tracking_cost + d.control_cost + cfg.rho * d.dist_cost;
    out[i] = std::move(d);
  });
  return out;
}

ControlDecision select_best(const std::vector<ControlDecision>& candidates) {
  const ControlDecision* best = nullptr;
  for (const auto& c : candidates) {
    if (!c.feasible) continue;
    if (best == nullptr ||
        candidate_less(c.total, c.control_cost, c.control, best->total, best->control_cost, best->control)) {
      best = &c;
    }
  }
  if (best == nullptr) {
    std::ostringstream msg;
    msg << "all " << candidates.size() << " grid controls violate the surrogate constraint";
    throw NoFeasibleControl(msg.str());
  }
  return *best;
}

ControlDecision select_control(const SampleSet& w_set, const std::vector<ObstacleContext>& obstacles,
                               const RobotState& desired_state, const PlannerConfig& cfg, double dt) {
  return select_best(evaluate_grid(w_set, obstacles, desired_state, cfg, dt));
}

}  // namespace pvo::planner
