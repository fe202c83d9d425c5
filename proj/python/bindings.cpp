#include <optional>
#include <string>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pvo/embedding.hpp"
#include "pvo/errors.hpp"
#include "pvo/gmm.hpp"
#include "pvo/report.hpp"
#include "pvo/scenario.hpp"
#include "pvo/sim.hpp"
#include "pvo/vo.hpp"

namespace py = pybind11;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

pvo::SampleSet sample_set(const Array& a, std::size_t dim, const char* name) {
  if (a.ndim() != 2 || static_cast<std::size_t>(a.shape(1)) != dim) {
    throw pvo::ShapeError(std::string(name) + ": expected an array of shape (n, " + std::to_string(dim) + ")");
  }
  std::vector<double> data(a.data(), a.data() + a.size());
  return pvo::SampleSet::uniform(dim, std::move(data));
}

pvo::ConstraintSampleSet scalar_set(const Array& values, std::optional<Array> weights) {
  std::vector<double> v(values.data(), values.data() + values.size());
  if (!weights) return pvo::ConstraintSampleSet::uniform(std::move(v));
  if (weights->size() != values.size()) throw pvo::ShapeError("values and weights differ in length");
  return {std::move(v), std::vector<double>(weights->data(), weights->data() + weights->size())};
}

Array to_array(const std::vector<double>& v) { return Array(static_cast<py::ssize_t>(v.size()), v.data()); }

py::dict gmm_dict(const pvo::gmm::GmmModel& m) {
  py::dict d;
  d["weights"] = to_array(m.weights);
  d["means"] = to_array(m.means);
  d["variances"] = to_array(m.variances);
  return d;
}

pvo::gmm::GmmModel gmm_from(const py::dict& d) {
  auto vec = [&](const char* key) { return d[key].cast<std::vector<double>>(); };
  return {vec("weights"), vec("means"), vec("variances")};
}

pvo::scenario::ScenarioConfig configure(const std::string& path, std::optional<std::string> method,
                                        std::optional<int> degree, std::optional<double> rho,
                                        std::optional<double> eta, std::optional<std::uint64_t> seed) {
  auto cfg = pvo::scenario::load_scenario(path);
  if (method) cfg.planner.method = pvo::planner::method_from_string(*method);
  if (degree) cfg.planner.kernel.degree = *degree;
  if (rho) cfg.planner.rho = *rho;
  if (eta) cfg.planner.eta = *eta;
  if (seed) cfg.seed = *seed;
  cfg.validate();
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Distribution-matching collision avoidance under non-parametric uncertainty";

  py::register_exception<pvo::Error>(m, "Error");
  py::register_exception<pvo::ConfigError>(m, "ConfigError");
  py::register_exception<pvo::ShapeError>(m, "ShapeError");
  py::register_exception<pvo::DesiredDistributionInfeasible>(m, "DesiredDistributionInfeasible");
  py::register_exception<pvo::NoFeasibleControl>(m, "NoFeasibleControl");

  m.def(
      "poly_kernel",
      [](const Array& x1, const Array& x2, int degree) {
        return pvo::embedding::poly_kernel(std::span<const double>(x1.data(), x1.size()),
                                           std::span<const double>(x2.data(), x2.size()), {degree});
      },
      py::arg("x1"), py::arg("x2"), py::arg("degree"));

  m.def(
      "mmd_squared",
      [](const Array& a, const Array& b, int degree, std::optional<Array> wa, std::optional<Array> wb) {
        return pvo::embedding::mmd_squared(scalar_set(a, wa), scalar_set(b, wb), {degree});
      },
      py::arg("a"), py::arg("b"), py::arg("degree"), py::arg("weights_a") = py::none(),
      py::arg("weights_b") = py::none(), "Squared RKHS distance between two weighted scalar sample sets.");

  m.def(
      "reduced_set_weights",
      [](const Array& full, const Array& reduced, int degree) {
        if (full.ndim() != 2) throw pvo::ShapeError("full: expected a 2-d array");
        const auto dim = static_cast<std::size_t>(full.shape(1));
        return to_array(
            pvo::embedding::reduced_set_weights(sample_set(full, dim, "full"), sample_set(reduced, dim, "reduced"),
                                                {degree})
                .weights);
      },
      py::arg("full"), py::arg("reduced"), py::arg("degree"));

  m.def(
      "vo_value",
      [](std::array<double, 2> r, std::array<double, 2> v, double combined_radius) {
        return pvo::vo::vo_value({r[0], r[1]}, {v[0], v[1]}, {combined_radius / 2, combined_radius / 2}).value;
      },
      py::arg("rel_pos"), py::arg("rel_vel"), py::arg("combined_radius"));

  m.def(
      "pvo_samples",
      [](const Array& w, const Array& obs, std::array<double, 2> u, double robot_radius, double obstacle_radius,
         double dt) {
        const auto f = pvo::vo::pvo_samples(sample_set(w, 6, "w"), sample_set(obs, 4, "obs"), {u[0], u[1]},
                                            {robot_radius, obstacle_radius}, dt);
        return py::make_tuple(to_array(f.values), to_array(f.weights));
      },
      py::arg("w"), py::arg("obs"), py::arg("u"), py::arg("robot_radius"), py::arg("obstacle_radius"), py::arg("dt"),
      "Constraint values of every (w, obstacle) pair under control u, with their weights.");

  m.def(
      "estimate_eta",
      [](const Array& w, const Array& obs, std::array<double, 2> u, double robot_radius, double obstacle_radius,
         double dt) {
        return pvo::sim::estimate_eta(sample_set(w, 6, "w"), sample_set(obs, 4, "obs"), {u[0], u[1]},
                                      {robot_radius, obstacle_radius}, dt);
      },
      py::arg("w"), py::arg("obs"), py::arg("u"), py::arg("robot_radius"), py::arg("obstacle_radius"), py::arg("dt"));

  m.def(
      "fit_gmm",
      [](const Array& values, std::optional<Array> weights, std::size_t k, std::uint64_t seed) {
        return gmm_dict(pvo::gmm::fit_gmm(scalar_set(values, weights), k, seed));
      },
      py::arg("values"), py::arg("weights") = py::none(), py::arg("k") = 3, py::arg("seed") = 0);

  m.def(
      "kl_divergence",
      [](const py::dict& p, const py::dict& q, std::size_t mc_samples, std::uint64_t seed) {
        const auto e = pvo::gmm::kl_divergence_estimate(gmm_from(p), gmm_from(q), mc_samples, seed);
        py::dict d;
        d["value"] = e.value;
        d["standard_error"] = e.standard_error;
        d["tail_warning"] = e.tail_warning;
        return d;
      },
      py::arg("p"), py::arg("q"), py::arg("mc_samples") = 1000, py::arg("seed") = 0);

  m.def(
      "run_scenario",
      [](const std::string& path, std::optional<std::string> method, std::optional<int> degree,
         std::optional<double> rho, std::optional<double> eta, std::optional<std::uint64_t> seed, bool wall_clock) {
        const auto log = [&] {
          const auto cfg = configure(path, method, degree, rho, eta, seed);
          py::gil_scoped_release release;
          return pvo::sim::run_scenario(cfg);
        }();
        return py::make_tuple(pvo::report::summary_json(log).dump(), pvo::report::trajectory_csv(log, wall_clock));
      },
      py::arg("path"), py::arg("method") = py::none(), py::arg("degree") = py::none(), py::arg("rho") = py::none(),
      py::arg("eta") = py::none(), py::arg("seed") = py::none(), py::arg("wall_clock") = true,
      "Runs one scenario file; returns (summary JSON text, trajectory CSV text).");

  m.def(
      "consistency_report",
      [](const std::string& path, std::vector<std::size_t> n_values, std::vector<int> degrees,
         std::vector<std::uint64_t> seeds) {
        const auto cfg = pvo::scenario::load_scenario(path);
        py::gil_scoped_release release;
        return pvo::report::consistency_csv(pvo::sim::consistency_report(cfg, n_values, degrees, seeds));
      },
      py::arg("path"), py::arg("n_values"), py::arg("degrees"), py::arg("seeds"));

  m.def(
      "benchmark_timing",
      [](const std::string& path, std::vector<std::string> methods, std::size_t repeats) {
        const auto cfg = pvo::scenario::load_scenario(path);
        std::vector<pvo::planner::Method> ms;
        for (const auto& name : methods) ms.push_back(pvo::planner::method_from_string(name));
        py::gil_scoped_release release;
        return pvo::report::timing_csv(pvo::sim::benchmark_timing(cfg, ms, repeats));
      },
      py::arg("path"), py::arg("methods") = std::vector<std::string>{"rkhs", "gmm_kld"}, py::arg("repeats") = 3);
}
