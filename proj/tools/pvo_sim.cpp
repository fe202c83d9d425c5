// pvo_sim: scenario runner for the distribution-matching planners.
//
//   pvo_sim run --scenario S.json [--method M] [--degree D] [--rho R] [--eta E] [--seed S] [--out DIR]
//   pvo_sim compare --scenario A.json --scenario B.json --method rkhs --method gmm_kld --seeds 10
//   pvo_sim consistency --scenario S.json --n 5,10,20,40 --degree 1,2,3 --seeds 10
//   pvo_sim timing --scenario S.json --method rkhs --method gmm_kld --repeats 3
//
// Exit codes: 0 success, 1 runtime failure, 2 configuration error,
// 3 planner infeasibility.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pvo/errors.hpp"
#include "pvo/parallel.hpp"
#include "pvo/report.hpp"
#include "pvo/scenario.hpp"
#include "pvo/sim.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;

struct Overrides {
  std::vector<std::string> methods;
  std::vector<int> degrees;
  std::optional<double> rho;
  std::optional<double> eta;
  std::optional<std::uint64_t> seed;
};

void add_overrides(CLI::App* cmd, Overrides& o, bool many) {
  if (many) {
    cmd->add_option("--method", o.methods, "Planner method(s)")->delimiter(',');
    cmd->add_option("--degree", o.degrees, "Kernel degree(s) for rkhs")->delimiter(',');
  } else {
    cmd->add_option("--method", o.methods, "Planner method")->expected(1);
    cmd->add_option("--degree", o.degrees, "Kernel degree for rkhs")->expected(1);
  }
  cmd->add_option("--rho", o.rho, "Weight of the distribution distance");
  cmd->add_option("--eta", o.eta, "Target probability of the surrogate methods");
}

pvo::scenario::ScenarioConfig with(pvo::scenario::ScenarioConfig cfg, const std::string& method,
                                   std::optional<int> degree, const Overrides& o) {
  if (!method.empty()) cfg.planner.method = pvo::planner::method_from_string(method);
  if (degree) cfg.planner.kernel.degree = *degree;
  if (o.rho) cfg.planner.rho = *o.rho;
  if (o.eta) cfg.planner.eta = *o.eta;
  if (o.seed) cfg.seed = *o.seed;
  cfg.validate();
  return cfg;
}

std::string stem(const pvo::sim::TrajectoryLog& log) {
  std::string s = log.scenario + "_" + log.method;
  if (log.method == "rkhs") s += "_d" + std::to_string(log.degree);
  return s + "_s" + std::to_string(log.seed);
}

bool infeasible(const pvo::sim::TrajectoryLog& log) {
  return log.summary.termination == pvo::sim::Termination::desired_infeasible ||
         log.summary.termination == pvo::sim::Termination::no_feasible_control;
}


}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reactive navigation under uncertainty via distribution matching"};
  app.require_subcommand(1);

  std::string out_dir = "out";
  Overrides run_o, cmp_o;
  std::string run_scenario;
  bool no_wall_clock = false;
  auto* run = app.add_subcommand("run", "Simulate one scenario");
  run->add_option("--scenario", run_scenario, "Scenario JSON file")->required();
  add_overrides(run, run_o, false);
  run->add_option("--seed", run_o.seed, "Override the scenario seed");
  run->add_option("--out", out_dir, "Output directory");
  run->add_flag("--no-wall-clock", no_wall_clock, "Omit the decision time column");

  std::vector<std::string> cmp_scenarios;
  std::size_t cmp_seeds = 10;
  std::uint64_t cmp_first_seed = 0;
  bool cmp_logs = false;
  auto* compare = app.add_subcommand("compare", "Methods x scenarios x seeds matrix");
  compare->add_option("--scenario", cmp_scenarios, "Scenario JSON file(s)")->required()->delimiter(',');
  add_overrides(compare, cmp_o, true);
  compare->add_option("--seeds", cmp_seeds, "Number of seeds per cell");
  compare->add_option("--seed", cmp_first_seed, "First seed");
  compare->add_option("--out", out_dir, "Output directory");
  compare->add_flag("--logs", cmp_logs, "Also write every per-run trajectory");

  std::string cons_scenario;
  std::vector<std::size_t> cons_n{5, 10, 20, 40};
  std::vector<int> cons_d{1, 2, 3};
  std::size_t cons_seeds = 10;
  std::uint64_t cons_first_seed = 0;
  auto* consistency = app.add_subcommand("consistency", "Embedding error against sample size");
  consistency->add_option("--scenario", cons_scenario, "Scenario JSON file")->required();
  consistency->add_option("--n", cons_n, "Sample sizes")->delimiter(',');
  consistency->add_option("--degree", cons_d, "Kernel degrees")->delimiter(',');
  consistency->add_option("--seeds", cons_seeds, "Number of seeds");
  consistency->add_option("--seed", cons_first_seed, "First seed");
  consistency->add_option("--out", out_dir, "Output directory");

  std::vector<std::string> tim_scenarios;
  std::vector<std::string> tim_methods{"rkhs", "gmm_kld"};
  std::size_t tim_repeats = 3;
  auto* timing = app.add_subcommand("timing", "Per-decision wall clock per method");
  timing->add_option("--scenario", tim_scenarios, "Scenario JSON file(s)")->required()->delimiter(',');
  timing->add_option("--method", tim_methods, "Methods")->delimiter(',');
  timing->add_option("--repeats", tim_repeats, "Decisions per method");
  timing->add_option("--out", out_dir, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto base = pvo::scenario::load_scenario(run_scenario);
      const auto cfg = with(base, run_o.methods.empty() ? "" : run_o.methods.front(),
                            run_o.degrees.empty() ? std::nullopt : std::optional<int>(run_o.degrees.front()), run_o);
      const auto log = pvo::sim::run_scenario(cfg);
      const std::string name = stem(log);
      pvo::report::write_text(std::filesystem::path(out_dir) / (name + ".csv"),
                              pvo::report::trajectory_csv(log, !no_wall_clock));
      pvo::report::write_text(std::filesystem::path(out_dir) / (name + ".json"),
                              pvo::report::summary_json(log).dump(2) + "\n");
      std::cout << pvo::report::summary_json(log).dump() << "\n";
      if (infeasible(log)) {
        std::cerr << "planner infeasible: " << log.summary.failure_message << "\n";
        return kExitInfeasible;
      }
      return 0;
    }

    if (*compare) {
      std::vector<pvo::scenario::ScenarioConfig> cells;
      for (const auto& path : cmp_scenarios) {
        const auto base = pvo::scenario::load_scenario(path);
        std::vector<std::string> methods = cmp_o.methods;
        if (methods.empty()) methods.push_back(std::string(pvo::planner::to_string(base.planner.method)));
        for (const auto& m : methods) {
          std::vector<std::optional<int>> degrees{std::nullopt};
          if (m == "rkhs" && !cmp_o.degrees.empty()) {
            degrees.clear();
            for (int d : cmp_o.degrees) degrees.emplace_back(d);
          }
          for (const auto& d : degrees) {
            for (std::size_t s = 0; s < cmp_seeds; ++s) {
              Overrides o = cmp_o;
              o.seed = cmp_first_seed + s;
              cells.push_back(with(base, m, d, o));
            }
          }
        }
      }
      std::vector<pvo::sim::TrajectoryLog> logs(cells.size());
      pvo::parallel_for(cells.size(), [&](std::size_t i) { logs[i] = pvo::sim::run_scenario(cells[i]); });
      if (cmp_logs) {
        for (const auto& log : logs) pvo::report::write_run(log, std::filesystem::path(out_dir) / "runs", stem(log));
      }
      const std::string csv = pvo::report::runs_csv(logs);
      pvo::report::write_text(std::filesystem::path(out_dir) / "compare.csv", csv);
      std::cout << csv;
      return 0;
    }

    if (*consistency) {
      const auto cfg = pvo::scenario::load_scenario(cons_scenario);
      std::vector<std::uint64_t> seeds;
      for (std::size_t s = 0; s < cons_seeds; ++s) seeds.push_back(cons_first_seed + s);
      const auto rows = pvo::sim::consistency_report(cfg, cons_n, cons_d, seeds);
      const std::string csv = pvo::report::consistency_csv(rows);
      pvo::report::write_text(std::filesystem::path(out_dir) / "consistency.csv", csv);
      std::cout << csv;
      return 0;
    }

    if (*timing) {
      std::vector<pvo::planner::Method> methods;
      for (const auto& m : tim_methods) methods.push_back(pvo::planner::method_from_string(m));
      std::vector<pvo::sim::TimingRow> rows;
      for (const auto& path : tim_scenarios) {
        const auto r = pvo::sim::benchmark_timing(pvo::scenario::load_scenario(path), methods, tim_repeats);
        rows.insert(rows.end(), r.begin(), r.end());
      }
      const std::string csv = pvo::report::timing_csv(rows);
      pvo::report::write_text(std::filesystem::path(out_dir) / "timing.csv", csv);
      std::cout << csv;
      return 0;
    }
  } catch (const pvo::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const pvo::DesiredDistributionInfeasible& e) {
    std::cerr << "planner infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const pvo::NoFeasibleControl& e) {
    std::cerr << "planner infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
