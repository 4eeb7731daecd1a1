// Benchmark-runner CLI: closed-loop runs over scenario files, result-set
// comparison, and standalone evaluation of externally produced trajectories.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "roadbench/roadbench.hpp"

namespace fs = std::filesystem;
using namespace roadbench;

namespace {

std::vector<std::string> collect_scenarios(const std::string& input) {
  std::vector<std::string> files;
  fs::path p(input);
  if (fs::is_directory(p)) {
    for (const auto& e : fs::directory_iterator(p)) {
      if (e.path().extension() == ".rbs") files.push_back(e.path().string());
    }
    std::sort(files.begin(), files.end());
  } else {
    files.push_back(input);
  }
  return files;
}

void print_cluster_table(const std::vector<ClusterRow>& rows) {
  std::printf("%-16s %6s %7s %10s %10s %10s\n", "cluster", "total", "solved", "mean", "std",
              "worst");
  for (const auto& r : rows) {
    if (r.solved > 0) {
      std::printf("%-16s %6d %7d %10.3f %10.3f %10.3f\n", r.cluster.c_str(), r.total, r.solved,
                  r.mean, r.stddev, r.worst);
    } else {
      std::printf("%-16s %6d %7d %10s %10s %10s\n", r.cluster.c_str(), r.total, r.solved, "-", "-",
                  "-");
    }
  }
}

void print_partition(const CoveragePartition& p) {
  std::printf("coverage over %d scenarios:\n", p.total());
  std::printf("  both    %4d (%s%%)\n", p.both, CoveragePartition::format_pct(p.pct_tenths[0]).c_str());
  std::printf("  only_A  %4d (%s%%)\n", p.only_a,
              CoveragePartition::format_pct(p.pct_tenths[1]).c_str());
  std::printf("  only_B  %4d (%s%%)\n", p.only_b,
              CoveragePartition::format_pct(p.pct_tenths[2]).c_str());
  std::printf("  neither %4d (%s%%)\n", p.neither,
              CoveragePartition::format_pct(p.pct_tenths[3]).c_str());
}

int cmd_run(const std::string& input, const std::string& config_path, double budget_s, int workers,
            std::optional<std::uint64_t> seed, const std::string& out_path,
            const std::string& render_dir) {
  HarnessConfig cfg;
  if (!config_path.empty()) cfg = load_config(config_path);
  cfg.seed = seed;

  auto files = collect_scenarios(input);
  if (files.empty()) {
    std::cerr << "no .rbs scenarios found under '" << input << "'\n";
    return 1;
  }
  SuiteReport report = run_suite(files, cfg, budget_s, workers);
  write_results_csv(report.records, out_path);

  if (!render_dir.empty()) {
    fs::create_directories(render_dir);
    for (const auto& f : files) {
      try {
        Scenario sc = load_scenario(f);
        const Trajectory* executed = nullptr;
        for (const auto& r : report.records) {
          if (r.scenario_id == sc.id && r.executed.states.size() > 1) {
            executed = &r.executed;
            break;
          }
        }
        render_scenario_svg(sc, executed, (fs::path(render_dir) / (sc.id + ".svg")).string());
      } catch (const std::exception& e) {
        std::cerr << "render skipped for " << f << ": " << e.what() << "\n";
      }
    }
  }

  int solved = 0;
  for (const auto& r : report.records)
    if (r.outcome == Outcome::solved) ++solved;
  std::printf("%d/%zu solved, results written to %s\n", solved, report.records.size(),
              out_path.c_str());
  print_cluster_table(report.cluster_rows);
  return 0;
}

int cmd_compare(const std::string& a_path, const std::string& b_path, const std::string& out_path) {
  auto a = read_results_csv(a_path);
  auto b = read_results_csv(b_path);
  CompareReport report = compare_results(a, b);
  print_partition(report.partition);
  std::printf("\ncommon-set statistics:\n");
  std::printf("%-16s %6s %6s %-10s %10s %10s %10s\n", "cluster", "total", "both", "competitor",
              "mean", "std", "worst");
  for (const auto& r : report.rows) {
    std::printf("%-16s %6d %6d %-10s %10.3f %10.3f %10.3f\n", r.cluster.c_str(), r.total,
                r.solved_by_both, "A", r.mean_a, r.std_a, r.worst_a);
    std::printf("%-16s %6s %6s %-10s %10.3f %10.3f %10.3f\n", "", "", "", "B", r.mean_b, r.std_b,
                r.worst_b);
  }
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    out << "cluster,total,solved_by_both,competitor,mean,std,worst\n";
    for (const auto& r : report.rows) {
      out << r.cluster << ',' << r.total << ',' << r.solved_by_both << ",A,"
          << format_double(r.mean_a) << ',' << format_double(r.std_a) << ','
          << format_double(r.worst_a) << "\n";
      out << r.cluster << ',' << r.total << ',' << r.solved_by_both << ",B,"
          << format_double(r.mean_b) << ',' << format_double(r.std_b) << ','
          << format_double(r.worst_b) << "\n";
    }
    std::printf("report written to %s\n", out_path.c_str());
  }
  return 0;
}

int cmd_score(const std::string& scenario_path, const std::string& trajectory_path) {
  Scenario sc = load_scenario(scenario_path);
  Trajectory traj = read_trajectory_csv(trajectory_path);
  const auto& params = sc.vehicle_parameters;
  const auto& pp = sc.planning_problem;

  FeasibilityVerdict verdict = check_feasibility(traj, sc, params);
  bool reached = false;
  for (size_t i = 0; i < traj.states.size() && !reached; ++i)
    reached = goal_reached(pp, traj.states[i], traj.t0_step + static_cast<int>(i));

  std::printf("collision_free:         %s\n", verdict.collision_free ? "yes" : "no");
  if (!verdict.collision_free)
    std::printf("  first collision: step %d, obstacle %d\n", verdict.first_collision_step,
                verdict.first_collision_obstacle);
  std::printf("kinematically_feasible: %s\n", verdict.kinematically_feasible ? "yes" : "no");
  if (!verdict.kinematically_feasible)
    std::printf("  first violation: step %d, bound %s\n", verdict.first_kinematic_step,
                verdict.violated_bound.c_str());
  std::printf("road_compliant:         %s\n", verdict.road_compliant ? "yes" : "no");
  if (!verdict.road_compliant)
    std::printf("  first off-road step: %d\n", verdict.first_offroad_step);
  std::printf("goal_reached:           %s\n", reached ? "yes" : "no");

  if (verdict.feasible() && traj.states.size() >= 4) {
    CostReport cost = tr1_cost(traj, sc, pp.time_step);
    std::printf("J_jerk = %.6f\nJ_SR   = %.6f\nJ_D    = %.6f\nJ_LC   = %.6f\nJ_ego  = %.6f\n",
                cost.J_jerk, cost.J_SR, cost.J_D, cost.J_LC, cost.J_ego);
  }
  return verdict.feasible() && reached ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"roadbench: closed-loop motion-planning benchmark runner"};
  app.require_subcommand(1);

  std::string input, config_path, out_path = "results.csv", render_dir;
  double budget_s = 21600.0;
  int workers = 1;
  std::optional<std::uint64_t> seed;

  auto* run = app.add_subcommand("run", "run one scenario file or a directory of .rbs files");
  run->add_option("input", input, "scenario file or directory")->required();
  run->add_option("--config", config_path, "JSON config file");
  run->add_option("--budget-s", budget_s, "global wall-clock budget in seconds");
  run->add_option("--workers", workers, "number of worker threads");
  std::uint64_t seed_value = 0;
  auto* seed_opt = run->add_option("--seed", seed_value,
                                   "pin deterministic output (also zeroes wall-time fields)");
  run->add_option("--out", out_path, "results CSV path");
  run->add_option("--render", render_dir, "write one SVG per scenario into this directory");

  std::string a_path, b_path, report_path;
  auto* compare = app.add_subcommand("compare", "compare two result CSVs");
  compare->add_option("A", a_path, "results CSV of planner A")->required();
  compare->add_option("B", b_path, "results CSV of planner B")->required();
  compare->add_option("--out", report_path, "write the common-set report CSV here");

  std::string scenario_path, trajectory_path;
  auto* score = app.add_subcommand("score", "evaluate an externally produced trajectory");
  score->add_option("scenario", scenario_path, "scenario .rbs file")->required();
  score->add_option("trajectory", trajectory_path, "trajectory CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      if (seed_opt->count() > 0) seed = seed_value;
      return cmd_run(input, config_path, budget_s, workers, seed, out_path, render_dir);
    }
    if (compare->parsed()) return cmd_compare(a_path, b_path, report_path);
    if (score->parsed()) return cmd_score(scenario_path, trajectory_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
