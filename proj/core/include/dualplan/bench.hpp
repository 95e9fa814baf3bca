#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dualplan/planner.hpp"

namespace dualplan {

/// One benchmark entry from the manifest.
struct BenchmarkTask {
  int task_id = 0;
  std::string name;
  std::string instruction;
  std::string graph_path;
  std::string world_path;
  int expected_single_stages = 0;
  int expected_dual_stages = 0;
};

struct TaskBenchResult {
  int task_id = 0;
  std::string name;
  int single_stages = 0;
  int dual_stages = 0;
  std::optional<int> oracle_stages;
  Outcome outcome = Outcome::Infeasible;
  int expected_single_stages = 0;
  int expected_dual_stages = 0;

  bool within_expected() const {
    return outcome == Outcome::Completed && dual_stages <= expected_dual_stages;
  }
};

struct BenchReport {
  std::vector<TaskBenchResult> tasks;  // ordered by task_id
  double stage_efficiency_pct = 0;

  bool all_within_expected() const;
  std::string to_table() const;
  std::string to_json() const;
};

/// Reads a manifest file: {"tasks": [{"task_id", "name", "instruction",
/// "graph", "world", "expected_single_stages", "expected_dual_stages"}, ...]}.
/// Fixture paths resolve relative to the manifest's directory.
std::vector<BenchmarkTask> load_benchmark_manifest(const std::string& path);

struct BenchOptions {
  PlannerConfig planner;
  bool run_oracle = true;  // exhaustive check on graphs of at most 14 nodes
  int oracle_budget = 64;
};

/// Loads, validates and plans every task, then aggregates stage efficiency.
/// Throws PlanError{FixtureInvalid} (carrying the validation summary) when a
/// fixture fails to parse or validate.
BenchReport run_benchmark(const std::vector<BenchmarkTask>& tasks, const BenchOptions& options);

}  // namespace dualplan
