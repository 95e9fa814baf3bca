#include "dualplan/bench.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dualplan/error.hpp"
#include "dualplan/io.hpp"
#include "dualplan/oracle.hpp"
#include "dualplan/validate.hpp"

namespace dualplan {

using nlohmann::json;
using nlohmann::ordered_json;

bool BenchReport::all_within_expected() const {
  return std::all_of(tasks.begin(), tasks.end(),
                     [](const TaskBenchResult& t) { return t.within_expected(); });
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PlanError(Errc::Io, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

std::vector<BenchmarkTask> load_benchmark_manifest(const std::string& path) {
  json root = json::parse(read_file(path), nullptr, false);
  if (root.is_discarded() || !root.is_object() || !root.contains("tasks") ||
      !root["tasks"].is_array()) {
    throw PlanError(Errc::Io, "manifest '" + path + "' must be {\"tasks\": [...]}");
  }
  const std::filesystem::path base = std::filesystem::path(path).parent_path();

  std::vector<BenchmarkTask> tasks;
  for (const auto& entry : root["tasks"]) {
    BenchmarkTask task;
    try {
      task.task_id = entry.at("task_id").get<int>();
      task.name = entry.at("name").get<std::string>();
      task.instruction = entry.at("instruction").get<std::string>();
      task.graph_path = (base / entry.at("graph").get<std::string>()).string();
      task.world_path = (base / entry.at("world").get<std::string>()).string();
      task.expected_single_stages = entry.at("expected_single_stages").get<int>();
      task.expected_dual_stages = entry.at("expected_dual_stages").get<int>();
    } catch (const json::exception& e) {
      throw PlanError(Errc::Io, "bad manifest entry in '" + path + "': " + e.what());
    }
    tasks.push_back(std::move(task));
  }
  std::sort(tasks.begin(), tasks.end(),
            [](const BenchmarkTask& a, const BenchmarkTask& b) { return a.task_id < b.task_id; });
  return tasks;
}

BenchReport run_benchmark(const std::vector<BenchmarkTask>& tasks, const BenchOptions& options) {
  options.planner.check();
  BenchReport report;
  std::vector<std::pair<int, int>> ratios;

  for (const BenchmarkTask& task : tasks) {
    ParseResult parsed = parse_task_graph(read_file(task.graph_path));
    if (!parsed.ok()) {
      throw PlanError(Errc::FixtureInvalid,
                      task.graph_path + " does not parse:\n" + parsed.diagnostics_text());
    }
    ValidationReport validation = validate_graph(parsed.document->graph);
    if (!validation.ok()) {
      throw PlanError(Errc::FixtureInvalid,
                      task.graph_path + " is not a valid task graph:\n" + validation.summary());
    }
    const TaskGraph& graph = parsed.document->graph;
    const WorldState world = parse_world(read_file(task.world_path));

    TaskBenchResult result;
    result.task_id = task.task_id;
    result.name = task.name;
    result.expected_single_stages = task.expected_single_stages;
    result.expected_dual_stages = task.expected_dual_stages;

    result.single_stages = single_arm_plan(graph).stage_count;
    ExecutionTrace trace = run_inference(graph, world, options.planner);
    result.outcome = trace.outcome;
    result.dual_stages = trace.stage_count;
    if (options.run_oracle && graph.nodes.size() <= 14) {
      result.oracle_stages =
          optimal_stage_oracle(graph, world, options.planner, options.oracle_budget);
    }

    if (result.dual_stages >= 1) ratios.emplace_back(result.single_stages, result.dual_stages);
    report.tasks.push_back(std::move(result));
  }

  if (!ratios.empty()) report.stage_efficiency_pct = stage_efficiency_pct(ratios);
  return report;
}

std::string BenchReport::to_table() const {
  std::ostringstream out;
  out << "task  name                      single  dual  expected  oracle  outcome\n";
  for (const auto& t : tasks) {
    char line[160];
    std::string oracle = t.oracle_stages ? std::to_string(*t.oracle_stages) : "-";
    std::snprintf(line, sizeof(line), "%-5d %-25s %6d  %4d  %8d  %6s  %s%s\n", t.task_id,
                  t.name.c_str(), t.single_stages, t.dual_stages, t.expected_dual_stages,
                  oracle.c_str(), to_string(t.outcome), t.within_expected() ? "" : "  [over]");
    out << line;
  }
  char tail[64];
  std::snprintf(tail, sizeof(tail), "stage efficiency: %.1f%%\n", stage_efficiency_pct);
  out << tail;
  return out.str();
}

std::string BenchReport::to_json() const {
  ordered_json out;
  out["tasks"] = ordered_json::array();
  for (const auto& t : tasks) {
    ordered_json j;
    j["task_id"] = t.task_id;
    j["name"] = t.name;
    j["single_stages"] = t.single_stages;
    j["dual_stages"] = t.dual_stages;
    j["oracle_stages"] = t.oracle_stages ? ordered_json(*t.oracle_stages) : ordered_json(nullptr);
    j["outcome"] = to_string(t.outcome);
    j["expected_single_stages"] = t.expected_single_stages;
    j["expected_dual_stages"] = t.expected_dual_stages;
    j["within_expected"] = t.within_expected();
    out["tasks"].push_back(std::move(j));
  }
  out["stage_efficiency_pct"] = stage_efficiency_pct;
  out["all_within_expected"] = all_within_expected();
  return out.dump(2) + "\n";
}

}  // namespace dualplan
