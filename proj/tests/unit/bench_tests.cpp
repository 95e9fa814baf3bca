#include <doctest.h>

#include <fstream>

#include "dualplan/bench.hpp"
#include "dualplan/config.hpp"
#include "dualplan/error.hpp"
#include "support/builders.hpp"

using namespace dualplan;
using namespace dualplan::test;

namespace {

std::vector<BenchmarkTask> manifest() {
  return load_benchmark_manifest(fixture_path("benchmark.json"));
}

}  // namespace

TEST_CASE("the manifest lists the five kitchen tasks with 44 sub-tasks") {
  auto tasks = manifest();
  REQUIRE(tasks.size() == 5);
  const int expected_single[] = {8, 11, 6, 12, 7};
  int total_nodes = 0;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    CHECK(tasks[i].task_id == static_cast<int>(i) + 1);
    CHECK(tasks[i].expected_single_stages == expected_single[i]);
    GraphDocument doc = load_fixture_graph("task" + std::to_string(i + 1));
    CHECK(doc.instruction == tasks[i].instruction);
    int non_terminal = 0;
    for (const auto& node : doc.graph.nodes) {
      if (node.type != TaskType::Complete) ++non_terminal;
    }
    CHECK(non_terminal == expected_single[i]);
    total_nodes += non_terminal;
  }
  CHECK(total_nodes == 44);
}

TEST_CASE("the default benchmark reproduces the published stage counts") {
  BenchOptions options;
  BenchReport report = run_benchmark(manifest(), options);
  REQUIRE(report.tasks.size() == 5);
  const int expected_dual[] = {4, 7, 4, 7, 4};
  const int expected_single[] = {8, 11, 6, 12, 7};
  for (std::size_t i = 0; i < report.tasks.size(); ++i) {
    CHECK(report.tasks[i].dual_stages == expected_dual[i]);
    CHECK(report.tasks[i].single_stages == expected_single[i]);
    CHECK(report.tasks[i].outcome == Outcome::Completed);
    REQUIRE(report.tasks[i].oracle_stages.has_value());
    CHECK(*report.tasks[i].oracle_stages == expected_dual[i]);
  }
  CHECK(report.stage_efficiency_pct == doctest::Approx(170.714).epsilon(0.001));
  CHECK(report.all_within_expected());
}

TEST_CASE("zero reach drives efficiency to exactly 100 percent") {
  BenchOptions options;
  options.planner.d_reachable = 0.0;
  options.planner.d_across = 0.0;
  options.run_oracle = false;
  BenchReport report = run_benchmark(manifest(), options);
  for (const auto& task : report.tasks) {
    CHECK(task.dual_stages == task.single_stages);
  }
  CHECK(report.stage_efficiency_pct == doctest::Approx(100.0));
  CHECK_FALSE(report.all_within_expected());
}

TEST_CASE("stage counts hold for thresholds 25 percent either way") {
  for (double scale : {0.75, 1.25}) {
    BenchOptions options;
    options.planner.d_reachable = 0.8 * scale;
    options.planner.d_across = 0.15 * scale;
    options.run_oracle = false;
    BenchReport report = run_benchmark(manifest(), options);
    for (const auto& task : report.tasks) {
      CHECK(task.dual_stages == task.expected_dual_stages);
    }
  }
}

TEST_CASE("broken fixtures raise FIXTURE_INVALID with the report attached") {
  auto tasks = manifest();
  tasks[0].graph_path = fixture_path("invalid-missing-release.taskgraph.json");
  try {
    run_benchmark(tasks, BenchOptions{});
    FAIL("expected FIXTURE_INVALID");
  } catch (const PlanError& e) {
    CHECK(e.code() == Errc::FixtureInvalid);
    CHECK(std::string(e.what()).find("UNMATCHED_OCCUPY") != std::string::npos);
  }
}

TEST_CASE("benchmark reports are byte-stable") {
  BenchOptions options;
  BenchReport a = run_benchmark(manifest(), options);
  BenchReport b = run_benchmark(manifest(), options);
  CHECK(a.to_json() == b.to_json());
  CHECK(a.to_table() == b.to_table());
}

TEST_CASE("app config parsing") {
  AppConfig config = parse_app_config(R"({
    "planner": {"d_reachable_m": 0.9, "d_across_m": 0.1, "allow_idle_arm": false,
                "tie_break": "lexicographic"},
    "sim": {"occupy_s": 2.5},
    "provider": {"url": "http://localhost:1234/v1/chat/completions", "model": "m",
                 "auth_env": "TOKEN_VAR", "timeout_s": 5},
    "bench": {"manifest": "elsewhere/benchmark.json"}
  })");
  CHECK(config.planner.d_reachable == doctest::Approx(0.9));
  CHECK(config.planner.d_across == doctest::Approx(0.1));
  CHECK_FALSE(config.planner.allow_idle_arm);
  CHECK(config.planner.occupy_duration_s == doctest::Approx(2.5));
  CHECK(config.provider.model == "m");
  CHECK(config.provider.auth_env == "TOKEN_VAR");
  CHECK(config.bench_manifest == "elsewhere/benchmark.json");

  CHECK_THROWS_AS(parse_app_config("not json"), PlanError);
  CHECK_THROWS_AS(parse_app_config(R"({"planner": {"tie_break": "random"}})"), PlanError);
  CHECK_THROWS_AS(parse_app_config(R"({"planner": {"d_reachable_m": 0.1, "d_across_m": 0.5}})"),
                  PlanError);
}
