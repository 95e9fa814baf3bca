// End-to-end acceptance suite. Each case prints one PASS/FAIL line; doctest
// failure output carries the details when something regresses.

#include <doctest.h>

#include <chrono>
#include <cstdio>

#include "dualplan/bench.hpp"
#include "dualplan/generator.hpp"
#include "dualplan/oracle.hpp"
#include "dualplan/planner.hpp"
#include "dualplan/validate.hpp"
#include "support/brute.hpp"
#include "support/builders.hpp"
#include "support/random_graphs.hpp"

using namespace dualplan;
using namespace dualplan::test;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Verdict {
  const char* name;
  bool passed = false;
  ~Verdict() { std::printf("[%s] %s\n", passed ? "PASS" : "FAIL", name); }
};

const char* kFixtureNames[] = {"task1", "task2", "task3", "task4", "task5"};
const int kExpectedSingle[] = {8, 11, 6, 12, 7};
const int kExpectedDual[] = {4, 7, 4, 7, 4};

}  // namespace

TEST_CASE("criterion 1: benchmark stage counts match the published rows") {
  Verdict verdict{"criterion 1: stage counts (4,7,4,7,4) vs single (8,11,6,12,7), < 1 s"};
  const auto start = Clock::now();
  for (int i = 0; i < 5; ++i) {
    TaskGraph graph = load_fixture_graph(kFixtureNames[i]).graph;
    WorldState world = load_fixture_world(kFixtureNames[i]);
    ExecutionTrace trace = run_inference(graph, world, PlannerConfig{});
    REQUIRE(trace.outcome == Outcome::Completed);
    CHECK(trace.stage_count == kExpectedDual[i]);
    CHECK(single_arm_plan(graph).stage_count == kExpectedSingle[i]);
  }
  const double elapsed = seconds_since(start);
  CHECK(elapsed < 1.0);
  verdict.passed = true;
}

TEST_CASE("criterion 2: stage efficiency arithmetic") {
  Verdict verdict{"criterion 2: stage efficiency 170.7% +/- 0.1 (identities 100%, 200%)"};
  std::vector<std::pair<int, int>> ratios;
  for (int i = 0; i < 5; ++i) {
    TaskGraph graph = load_fixture_graph(kFixtureNames[i]).graph;
    WorldState world = load_fixture_world(kFixtureNames[i]);
    ratios.emplace_back(single_arm_plan(graph).stage_count,
                        run_inference(graph, world, PlannerConfig{}).stage_count);
  }
  const double efficiency = stage_efficiency_pct(ratios);
  CHECK(efficiency > 170.6);
  CHECK(efficiency < 170.8);
  CHECK(stage_efficiency_pct({{6, 6}}) == doctest::Approx(100.0));
  CHECK(stage_efficiency_pct({{8, 4}}) == doctest::Approx(200.0));
  verdict.passed = true;
}

TEST_CASE("criterion 3: executor optimality against the exhaustive oracle") {
  Verdict verdict{"criterion 3: oracle-optimal on fixtures, >= 95% on 500 random graphs, < 60 s"};
  const auto start = Clock::now();
  for (int i = 0; i < 5; ++i) {
    TaskGraph graph = load_fixture_graph(kFixtureNames[i]).graph;
    WorldState world = load_fixture_world(kFixtureNames[i]);
    REQUIRE(graph.nodes.size() <= 14);
    const int budget = single_arm_plan(graph).stage_count + 2;
    auto minimum = optimal_stage_oracle(graph, world, PlannerConfig{}, budget);
    REQUIRE(minimum.has_value());
    CHECK(run_inference(graph, world, PlannerConfig{}).stage_count == *minimum);
  }

  Rng rng(1234567);
  const PlannerConfig config = permissive_config();
  int optimal = 0;
  const int total = 500;
  for (int round = 0; round < total; ++round) {
    TaskGraph graph = random_valid_graph(rng, 10);
    WorldState world = world_for(graph);
    const int single = single_arm_plan(graph).stage_count;
    ExecutionTrace trace = run_inference(graph, world, config);
    REQUIRE(trace.outcome == Outcome::Completed);
    auto minimum = optimal_stage_oracle(graph, world, config, single + 2);
    REQUIRE(minimum.has_value());
    CHECK(trace.stage_count >= *minimum);
    CHECK(trace.stage_count <= single);
    if (trace.stage_count == *minimum) ++optimal;
  }
  CHECK(optimal * 100 >= 95 * total);
  const double elapsed = seconds_since(start);
  CHECK(elapsed < 60.0);
  verdict.passed = true;
}

TEST_CASE("criterion 4: deadlock freedom on random valid graphs") {
  Verdict verdict{"criterion 4: 1000 random valid graphs all complete, < 120 s"};
  const auto start = Clock::now();
  Rng rng(20250810);
  const PlannerConfig config = permissive_config();
  int deadlocks = 0;
  for (int round = 0; round < 1000; ++round) {
    TaskGraph graph = random_valid_graph(rng, 10);
    REQUIRE(validate_graph(graph).ok());
    ExecutionTrace trace = run_inference(graph, world_for(graph), config);
    if (trace.outcome != Outcome::Completed) ++deadlocks;
  }
  CHECK(deadlocks == 0);
  const double elapsed = seconds_since(start);
  CHECK(elapsed < 120.0);
  verdict.passed = true;
}

TEST_CASE("criterion 5: validator agrees with the brute-force checker") {
  Verdict verdict{"criterion 5: 0 disagreements on 250 mutated fixtures"};
  Rng rng(424242);
  int disagreements = 0;
  int invalid = 0;
  const int total = 250;
  for (int round = 0; round < total; ++round) {
    TaskGraph graph = mutate(load_fixture_graph(kFixtureNames[round % 5]).graph, rng);
    const bool validator_ok = validate_graph(graph).ok();
    const bool brute_ok = brute_force_valid(graph);
    if (validator_ok != brute_ok) ++disagreements;
    if (!brute_ok) ++invalid;
  }
  CHECK(disagreements == 0);
  CHECK(invalid > total / 4);  // the corpus does exercise failures
  verdict.passed = true;
}

TEST_CASE("criterion 6: the documented task 2 walk-through") {
  Verdict verdict{"criterion 6: task 2 stage 1 = (open-drawer, grasp-apple), stage 3 = "
                  "(place-mug-into-drawer, grasp-lemon)"};
  TaskGraph graph = load_fixture_graph("task2").graph;
  WorldState world = load_fixture_world("task2");
  ExecutionTrace trace = run_inference(graph, world, PlannerConfig{});
  REQUIRE(trace.outcome == Outcome::Completed);
  REQUIRE(trace.stages.size() >= 3);
  CHECK(trace.stages[0].plan.left == "open-drawer");
  CHECK(trace.stages[0].plan.right == "grasp-apple");
  CHECK(trace.stages[2].plan.left == "place-mug-into-drawer");
  CHECK(trace.stages[2].plan.right == "grasp-lemon");
  verdict.passed = true;
}

TEST_CASE("criterion 7: every dual assignment respects the geometry band") {
  Verdict verdict{"criterion 7: zero band violations across fixture and random traces"};
  int violations = 0;

  for (int i = 0; i < 5; ++i) {
    TaskGraph graph = load_fixture_graph(kFixtureNames[i]).graph;
    WorldState world = load_fixture_world(kFixtureNames[i]);
    PlannerConfig config;
    ExecutionTrace trace = run_inference(graph, world, config);
    violations += count_band_violations(graph, world, trace, config);
  }

  Rng rng(777);
  const PlannerConfig config = permissive_config();
  for (int round = 0; round < 500; ++round) {
    TaskGraph graph = random_valid_graph(rng, 10);
    WorldState world = world_for(graph);
    ExecutionTrace trace = run_inference(graph, world, config);
    violations += count_band_violations(graph, world, trace, config);
  }
  CHECK(violations == 0);
  verdict.passed = true;
}

TEST_CASE("criterion 8: the validate-reflect-regenerate loop") {
  Verdict verdict{"criterion 8: reflection accepts on attempt 2; prose fails after max_attempts"};
  GenerationRequest request;
  request.instruction = "Put the mug away.";
  request.environment_description = "Objects: mug (near left); shelf (far left).";
  request.max_attempts = 3;

  GraphDocument bad;
  bad.task_name = "put away";
  bad.instruction = request.instruction;
  bad.graph = make_graph({occupy("grasp-mug", "mug"), complete()}, {{"grasp-mug", "complete"}});
  GraphDocument good = bad;
  good.graph = make_graph(
      {occupy("grasp-mug", "mug"), release("place-mug", "mug", "shelf"), complete()},
      {{"grasp-mug", "place-mug"}, {"place-mug", "complete"}});

  ScriptedProvider fixes({"```json\n" + serialize_task_graph(bad) + "```",
                          "```json\n" + serialize_task_graph(good) + "```"});
  GenerationResult result = generate_graph(request, fixes);
  REQUIRE(result.ok());
  REQUIRE(result.exchanges.size() == 2);
  CHECK_FALSE(result.exchanges[0].accepted);
  CHECK(result.exchanges[1].accepted);
  bool unmatched_logged = false;
  for (const auto& d : result.exchanges[0].diagnostics) {
    if (d.code == codes::kUnmatchedOccupy) unmatched_logged = true;
  }
  CHECK(unmatched_logged);
  CHECK(validate_graph(result.document->graph).ok());

  ScriptedProvider prose({"Let me think about this task instead of answering."});
  GenerationResult failure = generate_graph(request, prose);
  CHECK(failure.status == GenerationStatus::AttemptsExhausted);
  CHECK(static_cast<int>(failure.exchanges.size()) == request.max_attempts);
  verdict.passed = true;
}

TEST_CASE("criterion 9: determinism and round-trips") {
  Verdict verdict{"criterion 9: byte-identical reruns; parse(serialize(d)) = d on 1000 documents"};
  for (int i = 0; i < 5; ++i) {
    GraphDocument doc = load_fixture_graph(kFixtureNames[i]);
    WorldState world = load_fixture_world(kFixtureNames[i]);
    ExecutionTrace a = run_inference(doc.graph, world, PlannerConfig{});
    ExecutionTrace b = run_inference(doc.graph, world, PlannerConfig{});
    CHECK(a.to_jsonl() == b.to_jsonl());
    ParseResult reparsed = parse_task_graph(serialize_task_graph(doc));
    REQUIRE(reparsed.ok());
    CHECK(structurally_equal(*reparsed.document, doc));
  }

  auto tasks = load_benchmark_manifest(fixture_path("benchmark.json"));
  BenchOptions options;
  CHECK(run_benchmark(tasks, options).to_json() == run_benchmark(tasks, options).to_json());

  Rng rng(987654321);
  for (int round = 0; round < 1000; ++round) {
    GraphDocument doc = random_document(rng);
    ParseResult parsed = parse_task_graph(serialize_task_graph(doc));
    REQUIRE(parsed.ok());
    CHECK(structurally_equal(*parsed.document, doc));
  }
  verdict.passed = true;
}
