#include <doctest.h>

#include "dualplan/oracle.hpp"
#include "dualplan/planner.hpp"
#include "support/builders.hpp"
#include "support/random_graphs.hpp"

using namespace dualplan;
using namespace dualplan::test;

TEST_CASE("the bowl stack needs exactly four stages") {
  TaskGraph graph = load_fixture_graph("task3").graph;
  WorldState world = load_fixture_world("task3");
  auto minimum = optimal_stage_oracle(graph, world, PlannerConfig{}, 16);
  REQUIRE(minimum.has_value());
  CHECK(*minimum == 4);
  CHECK(run_inference(graph, world, PlannerConfig{}).stage_count == *minimum);
}

TEST_CASE("a dependent chain has no parallelism to find") {
  TaskGraph graph = make_graph(
      {operate("s1", "k1"), operate("s2", "k2"), operate("s3", "k3"), operate("s4", "k4"),
       complete()},
      {{"s1", "s2"}, {"s2", "s3"}, {"s3", "s4"}, {"s4", "complete"}});
  auto minimum = optimal_stage_oracle(graph, world_for(graph), permissive_config(), 16);
  REQUIRE(minimum.has_value());
  CHECK(*minimum == 4);
}

TEST_CASE("two independent pairs run fully parallel") {
  TaskGraph graph = make_graph(
      {occupy("grasp-a", "a"), release("put-a", "a", "bin"), occupy("grasp-b", "b"),
       release("put-b", "b", "bin"), complete()},
      {{"grasp-a", "put-a"}, {"grasp-b", "put-b"}, {"put-a", "complete"}, {"put-b", "complete"}});
  auto minimum = optimal_stage_oracle(graph, world_for(graph), permissive_config(), 16);
  REQUIRE(minimum.has_value());
  CHECK(*minimum == 2);
}

TEST_CASE("the oracle respects the geometry band") {
  TaskGraph graph = make_graph(
      {occupy("grasp-a", "a"), release("put-a", "a", "bin"), occupy("grasp-b", "b"),
       release("put-b", "b", "bin"), complete()},
      {{"grasp-a", "put-a"}, {"grasp-b", "put-b"}, {"put-a", "complete"}, {"put-b", "complete"}});
  WorldState world = world_for(graph);
  PlannerConfig config;
  config.d_reachable = 0.0;  // nothing pairs up
  config.d_across = 0.0;
  auto minimum = optimal_stage_oracle(graph, world, config, 16);
  REQUIRE(minimum.has_value());
  CHECK(*minimum == 4);
}

TEST_CASE("a too-small budget yields UNKNOWN") {
  TaskGraph graph = load_fixture_graph("task2").graph;
  WorldState world = load_fixture_world("task2");
  CHECK_FALSE(optimal_stage_oracle(graph, world, PlannerConfig{}, 3).has_value());
}

TEST_CASE("oversized graphs are out of the oracle's reach") {
  std::vector<TaskNode> nodes;
  std::vector<Edge> edges;
  for (int i = 0; i < 15; ++i) {
    nodes.push_back(operate("n" + std::to_string(i), "k" + std::to_string(i)));
    edges.emplace_back("n" + std::to_string(i), "complete");
  }
  nodes.push_back(complete());
  TaskGraph graph = make_graph(std::move(nodes), std::move(edges));
  CHECK_FALSE(optimal_stage_oracle(graph, world_for(graph), permissive_config(), 32).has_value());
}

TEST_CASE("executor matches the oracle on every benchmark fixture") {
  for (const char* name : {"task1", "task2", "task3", "task4", "task5"}) {
    TaskGraph graph = load_fixture_graph(name).graph;
    WorldState world = load_fixture_world(name);
    const int budget = single_arm_plan(graph).stage_count + 2;
    auto minimum = optimal_stage_oracle(graph, world, PlannerConfig{}, budget);
    ExecutionTrace trace = run_inference(graph, world, PlannerConfig{});
    REQUIRE(minimum.has_value());
    CHECK(trace.stage_count == *minimum);
  }
}

TEST_CASE("executor stays between the oracle and the single-arm bound") {
  Rng rng(31337);
  int optimal_hits = 0, total = 0;
  for (int round = 0; round < 80; ++round) {
    TaskGraph graph = random_valid_graph(rng);
    WorldState world = world_for(graph);
    PlannerConfig config = permissive_config();
    const int single = single_arm_plan(graph).stage_count;
    auto minimum = optimal_stage_oracle(graph, world, config, single + 2);
    ExecutionTrace trace = run_inference(graph, world, config);
    REQUIRE(trace.outcome == Outcome::Completed);
    REQUIRE(minimum.has_value());
    CHECK(trace.stage_count >= *minimum);
    CHECK(trace.stage_count <= single);
    ++total;
    if (trace.stage_count == *minimum) ++optimal_hits;
  }
  CHECK(optimal_hits * 100 >= total * 90);  // spot check; the acceptance suite runs the full bar
}
