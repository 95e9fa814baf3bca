#include "support/builders.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "dualplan/planner.hpp"

namespace dualplan::test {
namespace {

std::vector<OccupyReleasePair> extract_pairs_or_empty(const TaskGraph& graph) {
  try {
    return extract_pairs(graph);
  } catch (const std::exception&) {
    return {};
  }
}

}  // namespace

TaskNode occupy(std::string id, std::string object) {
  TaskNode node;
  node.id = std::move(id);
  node.type = TaskType::Occupy;
  node.target_object = std::move(object);
  node.description = "grasp " + node.target_object;
  return node;
}

TaskNode release(std::string id, std::string object, std::string dest) {
  TaskNode node;
  node.id = std::move(id);
  node.type = TaskType::Release;
  node.target_object = std::move(object);
  node.destination = std::move(dest);
  node.description = "place " + node.target_object + " onto " + node.destination;
  return node;
}

TaskNode tooluse(std::string id, std::string tool, std::string target) {
  TaskNode node;
  node.id = std::move(id);
  node.type = TaskType::ToolUse;
  node.tool = std::move(tool);
  node.target_object = std::move(target);
  node.description = "use " + node.tool + " on " + node.target_object;
  return node;
}

TaskNode operate(std::string id, std::string object, int arms) {
  TaskNode node;
  node.id = std::move(id);
  node.type = TaskType::Operate;
  node.target_object = std::move(object);
  node.arms_required = arms;
  node.description = "operate " + node.target_object;
  return node;
}

TaskNode complete(std::string id) {
  TaskNode node;
  node.id = std::move(id);
  node.type = TaskType::Complete;
  node.description = "task finished";
  return node;
}

TaskGraph make_graph(std::vector<TaskNode> nodes, std::vector<Edge> edges) {
  TaskGraph graph;
  graph.nodes = std::move(nodes);
  graph.edges = std::move(edges);
  return graph;
}

TaskGraph minimal_pair_graph(const std::string& object, const std::string& dest) {
  return make_graph({occupy("occupy-" + object, object),
                     release("release-" + object, object, dest), complete()},
                    {{"occupy-" + object, "release-" + object}, {"release-" + object, "complete"}});
}

WorldState world_for(const TaskGraph& graph) {
  WorldState world;
  world.left_hand = {-0.22, 0.0, 0.15};
  world.right_hand = {0.22, 0.0, 0.15};
  std::vector<std::string> names;
  std::set<std::string> seen;
  auto note = [&](const std::string& name) {
    if (!name.empty() && seen.insert(name).second) names.push_back(name);
  };
  // Same authorship convention as the checked-in worlds: controls (targets of
  // standalone Operate steps, like a drawer front) sit closest to the robot,
  // then grasped objects in task order alternating sides, and destinations or
  // wiped surfaces at the back.
  std::set<std::string> in_pair;
  for (const auto& pair : extract_pairs_or_empty(graph)) {
    for (const auto& id : pair.path_ids) in_pair.insert(id);
  }
  for (const auto& node : graph.nodes) {
    if (node.type == TaskType::Operate && !in_pair.count(node.id)) note(node.target_object);
  }
  for (const auto& node : graph.nodes) {
    if (node.type == TaskType::Occupy) note(node.target_object);
  }
  for (const auto& node : graph.nodes) {
    note(node.target_object);
    note(node.tool);
    note(node.destination);
  }
  for (std::size_t i = 0; i < names.size(); ++i) {
    const double side = (i % 2 == 0) ? -1.0 : 1.0;
    const double x = side * (0.10 + 0.02 * static_cast<double>(i / 2));
    const double y = 0.24 + 0.07 * static_cast<double>(i / 2);
    world.objects[names[i]] = {x, y, 0.0};
  }
  return world;
}

PlannerConfig permissive_config() {
  PlannerConfig config;
  config.d_reachable = 100.0;
  config.d_across = 0.0;
  return config;
}

std::string fixture_path(const std::string& name) {
  return std::string(DUALPLAN_FIXTURES) + "/" + name;
}

std::string read_fixture(const std::string& name) {
  std::ifstream in(fixture_path(name), std::ios::binary);
  if (!in) throw std::runtime_error("missing fixture: " + name);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

GraphDocument load_fixture_graph(const std::string& name) {
  ParseResult parsed = parse_task_graph(read_fixture(name + ".taskgraph.json"));
  if (!parsed.ok()) {
    throw std::runtime_error("fixture " + name + " does not parse:\n" +
                             parsed.diagnostics_text());
  }
  return std::move(*parsed.document);
}

WorldState load_fixture_world(const std::string& name) {
  return parse_world(read_fixture(name + ".world.json"));
}

}  // namespace dualplan::test
