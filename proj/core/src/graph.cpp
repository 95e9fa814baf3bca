#include "dualplan/graph.hpp"

#include <algorithm>
#include <deque>

namespace dualplan {

const char* to_string(TaskType type) {
  switch (type) {
    case TaskType::Occupy: return "Occupy";
    case TaskType::ToolUse: return "ToolUse";
    case TaskType::Release: return "Release";
    case TaskType::Operate: return "Operate";
    case TaskType::Complete: return "Complete";
  }
  return "?";
}

std::optional<TaskType> task_type_from_string(std::string_view text) {
  if (text == "Occupy") return TaskType::Occupy;
  if (text == "ToolUse") return TaskType::ToolUse;
  if (text == "Release") return TaskType::Release;
  if (text == "Operate") return TaskType::Operate;
  if (text == "Complete") return TaskType::Complete;
  return std::nullopt;
}

const char* to_string(Arm arm) { return arm == Arm::Left ? "left" : "right"; }

Arm other_arm(Arm arm) { return arm == Arm::Left ? Arm::Right : Arm::Left; }

const TaskNode* TaskGraph::find(std::string_view id) const {
  for (const auto& node : nodes) {
    if (node.id == id) return &node;
  }
  return nullptr;
}

std::vector<std::string> TaskGraph::node_ids() const {
  std::vector<std::string> ids;
  ids.reserve(nodes.size());
  for (const auto& node : nodes) ids.push_back(node.id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

const TaskNode* TaskGraph::complete_node() const {
  const TaskNode* found = nullptr;
  for (const auto& node : nodes) {
    if (node.type != TaskType::Complete) continue;
    if (found != nullptr) return nullptr;
    found = &node;
  }
  return found;
}

bool structurally_equal(const TaskGraph& a, const TaskGraph& b) {
  if (a.nodes.size() != b.nodes.size() || a.edges.size() != b.edges.size()) return false;

  auto sorted_nodes = [](const TaskGraph& g) {
    std::vector<TaskNode> nodes = g.nodes;
    std::sort(nodes.begin(), nodes.end(),
              [](const TaskNode& x, const TaskNode& y) { return x.id < y.id; });
    return nodes;
  };
  auto sorted_edges = [](const TaskGraph& g) {
    std::vector<Edge> edges = g.edges;
    std::sort(edges.begin(), edges.end());
    return edges;
  };
  return sorted_nodes(a) == sorted_nodes(b) && sorted_edges(a) == sorted_edges(b);
}

GraphIndex::GraphIndex(const TaskGraph& graph) {
  for (const auto& node : graph.nodes) {
    succs_[node.id];
    preds_[node.id];
  }
  for (const auto& [from, to] : graph.edges) {
    auto s = succs_.find(from);
    auto p = preds_.find(to);
    if (s == succs_.end() || p == preds_.end()) continue;  // dangling, validator's problem
    if (std::find(s->second.begin(), s->second.end(), to) == s->second.end()) {
      s->second.push_back(to);
      p->second.push_back(from);
    }
  }
  for (auto& [id, list] : succs_) std::sort(list.begin(), list.end());
  for (auto& [id, list] : preds_) std::sort(list.begin(), list.end());
}

const std::vector<std::string>& GraphIndex::predecessors(const std::string& id) const {
  auto it = preds_.find(id);
  return it == preds_.end() ? empty_ : it->second;
}

const std::vector<std::string>& GraphIndex::successors(const std::string& id) const {
  auto it = succs_.find(id);
  return it == succs_.end() ? empty_ : it->second;
}

namespace {

std::set<std::string> closure(const std::map<std::string, std::vector<std::string>>& adj,
                              const std::string& start) {
  std::set<std::string> seen;
  std::deque<std::string> queue;
  queue.push_back(start);
  while (!queue.empty()) {
    std::string cur = queue.front();
    queue.pop_front();
    auto it = adj.find(cur);
    if (it == adj.end()) continue;
    for (const auto& next : it->second) {
      if (seen.insert(next).second) queue.push_back(next);
    }
  }
  seen.erase(start);
  return seen;
}

}  // namespace

std::set<std::string> GraphIndex::ancestors(const std::string& id) const {
  return closure(preds_, id);
}

std::set<std::string> GraphIndex::descendants(const std::string& id) const {
  return closure(succs_, id);
}

bool GraphIndex::reaches(const std::string& from, const std::string& to) const {
  return shortest_path_length(from, to).has_value();
}

std::optional<int> GraphIndex::shortest_path_length(const std::string& from,
                                                    const std::string& to) const {
  if (from == to) return 0;
  std::map<std::string, int> dist;
  std::deque<std::string> queue;
  dist[from] = 0;
  queue.push_back(from);
  while (!queue.empty()) {
    std::string cur = queue.front();
    queue.pop_front();
    auto it = succs_.find(cur);
    if (it == succs_.end()) continue;
    for (const auto& next : it->second) {
      if (dist.count(next)) continue;
      dist[next] = dist[cur] + 1;
      if (next == to) return dist[next];
      queue.push_back(next);
    }
  }
  return std::nullopt;
}

}  // namespace dualplan
