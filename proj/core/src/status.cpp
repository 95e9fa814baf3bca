#include "dualplan/status.hpp"

#include "dualplan/error.hpp"

namespace dualplan {

const char* to_string(NodeStatus status) {
  switch (status) {
    case NodeStatus::Pending: return "Pending";
    case NodeStatus::Ready: return "Ready";
    case NodeStatus::Done: return "Done";
  }
  return "?";
}

StatusMap initial_status(const TaskGraph& graph) {
  StatusMap status;
  for (const auto& node : graph.nodes) status[node.id] = NodeStatus::Pending;
  return mark_done(std::move(status), graph, {});
}

std::set<std::string> ready_nodes(const TaskGraph& graph, const StatusMap& status) {
  GraphIndex index(graph);
  std::set<std::string> ready;
  int not_done = 0;
  for (const auto& node : graph.nodes) {
    auto it = status.find(node.id);
    if (it == status.end() || it->second != NodeStatus::Done) ++not_done;
  }
  for (const auto& node : graph.nodes) {
    auto it = status.find(node.id);
    if (it == status.end() || it->second == NodeStatus::Done) continue;
    bool preds_done = true;
    for (const auto& pred : index.predecessors(node.id)) {
      auto pit = status.find(pred);
      if (pit == status.end() || pit->second != NodeStatus::Done) {
        preds_done = false;
        break;
      }
    }
    if (!preds_done) continue;
    // The terminal is only offered once it is all that remains.
    if (node.type == TaskType::Complete && not_done > 1) continue;
    ready.insert(node.id);
  }
  return ready;
}

StatusMap mark_done(StatusMap status, const TaskGraph& graph, const std::vector<std::string>& ids) {
  for (const auto& id : ids) {
    auto it = status.find(id);
    if (it == status.end() || it->second != NodeStatus::Ready) {
      throw PlanError(Errc::NotReady, "node '" + id + "' is not Ready");
    }
    it->second = NodeStatus::Done;
  }
  GraphIndex index(graph);
  for (const auto& node : graph.nodes) {
    auto it = status.find(node.id);
    if (it == status.end() || it->second != NodeStatus::Pending) continue;
    bool preds_done = true;
    for (const auto& pred : index.predecessors(node.id)) {
      auto pit = status.find(pred);
      if (pit == status.end() || pit->second != NodeStatus::Done) {
        preds_done = false;
        break;
      }
    }
    if (preds_done) it->second = NodeStatus::Ready;
  }
  return status;
}

}  // namespace dualplan
