#include "dualplan/validate.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

#include "dualplan/pairs.hpp"

namespace dualplan {

bool ValidationReport::has_error(std::string_view code) const {
  return std::any_of(errors.begin(), errors.end(),
                     [&](const ValidationIssue& e) { return e.code == code; });
}

std::string ValidationReport::summary() const {
  std::ostringstream out;
  for (const auto& e : errors) {
    out << e.code;
    if (!e.ids.empty()) {
      out << " [";
      for (std::size_t i = 0; i < e.ids.size(); ++i) out << (i ? " " : "") << e.ids[i];
      out << "]";
    }
    out << ": " << e.message << "\n";
  }
  return out.str();
}

namespace {

// Additional codes for graphs built in memory; the parser already rejects
// these shapes in files.
constexpr const char* kBadArms = "BAD_ARMS";
constexpr const char* kMissingObject = "MISSING_OBJECT";

void add(std::vector<ValidationIssue>& issues, std::string code, std::vector<std::string> ids,
         std::string message) {
  std::sort(ids.begin(), ids.end());
  issues.push_back({std::move(code), std::move(ids), std::move(message)});
}

// Strongly connected components, Tarjan. Returns components with >1 node,
// plus singleton components that carry a self-edge.
std::vector<std::vector<std::string>> cyclic_components(const TaskGraph& graph) {
  std::map<std::string, std::vector<std::string>> adj;
  std::set<std::string> ids;
  for (const auto& node : graph.nodes) {
    ids.insert(node.id);
    adj[node.id];
  }
  std::set<std::string> self_loops;
  for (const auto& [from, to] : graph.edges) {
    if (!ids.count(from) || !ids.count(to)) continue;
    if (from == to) self_loops.insert(from);
    adj[from].push_back(to);
  }

  std::map<std::string, int> index, low;
  std::set<std::string> on_stack;
  std::vector<std::string> stack;
  std::vector<std::vector<std::string>> components;
  int counter = 0;

  std::function<void(const std::string&)> strongconnect = [&](const std::string& v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack.insert(v);
    for (const auto& w : adj[v]) {
      if (!index.count(w)) {
        strongconnect(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack.count(w)) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<std::string> comp;
      while (true) {
        std::string w = stack.back();
        stack.pop_back();
        on_stack.erase(w);
        comp.push_back(w);
        if (w == v) break;
      }
      if (comp.size() > 1 || self_loops.count(v)) {
        std::sort(comp.begin(), comp.end());
        components.push_back(std::move(comp));
      }
    }
  };
  for (const auto& id : ids) {
    if (!index.count(id)) strongconnect(id);
  }
  std::sort(components.begin(), components.end());
  return components;
}

}  // namespace

ValidationReport validate_graph(const TaskGraph& graph) {
  std::vector<ValidationIssue> errors;
  std::set<std::string> ids;
  for (const auto& node : graph.nodes) ids.insert(node.id);

  // Edges.
  std::set<Edge> seen_edges;
  for (const auto& edge : graph.edges) {
    if (!ids.count(edge.first) || !ids.count(edge.second)) {
      add(errors, codes::kDanglingEdge, {edge.first, edge.second},
          "edge references a node that does not exist");
      continue;
    }
    if (!seen_edges.insert(edge).second) {
      add(errors, codes::kDuplicateEdge, {edge.first, edge.second}, "edge listed more than once");
    }
  }

  // Cycles.
  for (const auto& comp : cyclic_components(graph)) {
    add(errors, codes::kCycle, comp, "nodes form a dependency cycle");
  }

  // Per-node shape.
  for (const auto& node : graph.nodes) {
    if (node.arms_required != 1 && node.arms_required != 2) {
      add(errors, kBadArms, {node.id}, "arms_required must be 1 or 2");
    }
    if (node.type == TaskType::ToolUse && node.tool.empty()) {
      add(errors, codes::kMissingTool, {node.id}, "ToolUse node names no tool");
    }
    if (node.type == TaskType::Release && node.destination.empty()) {
      add(errors, codes::kMissingDest, {node.id}, "Release node names no destination");
    }
    if (node.type != TaskType::Complete && node.target_object.empty()) {
      add(errors, kMissingObject, {node.id}, "node names no target object");
    }
    if (node.arms_required == 2 &&
        (node.type == TaskType::Occupy || node.type == TaskType::ToolUse ||
         node.type == TaskType::Release)) {
      add(errors, codes::kTwoArmPairNode, {node.id},
          "occupy-release work binds a single gripper and cannot claim both arms");
    }
  }

  // Terminal node.
  std::vector<std::string> completes;
  for (const auto& node : graph.nodes) {
    if (node.type == TaskType::Complete) completes.push_back(node.id);
  }
  std::sort(completes.begin(), completes.end());
  if (completes.empty()) {
    add(errors, codes::kBadTerminal, {}, "graph has no Complete node");
  } else if (completes.size() > 1) {
    add(errors, codes::kBadTerminal, completes, "graph has more than one Complete node");
  } else {
    const std::string& terminal = completes.front();
    const TaskNode* node = graph.find(terminal);
    for (const auto& edge : graph.edges) {
      if (edge.first == terminal && ids.count(edge.second)) {
        add(errors, codes::kBadTerminal, {terminal}, "Complete node has outgoing edges");
        break;
      }
    }
    if (!node->target_object.empty() || node->arms_required != 1) {
      add(errors, codes::kBadTerminal, {terminal},
          "Complete node must target nothing and use one arm");
    }
  }

  GraphIndex index(graph);

  // Every node must be able to reach the terminal.
  if (completes.size() == 1) {
    std::set<std::string> feeding = index.ancestors(completes.front());
    feeding.insert(completes.front());
    for (const auto& node : graph.nodes) {
      if (!feeding.count(node.id)) {
        add(errors, codes::kDisconnected, {node.id}, "node has no path to the Complete node");
      }
    }
  }

  // Occupy-release pairing.
  auto pairing = detail::compute_pairing(graph, index);
  for (const auto& [occupy, releases] : pairing.ambiguous) {
    std::vector<std::string> involved{occupy};
    involved.insert(involved.end(), releases.begin(), releases.end());
    add(errors, codes::kPairingAmbiguous, involved,
        "occupy matches several releases of the same object equally well");
  }
  for (const auto& [occupy, partner] : pairing.unmatched_occupies) {
    if (partner.empty()) {
      add(errors, codes::kUnmatchedOccupy, {occupy}, "Occupy has no matching downstream Release");
    } else {
      add(errors, codes::kPairObjectMismatch, {occupy, partner},
          "grasped and released objects differ on this path");
    }
  }
  for (const auto& [release, partner] : pairing.unmatched_releases) {
    if (partner.empty()) {
      add(errors, codes::kUnmatchedRelease, {release}, "Release has no matching upstream Occupy");
    } else {
      add(errors, codes::kPairObjectMismatch, {partner, release},
          "grasped and released objects differ on this path");
    }
  }

  // Tool use must sit on the path of the pair that carries its tool.
  for (const auto& node : graph.nodes) {
    if (node.type != TaskType::ToolUse || node.tool.empty()) continue;
    bool on_path = false;
    for (const auto& pair : pairing.pairs) {
      if (pair.object != node.tool) continue;
      if (std::find(pair.path_ids.begin(), pair.path_ids.end(), node.id) != pair.path_ids.end()) {
        on_path = true;
        break;
      }
    }
    if (!on_path) {
      add(errors, codes::kToolUseOutsidePair, {node.id},
          "ToolUse is not bracketed by a grasp and release of its tool");
    }
  }

  // A two-arm node strictly between an occupy and its release can never run:
  // one arm stays bound to the held object for that whole span.
  for (const auto& node : graph.nodes) {
    if (node.arms_required != 2) continue;
    for (const auto& pair : pairing.pairs) {
      if (std::find(pair.path_ids.begin(), pair.path_ids.end(), node.id) != pair.path_ids.end()) {
        continue;
      }
      if (index.reaches(pair.occupy_id, node.id) && index.reaches(node.id, pair.release_id)) {
        add(errors, codes::kTwoArmInsidePair, {node.id, pair.occupy_id},
            "two-arm node is trapped inside an occupy-release span");
      }
    }
  }

  auto key = [](const ValidationIssue& e) { return std::tie(e.code, e.ids, e.message); };
  std::sort(errors.begin(), errors.end(),
            [&](const ValidationIssue& a, const ValidationIssue& b) { return key(a) < key(b); });
  errors.erase(std::unique(errors.begin(), errors.end()), errors.end());

  ValidationReport report;
  report.errors = std::move(errors);
  return report;
}

}  // namespace dualplan
