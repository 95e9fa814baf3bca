#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dualplan {

/// The five sub-task categories. Occupy engages a gripper and leaves the arm
/// holding the target object; ToolUse acts with a tool that stays in the
/// gripper; Release places the held object and frees the arm; Operate holds
/// the arm only for the duration of the step; Complete is the terminal
/// sentinel consumed once everything else is done.
enum class TaskType { Occupy, ToolUse, Release, Operate, Complete };

const char* to_string(TaskType type);
std::optional<TaskType> task_type_from_string(std::string_view text);

enum class Arm { Left, Right };

const char* to_string(Arm arm);
Arm other_arm(Arm arm);

/// One sub-task node.
///
/// target_object is the object acted on (empty only for Complete). tool names
/// the carried tool and is required for ToolUse. destination names where a
/// Release puts its object and is required for Release.
struct TaskNode {
  std::string id;
  std::string description;
  TaskType type = TaskType::Operate;
  int arms_required = 1;
  std::string target_object;
  std::string tool;
  std::string destination;

  bool operator==(const TaskNode&) const = default;
};

using Edge = std::pair<std::string, std::string>;

/// Typed sub-task dependency DAG. An edge (a, b) means a must be completed
/// before b may begin. This is plain data: structural rules (acyclicity,
/// single terminal, pair completeness, ...) are checked by validate_graph,
/// not enforced on construction.
struct TaskGraph {
  std::vector<TaskNode> nodes;
  std::vector<Edge> edges;

  const TaskNode* find(std::string_view id) const;
  bool has_node(std::string_view id) const { return find(id) != nullptr; }

  /// Ids of nodes, sorted.
  std::vector<std::string> node_ids() const;

  /// The unique Complete node, or nullptr if there is none or several.
  const TaskNode* complete_node() const;
};

/// Set-wise equality: node sets and edge sets match regardless of the order
/// they were inserted in.
bool structurally_equal(const TaskGraph& a, const TaskGraph& b);

/// Precomputed adjacency and reachability queries for one graph. The graph
/// must outlive the index. Duplicate edges are collapsed; unknown endpoints
/// are ignored (the validator reports them).
class GraphIndex {
 public:
  explicit GraphIndex(const TaskGraph& graph);

  const std::vector<std::string>& predecessors(const std::string& id) const;
  const std::vector<std::string>& successors(const std::string& id) const;

  /// All transitive predecessors of id (id excluded).
  std::set<std::string> ancestors(const std::string& id) const;
  /// All transitive successors of id (id excluded).
  std::set<std::string> descendants(const std::string& id) const;

  bool reaches(const std::string& from, const std::string& to) const;

  /// Length of the shortest directed path from -> to, if any.
  std::optional<int> shortest_path_length(const std::string& from, const std::string& to) const;

 private:
  std::map<std::string, std::vector<std::string>> succs_;
  std::map<std::string, std::vector<std::string>> preds_;
  std::vector<std::string> empty_;
};

}  // namespace dualplan
