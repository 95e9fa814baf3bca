#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "dualplan/graph.hpp"

namespace dualplan {

/// Execution status of one node. Progression is monotone:
/// Pending -> Ready -> Done.
enum class NodeStatus { Pending, Ready, Done };

const char* to_string(NodeStatus status);

using StatusMap = std::map<std::string, NodeStatus>;

/// All nodes Pending, then nodes without predecessors promoted to Ready.
StatusMap initial_status(const TaskGraph& graph);

/// Nodes whose predecessors are all Done and that are not Done themselves.
/// The Complete node is listed only once it is the sole node left undone.
std::set<std::string> ready_nodes(const TaskGraph& graph, const StatusMap& status);

/// Marks the given Ready nodes Done and promotes any Pending node whose
/// predecessors are now all Done. Throws PlanError{NotReady} if a node was
/// not Ready. An empty id list just runs the promotion sweep.
StatusMap mark_done(StatusMap status, const TaskGraph& graph, const std::vector<std::string>& ids);

}  // namespace dualplan
