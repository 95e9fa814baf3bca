#pragma once

#include <optional>

#include "dualplan/graph.hpp"
#include "dualplan/planner.hpp"
#include "dualplan/world.hpp"

namespace dualplan {

/// Exact minimum number of productive stages over every legal schedule, under
/// the same eligibility, dependency and geometry rules the executor obeys.
/// Breadth-first search over (done set, pair ownership, world) with visited
/// pruning; written apart from the executor so the two can check each other.
/// Returns std::nullopt when the graph exceeds 14 nodes, the budget runs out
/// or no schedule completes.
std::optional<int> optimal_stage_oracle(const TaskGraph& graph, const WorldState& world,
                                        const PlannerConfig& config, int stage_budget);

}  // namespace dualplan
