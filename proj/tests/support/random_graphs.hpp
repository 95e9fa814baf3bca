#pragma once

#include <random>
#include <string>
#include <vector>

#include "dualplan/graph.hpp"
#include "dualplan/io.hpp"

namespace dualplan::test {

using Rng = std::mt19937_64;

/// Random valid task graph (passes validate_graph) with at most max_nodes
/// nodes including the terminal. Structure: occupy-release chains with
/// optional in-pair ToolUse/Operate steps, release-to-pair cross
/// dependencies, standalone operates, and an occasional two-arm prologue or
/// epilogue node.
TaskGraph random_valid_graph(Rng& rng, int max_nodes = 10);

/// Arbitrary small DAG (not necessarily valid) for structural property tests.
TaskGraph random_dag(Rng& rng, int max_nodes = 12);

/// Structure-damaging mutation: edge deletion/retargeting/reversal/addition,
/// node removal, type flips, tool/dest/arm corruption.
TaskGraph mutate(const TaskGraph& graph, Rng& rng);

/// Well-formed random document (unique ids, declared edge endpoints) for
/// round-trip tests; not necessarily a valid plan.
GraphDocument random_document(Rng& rng);

}  // namespace dualplan::test
