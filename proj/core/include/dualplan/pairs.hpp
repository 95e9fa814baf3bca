#pragma once

#include <set>
#include <string>
#include <vector>

#include "dualplan/graph.hpp"

namespace dualplan {

/// An occupy-release pair: the subgraph binding a grasp to the eventual
/// placement of the same object. path_ids lists, in topological order, the
/// occupy, every intermediate ToolUse/Operate node that acts on the held
/// object (as target or as tool), and the release.
struct OccupyReleasePair {
  std::string occupy_id;
  std::string release_id;
  std::string object;
  std::vector<std::string> path_ids;

  /// Pairs are keyed by their occupy node.
  const std::string& id() const { return occupy_id; }
};

/// Matches each Occupy to the nearest reachable Release of the same object.
///
/// Preconditions: validate_graph reported no pairing errors. Throws
/// PlanError{PairingAmbiguous} when one Occupy sees two equally near
/// same-object Releases (the graph needs per-instance object names).
std::vector<OccupyReleasePair> extract_pairs(const TaskGraph& graph);

/// Ancestors of the pair's release that are not on the pair's own path.
/// These are the prerequisites the rest of the system must supply before the
/// release can run.
std::set<std::string> out_of_path_ancestors(const TaskGraph& graph, const OccupyReleasePair& pair);
std::set<std::string> out_of_path_ancestors(const GraphIndex& index, const OccupyReleasePair& pair);

namespace detail {

/// Shared matching engine used by both extract_pairs and the validator.
struct PairingOutcome {
  std::vector<OccupyReleasePair> pairs;
  // Occupies with no reachable same-object release; paired with the nearest
  // wrong-object release id when one exists (else empty string). Releases
  // mirror that with their nearest unmatched occupy.
  std::vector<std::pair<std::string, std::string>> unmatched_occupies;
  std::vector<std::pair<std::string, std::string>> unmatched_releases;
  // occupy id -> the equally near candidate release ids.
  std::vector<std::pair<std::string, std::vector<std::string>>> ambiguous;
};

PairingOutcome compute_pairing(const TaskGraph& graph, const GraphIndex& index);

}  // namespace detail

}  // namespace dualplan
