#pragma once

#include <string>
#include <vector>

#include "dualplan/graph.hpp"

namespace dualplan {

// Error codes emitted by validate_graph. A graph with an empty error list is
// executable by the inference engine.
//
//   BAD_TERMINAL          missing/duplicated Complete, or a malformed one
//   CYCLE                 nodes on a directed cycle (one entry per cycle group)
//   DANGLING_EDGE         edge endpoint that is not a node
//   DISCONNECTED          node with no directed path to the Complete node
//   DUPLICATE_EDGE        the same edge listed twice
//   MISSING_DEST          Release without a destination
//   MISSING_TOOL          ToolUse without a tool
//   PAIRING_AMBIGUOUS     one Occupy, several equally near same-object Releases
//   PAIR_OBJECT_MISMATCH  structurally paired nodes that act on different objects
//   TOOLUSE_OUTSIDE_PAIR  ToolUse not on the path of its tool's pair
//   TWO_ARM_INSIDE_PAIR   two-arm node trapped between an occupy and its release
//   TWO_ARM_PAIR_NODE     Occupy/ToolUse/Release that claims both arms
//   UNMATCHED_OCCUPY      Occupy with no matching downstream Release
//   UNMATCHED_RELEASE     Release with no matching upstream Occupy
namespace codes {
inline constexpr const char* kBadTerminal = "BAD_TERMINAL";
inline constexpr const char* kCycle = "CYCLE";
inline constexpr const char* kDanglingEdge = "DANGLING_EDGE";
inline constexpr const char* kDisconnected = "DISCONNECTED";
inline constexpr const char* kDuplicateEdge = "DUPLICATE_EDGE";
inline constexpr const char* kMissingDest = "MISSING_DEST";
inline constexpr const char* kMissingTool = "MISSING_TOOL";
inline constexpr const char* kPairingAmbiguous = "PAIRING_AMBIGUOUS";
inline constexpr const char* kPairObjectMismatch = "PAIR_OBJECT_MISMATCH";
inline constexpr const char* kToolUseOutsidePair = "TOOLUSE_OUTSIDE_PAIR";
inline constexpr const char* kTwoArmInsidePair = "TWO_ARM_INSIDE_PAIR";
inline constexpr const char* kTwoArmPairNode = "TWO_ARM_PAIR_NODE";
inline constexpr const char* kUnmatchedOccupy = "UNMATCHED_OCCUPY";
inline constexpr const char* kUnmatchedRelease = "UNMATCHED_RELEASE";
}  // namespace codes

struct ValidationIssue {
  std::string code;
  std::vector<std::string> ids;  // offending node/edge ids, sorted
  std::string message;

  bool operator==(const ValidationIssue&) const = default;
};

struct ValidationReport {
  std::vector<ValidationIssue> errors;    // sorted by (code, ids)
  std::vector<ValidationIssue> warnings;  // same shape, currently unused

  bool ok() const { return errors.empty(); }
  bool has_error(std::string_view code) const;
  std::string summary() const;
};

/// Structural validation. Never throws; every problem becomes a report entry.
ValidationReport validate_graph(const TaskGraph& graph);

}  // namespace dualplan
