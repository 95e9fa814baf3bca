#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dualplan/graph.hpp"
#include "dualplan/world.hpp"

namespace dualplan {

/// A task graph together with the instruction it was derived from.
/// Persisted as `.taskgraph.json`, format_version 1.
struct GraphDocument {
  int format_version = 1;
  std::string task_name;
  std::string instruction;
  TaskGraph graph;
};

bool structurally_equal(const GraphDocument& a, const GraphDocument& b);

struct ParseDiagnostic {
  enum class Severity { Error, Warning };
  Severity severity = Severity::Error;
  int line = 1;
  int column = 1;
  std::string code;
  std::string message;
};

// Parse diagnostic codes.
namespace iocodes {
inline constexpr const char* kSyntaxError = "SYNTAX_ERROR";
inline constexpr const char* kBadDocument = "BAD_DOCUMENT";
inline constexpr const char* kUnsupportedVersion = "UNSUPPORTED_VERSION";
inline constexpr const char* kMissingField = "MISSING_FIELD";
inline constexpr const char* kBadField = "BAD_FIELD";
inline constexpr const char* kDuplicateNodeId = "DUPLICATE_NODE_ID";
inline constexpr const char* kUnknownTaskType = "UNKNOWN_TASK_TYPE";
inline constexpr const char* kInvalidArms = "INVALID_ARMS";
inline constexpr const char* kBadEdge = "BAD_EDGE";
inline constexpr const char* kUndeclaredEdgeEndpoint = "UNDECLARED_EDGE_ENDPOINT";
inline constexpr const char* kUnknownKey = "UNKNOWN_KEY";
}  // namespace iocodes

struct ParseResult {
  std::optional<GraphDocument> document;
  std::vector<ParseDiagnostic> diagnostics;

  bool ok() const { return document.has_value(); }
  std::string diagnostics_text() const;
};

/// Total parser: any byte sequence yields either a document or error
/// diagnostics with locations, never an exception. A returned document has
/// unique node ids and edges that reference declared nodes; deeper structural
/// validation is validate_graph's job.
ParseResult parse_task_graph(std::string_view text);

/// Canonical text form: nodes sorted by id, edges sorted lexicographically,
/// fixed key order, two-space indent, trailing newline. parse of the output
/// reproduces the document. Throws std::invalid_argument if the document
/// breaks the parser's own guarantees (duplicate ids, dangling edges).
std::string serialize_task_graph(const GraphDocument& doc);

/// Pulls the last well-delimited graph payload out of raw model output:
/// the later of the last fenced code block and the last balanced top-level
/// JSON object. Returns std::nullopt when no candidate exists (NO_PAYLOAD).
std::optional<std::string> extract_graph_payload(std::string_view raw);

/// Graphviz rendering; node shape encodes the task type, deterministic order.
std::string export_dot(const TaskGraph& graph);

/// World fixtures (`.world.json`). parse_world throws PlanError{Io} with a
/// position on malformed input; serialize_world is canonical.
WorldState parse_world(std::string_view text);
std::string serialize_world(const WorldState& world);

std::uint64_t fnv1a64(std::string_view bytes);
std::string world_digest(const WorldState& world);

}  // namespace dualplan
