#include "dualplan/io.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dualplan/error.hpp"

namespace dualplan {

using nlohmann::json;
using nlohmann::ordered_json;

bool structurally_equal(const GraphDocument& a, const GraphDocument& b) {
  return a.format_version == b.format_version && a.task_name == b.task_name &&
         a.instruction == b.instruction && structurally_equal(a.graph, b.graph);
}

std::string ParseResult::diagnostics_text() const {
  std::ostringstream out;
  for (const auto& d : diagnostics) {
    out << (d.severity == ParseDiagnostic::Severity::Error ? "error" : "warning") << " at "
        << d.line << ":" << d.column << " [" << d.code << "] " << d.message << "\n";
  }
  return out.str();
}

namespace {

struct Location {
  int line = 1;
  int column = 1;
};

Location location_of_byte(std::string_view text, std::size_t byte) {
  Location loc;
  byte = std::min(byte, text.size());
  for (std::size_t i = 0; i < byte; ++i) {
    if (text[i] == '\n') {
      ++loc.line;
      loc.column = 1;
    } else {
      ++loc.column;
    }
  }
  return loc;
}

// Location of the nth occurrence (1-based) of a quoted literal. Falls back to
// the start of the text when the literal is not found, so every diagnostic
// carries a usable location.
// TODO: point at the exact key when the same literal appears in unrelated
// positions (currently the first textual occurrence wins).
Location locate_literal(std::string_view text, const std::string& literal, int nth = 1) {
  std::string needle = "\"" + literal + "\"";
  std::size_t pos = 0;
  for (int i = 0; i < nth; ++i) {
    pos = text.find(needle, i == 0 ? 0 : pos + 1);
    if (pos == std::string_view::npos) return {1, 1};
  }
  return location_of_byte(text, pos);
}

void diag(std::vector<ParseDiagnostic>& out, ParseDiagnostic::Severity severity, Location loc,
          const char* code, std::string message) {
  out.push_back({severity, loc.line, loc.column, code, std::move(message)});
}

}  // namespace

ParseResult parse_task_graph(std::string_view text) {
  ParseResult result;
  auto& diags = result.diagnostics;
  auto error = [&](Location loc, const char* code, std::string message) {
    diag(diags, ParseDiagnostic::Severity::Error, loc, code, std::move(message));
  };
  auto warning = [&](Location loc, const char* code, std::string message) {
    diag(diags, ParseDiagnostic::Severity::Warning, loc, code, std::move(message));
  };

  json root = json::parse(text, nullptr, false);
  if (root.is_discarded()) {
    // Parse again to learn where it failed.
    Location loc{1, 1};
    std::string message = "input is not valid JSON";
    try {
      [[maybe_unused]] json reparsed = json::parse(text);
    } catch (const json::parse_error& e) {
      loc = location_of_byte(text, e.byte > 0 ? e.byte - 1 : 0);
      message = e.what();
    } catch (const std::exception& e) {
      message = e.what();
    }
    error(loc, iocodes::kSyntaxError, message);
    return result;
  }
  if (!root.is_object()) {
    error({1, 1}, iocodes::kBadDocument, "top level value must be a JSON object");
    return result;
  }

  GraphDocument doc;

  if (!root.contains("version")) {
    error({1, 1}, iocodes::kMissingField, "missing required field 'version'");
  } else if (!root["version"].is_number_integer()) {
    error(locate_literal(text, "version"), iocodes::kBadField, "'version' must be an integer");
  } else if (root["version"].get<int>() != 1) {
    error(locate_literal(text, "version"), iocodes::kUnsupportedVersion,
          "unsupported format version " + std::to_string(root["version"].get<int>()));
  } else {
    doc.format_version = 1;
  }

  auto read_string = [&](const char* key, std::string& into) {
    if (!root.contains(key)) return;
    if (root[key].is_string()) {
      into = root[key].get<std::string>();
    } else {
      error(locate_literal(text, key), iocodes::kBadField,
            std::string("'") + key + "' must be a string");
    }
  };
  read_string("task", doc.task_name);
  read_string("instruction", doc.instruction);

  static const std::set<std::string> known_doc_keys{"version", "task", "instruction", "nodes",
                                                    "edges"};
  for (const auto& [key, value] : root.items()) {
    if (!known_doc_keys.count(key)) {
      warning(locate_literal(text, key), iocodes::kUnknownKey, "ignoring unknown key '" + key + "'");
    }
  }

  std::set<std::string> ids;
  if (!root.contains("nodes") || !root["nodes"].is_array()) {
    error({1, 1}, iocodes::kMissingField, "missing required array 'nodes'");
  } else {
    static const std::set<std::string> known_node_keys{"id",   "type",   "desc", "arms",
                                                       "object", "tool", "dest"};
    int node_index = 0;
    for (const auto& entry : root["nodes"]) {
      ++node_index;
      if (!entry.is_object()) {
        error({1, 1}, iocodes::kBadField,
              "node #" + std::to_string(node_index) + " must be an object");
        continue;
      }
      TaskNode node;
      if (!entry.contains("id") || !entry["id"].is_string() ||
          entry["id"].get<std::string>().empty()) {
        error({1, 1}, iocodes::kMissingField,
              "node #" + std::to_string(node_index) + " needs a nonempty string 'id'");
        continue;
      }
      node.id = entry["id"].get<std::string>();
      if (!ids.insert(node.id).second) {
        error(locate_literal(text, node.id, 2), iocodes::kDuplicateNodeId,
              "node id '" + node.id + "' declared more than once");
        continue;
      }
      if (!entry.contains("type") || !entry["type"].is_string()) {
        error(locate_literal(text, node.id), iocodes::kMissingField,
              "node '" + node.id + "' needs a string 'type'");
        continue;
      }
      const std::string type_text = entry["type"].get<std::string>();
      auto type = task_type_from_string(type_text);
      if (!type) {
        error(locate_literal(text, type_text), iocodes::kUnknownTaskType,
              "unknown task type '" + type_text +
                  "' (valid spellings: Occupy, ToolUse, Release, Operate, Complete)");
        continue;
      }
      node.type = *type;
      if (entry.contains("desc")) {
        if (entry["desc"].is_string()) {
          node.description = entry["desc"].get<std::string>();
        } else {
          error(locate_literal(text, node.id), iocodes::kBadField,
                "node '" + node.id + "': 'desc' must be a string");
        }
      }
      if (entry.contains("arms")) {
        if (!entry["arms"].is_number_integer() ||
            (entry["arms"].get<int>() != 1 && entry["arms"].get<int>() != 2)) {
          error(locate_literal(text, node.id), iocodes::kInvalidArms,
                "node '" + node.id + "': 'arms' must be 1 or 2");
          continue;
        }
        node.arms_required = entry["arms"].get<int>();
      }
      auto read_node_string = [&](const char* key, std::string& into) {
        if (!entry.contains(key)) return true;
        if (!entry[key].is_string()) {
          error(locate_literal(text, node.id), iocodes::kBadField,
                "node '" + node.id + "': '" + key + "' must be a string");
          return false;
        }
        into = entry[key].get<std::string>();
        return true;
      };
      if (!read_node_string("object", node.target_object)) continue;
      if (!read_node_string("tool", node.tool)) continue;
      if (!read_node_string("dest", node.destination)) continue;
      for (const auto& [key, value] : entry.items()) {
        if (!known_node_keys.count(key)) {
          warning(locate_literal(text, key), iocodes::kUnknownKey,
                  "node '" + node.id + "': ignoring unknown key '" + key + "'");
        }
      }
      doc.graph.nodes.push_back(std::move(node));
    }
  }

  if (!root.contains("edges") || !root["edges"].is_array()) {
    error({1, 1}, iocodes::kMissingField, "missing required array 'edges'");
  } else {
    int edge_index = 0;
    for (const auto& entry : root["edges"]) {
      ++edge_index;
      if (!entry.is_array() || entry.size() != 2 || !entry[0].is_string() ||
          !entry[1].is_string()) {
        error({1, 1}, iocodes::kBadEdge,
              "edge #" + std::to_string(edge_index) + " must be a [from, to] pair of node ids");
        continue;
      }
      Edge edge{entry[0].get<std::string>(), entry[1].get<std::string>()};
      bool ok = true;
      for (const auto& endpoint : {edge.first, edge.second}) {
        if (!ids.count(endpoint)) {
          error(locate_literal(text, endpoint), iocodes::kUndeclaredEdgeEndpoint,
                "edge references undeclared node '" + endpoint + "'");
          ok = false;
        }
      }
      if (ok) doc.graph.edges.push_back(std::move(edge));
    }
  }

  bool has_errors = std::any_of(diags.begin(), diags.end(), [](const ParseDiagnostic& d) {
    return d.severity == ParseDiagnostic::Severity::Error;
  });
  if (!has_errors) result.document = std::move(doc);
  return result;
}

std::string serialize_task_graph(const GraphDocument& doc) {
  std::set<std::string> ids;
  for (const auto& node : doc.graph.nodes) {
    if (!ids.insert(node.id).second) {
      throw std::invalid_argument("serialize_task_graph: duplicate node id '" + node.id + "'");
    }
  }
  for (const auto& [from, to] : doc.graph.edges) {
    if (!ids.count(from) || !ids.count(to)) {
      throw std::invalid_argument("serialize_task_graph: edge references undeclared node");
    }
  }

  std::vector<TaskNode> nodes = doc.graph.nodes;
  std::sort(nodes.begin(), nodes.end(),
            [](const TaskNode& a, const TaskNode& b) { return a.id < b.id; });
  std::vector<Edge> edges = doc.graph.edges;
  std::sort(edges.begin(), edges.end());

  ordered_json out;
  out["version"] = doc.format_version;
  out["task"] = doc.task_name;
  out["instruction"] = doc.instruction;
  out["nodes"] = ordered_json::array();
  for (const auto& node : nodes) {
    ordered_json j;
    j["id"] = node.id;
    j["type"] = to_string(node.type);
    j["desc"] = node.description;
    j["arms"] = node.arms_required;
    j["object"] = node.target_object;
    if (!node.tool.empty()) j["tool"] = node.tool;
    if (!node.destination.empty()) j["dest"] = node.destination;
    out["nodes"].push_back(std::move(j));
  }
  out["edges"] = ordered_json::array();
  for (const auto& [from, to] : edges) {
    out["edges"].push_back(ordered_json::array({from, to}));
  }
  return out.dump(2) + "\n";
}

namespace {

struct PayloadCandidate {
  std::size_t start = 0;
  std::string text;
};

// Balanced top-level {...} regions, honouring JSON string literals.
void collect_brace_candidates(std::string_view text, std::size_t base,
                              std::vector<PayloadCandidate>& out) {
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      if (depth == 0) start = i;
      ++depth;
    } else if (c == '}') {
      if (depth > 0 && --depth == 0) {
        out.push_back({base + start, std::string(text.substr(start, i - start + 1))});
      }
    }
  }
}

std::string strip_fence_content(std::string_view content) {
  // Drop a leading language tag line such as "json".
  std::size_t eol = content.find('\n');
  if (eol != std::string_view::npos) {
    std::string_view first = content.substr(0, eol);
    bool tag = !first.empty();
    for (char c : first) {
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '+')) {
        tag = false;
        break;
      }
    }
    if (tag) content = content.substr(eol + 1);
  }
  while (!content.empty() && std::isspace(static_cast<unsigned char>(content.front()))) {
    content.remove_prefix(1);
  }
  while (!content.empty() && std::isspace(static_cast<unsigned char>(content.back()))) {
    content.remove_suffix(1);
  }
  return std::string(content);
}

}  // namespace

std::optional<std::string> extract_graph_payload(std::string_view raw) {
  std::vector<PayloadCandidate> candidates;
  constexpr std::string_view fence = "```";

  std::size_t cursor = 0;
  std::size_t prose_from = 0;
  while (true) {
    std::size_t open = raw.find(fence, cursor);
    if (open == std::string_view::npos) break;
    std::size_t close = raw.find(fence, open + fence.size());
    if (close == std::string_view::npos) break;
    collect_brace_candidates(raw.substr(prose_from, open - prose_from), prose_from, candidates);
    std::string content =
        strip_fence_content(raw.substr(open + fence.size(), close - open - fence.size()));
    if (!content.empty()) candidates.push_back({open, std::move(content)});
    cursor = close + fence.size();
    prose_from = cursor;
  }
  collect_brace_candidates(raw.substr(prose_from), prose_from, candidates);

  if (candidates.empty()) return std::nullopt;
  // Self-corrections come later in a transcript, so the last block wins.
  auto last = std::max_element(candidates.begin(), candidates.end(),
                               [](const PayloadCandidate& a, const PayloadCandidate& b) {
                                 return a.start < b.start;
                               });
  return last->text;
}

std::string export_dot(const TaskGraph& graph) {
  auto shape = [](TaskType type) {
    switch (type) {
      case TaskType::Occupy: return "ellipse";
      case TaskType::ToolUse: return "hexagon";
      case TaskType::Release: return "box";
      case TaskType::Operate: return "diamond";
      case TaskType::Complete: return "doublecircle";
    }
    return "ellipse";
  };
  auto escape = [](const std::string& s) {
    std::string out;
    for (char c : s) {
      if (c == '"' || c == '\\') out.push_back('\\');
      out.push_back(c);
    }
    return out;
  };

  std::vector<TaskNode> nodes = graph.nodes;
  std::sort(nodes.begin(), nodes.end(),
            [](const TaskNode& a, const TaskNode& b) { return a.id < b.id; });
  std::vector<Edge> edges = graph.edges;
  std::sort(edges.begin(), edges.end());

  std::ostringstream out;
  out << "digraph taskgraph {\n  rankdir=TB;\n";
  for (const auto& node : nodes) {
    out << "  \"" << escape(node.id) << "\" [shape=" << shape(node.type) << ", label=\""
        << escape(node.id);
    if (!node.description.empty()) out << "\\n" << escape(node.description);
    out << "\"];\n";
  }
  for (const auto& [from, to] : edges) {
    out << "  \"" << escape(from) << "\" -> \"" << escape(to) << "\";\n";
  }
  out << "}\n";
  return out.str();
}

namespace {

Vec3 parse_vec3(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() ||
      !j[2].is_number()) {
    throw PlanError(Errc::Io, what + " must be a [x, y, z] number triple");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

WorldState parse_world(std::string_view text) {
  json root = json::parse(text, nullptr, false);
  if (root.is_discarded() || !root.is_object()) {
    throw PlanError(Errc::Io, "world file is not a JSON object");
  }
  WorldState world;
  if (root.contains("objects")) {
    if (!root["objects"].is_object()) throw PlanError(Errc::Io, "'objects' must be an object");
    for (const auto& [name, value] : root["objects"].items()) {
      world.objects[name] = parse_vec3(value, "objects." + name);
    }
  }
  if (root.contains("containers")) {
    if (!root["containers"].is_object()) {
      throw PlanError(Errc::Io, "'containers' must be an object");
    }
    for (const auto& [name, value] : root["containers"].items()) {
      if (!value.is_string()) throw PlanError(Errc::Io, "containers." + name + " must be a string");
      world.containers[name] = value.get<std::string>();
    }
  }
  if (root.contains("articulation")) {
    if (!root["articulation"].is_object()) {
      throw PlanError(Errc::Io, "'articulation' must be an object");
    }
    for (const auto& [name, value] : root["articulation"].items()) {
      if (!value.is_string() ||
          (value.get<std::string>() != "open" && value.get<std::string>() != "closed")) {
        throw PlanError(Errc::Io, "articulation." + name + " must be \"open\" or \"closed\"");
      }
      world.articulation[name] = value.get<std::string>() == "open" ? ArticulationState::Open
                                                                    : ArticulationState::Closed;
    }
  }
  if (!root.contains("left_hand") || !root.contains("right_hand")) {
    throw PlanError(Errc::Io, "world file needs 'left_hand' and 'right_hand' positions");
  }
  world.left_hand = parse_vec3(root["left_hand"], "left_hand");
  world.right_hand = parse_vec3(root["right_hand"], "right_hand");
  return world;
}

std::string serialize_world(const WorldState& world) {
  ordered_json out;
  out["objects"] = ordered_json::object();
  for (const auto& [name, pos] : world.objects) {
    out["objects"][name] = {pos.x, pos.y, pos.z};
  }
  out["containers"] = ordered_json::object();
  for (const auto& [name, container] : world.containers) {
    out["containers"][name] = container;
  }
  out["articulation"] = ordered_json::object();
  for (const auto& [name, state] : world.articulation) {
    out["articulation"][name] = state == ArticulationState::Open ? "open" : "closed";
  }
  out["left_hand"] = {world.left_hand.x, world.left_hand.y, world.left_hand.z};
  out["right_hand"] = {world.right_hand.x, world.right_hand.y, world.right_hand.z};
  return out.dump(2) + "\n";
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

std::string world_digest(const WorldState& world) {
  std::uint64_t hash = fnv1a64(serialize_world(world));
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return std::string(buf);
}

}  // namespace dualplan
