#include "dualplan/generator.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "dualplan/error.hpp"
#include "dualplan/validate.hpp"

namespace dualplan {

using nlohmann::json;
using nlohmann::ordered_json;

ScriptedProvider::ScriptedProvider(std::vector<std::string> responses)
    : responses_(std::move(responses)) {
  if (responses_.empty()) {
    throw PlanError(Errc::InvalidConfig, "scripted provider needs at least one response");
  }
}

std::string ScriptedProvider::complete(const std::string&) {
  const std::size_t index = std::min<std::size_t>(calls_, responses_.size() - 1);
  ++calls_;
  return responses_[index];
}

HttpProvider::HttpProvider(HttpProviderConfig config) : config_(std::move(config)) {}

std::string HttpProvider::complete(const std::string& prompt) {
  // Split scheme://host[:port]/path by hand; httplib wants them apart.
  const std::string& url = config_.url;
  const std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw PlanError(Errc::ProviderTransport, "provider.url has no scheme: " + url);
  }
  const std::size_t host_start = scheme_end + 3;
  const std::size_t path_start = url.find('/', host_start);
  const std::string base = url.substr(0, path_start);
  const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

  httplib::Client client(base);
  client.set_connection_timeout(static_cast<int>(config_.timeout_s), 0);
  client.set_read_timeout(static_cast<int>(config_.timeout_s), 0);

  httplib::Headers headers;
  if (!config_.auth_env.empty()) {
    if (const char* token = std::getenv(config_.auth_env.c_str())) {
      headers.emplace("Authorization", std::string("Bearer ") + token);
    }
  }

  ordered_json body;
  body["model"] = config_.model;
  body["messages"] = ordered_json::array({ordered_json{{"role", "user"}, {"content", prompt}}});
  body["temperature"] = 0;

  auto res = client.Post(path, headers, body.dump(), "application/json");
  if (!res) {
    throw PlanError(Errc::ProviderTransport,
                    "request to " + url + " failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw PlanError(Errc::ProviderTransport,
                    "provider returned HTTP " + std::to_string(res->status));
  }
  json reply = json::parse(res->body, nullptr, false);
  if (reply.is_discarded() || !reply.contains("choices") || !reply["choices"].is_array() ||
      reply["choices"].empty()) {
    throw PlanError(Errc::ProviderTransport, "provider reply is not a chat completion");
  }
  const json& first = reply["choices"][0];
  if (first.contains("message") && first["message"].contains("content") &&
      first["message"]["content"].is_string()) {
    return first["message"]["content"].get<std::string>();
  }
  if (first.contains("text") && first["text"].is_string()) {
    return first["text"].get<std::string>();
  }
  throw PlanError(Errc::ProviderTransport, "provider reply carries no text content");
}

std::string prompt_preamble() {
  std::ostringstream out;
  out << "You plan for a two-armed robot. Decompose the instruction into a dependency\n"
         "graph of sub-tasks (template v"
      << kPromptVersion
      << ").\n"
         "\n"
         "Node types:\n"
         "- Occupy: grasp an object; the arm stays occupied until a Release.\n"
         "- ToolUse: act with a tool already in the gripper (set \"tool\").\n"
         "- Release: put the held object at a destination (set \"dest\"); frees the arm.\n"
         "- Operate: momentary action such as opening a drawer; the arm ends free.\n"
         "- Complete: single terminal node; every other node must lead to it.\n"
         "\n"
         "Rules:\n"
         "- Every Occupy must reach exactly one Release of the same object, and every\n"
         "  Release must be preceded by its Occupy.\n"
         "- ToolUse nodes go between the Occupy and Release of their tool.\n"
         "- Edges [a, b] mean a must finish before b starts. No cycles.\n"
         "- Use arms = 2 only for actions that truly need both arms at once.\n"
         "\n"
         "Answer with exactly one fenced json block:\n"
         "{\"version\": 1, \"task\": \"<short name>\", \"instruction\": \"<verbatim>\",\n"
         " \"nodes\": [{\"id\": \"...\", \"type\": \"Occupy|ToolUse|Release|Operate|Complete\",\n"
         "             \"desc\": \"...\", \"arms\": 1, \"object\": \"...\",\n"
         "             \"tool\": \"...\", \"dest\": \"...\"}],\n"
         " \"edges\": [[\"from\", \"to\"]]}\n";
  return out.str();
}

std::string prompt_for_attempt(const GenerationRequest& request,
                               const std::vector<ExchangeDiagnostic>* previous_diagnostics) {
  std::ostringstream out;
  out << prompt_preamble() << "\nInstruction: " << request.instruction
      << "\nEnvironment: " << request.environment_description << "\n";
  if (previous_diagnostics != nullptr && !previous_diagnostics->empty()) {
    out << "\nYour previous graph was rejected. Fix these problems and send the corrected "
           "json block:\n"
        << build_reflection_feedback(*previous_diagnostics);
  }
  return out.str();
}

std::string build_reflection_feedback(const std::vector<ExchangeDiagnostic>& diagnostics) {
  std::vector<ExchangeDiagnostic> sorted = diagnostics;
  std::sort(sorted.begin(), sorted.end(),
            [](const ExchangeDiagnostic& a, const ExchangeDiagnostic& b) {
              return std::tie(a.code, a.ids, a.message) < std::tie(b.code, b.ids, b.message);
            });
  std::ostringstream out;
  int item = 0;
  for (const auto& d : sorted) {
    out << ++item << ". " << d.code;
    if (!d.ids.empty()) {
      out << " on";
      for (const auto& id : d.ids) out << " '" << id << "'";
    }
    out << ": " << d.message;
    if (d.code == codes::kUnmatchedOccupy) {
      out << " (every Occupy must reach a matching Release of the same object)";
    } else if (d.code == codes::kUnmatchedRelease) {
      out << " (every Release needs a preceding Occupy of the same object)";
    } else if (d.code == codes::kCycle) {
      out << " (dependencies must form a directed acyclic graph)";
    } else if (d.code == codes::kBadTerminal) {
      out << " (exactly one Complete node, with no outgoing edges)";
    } else if (d.code == codes::kDisconnected) {
      out << " (every node must have a path to the Complete node)";
    }
    out << "\n";
  }
  return out.str();
}

namespace {

std::vector<ExchangeDiagnostic> from_parse(const std::vector<ParseDiagnostic>& diags) {
  std::vector<ExchangeDiagnostic> out;
  for (const auto& d : diags) {
    if (d.severity != ParseDiagnostic::Severity::Error) continue;
    out.push_back({d.code,
                   {},
                   d.message + " (line " + std::to_string(d.line) + ", column " +
                       std::to_string(d.column) + ")"});
  }
  return out;
}

std::vector<ExchangeDiagnostic> from_validation(const ValidationReport& report) {
  std::vector<ExchangeDiagnostic> out;
  for (const auto& e : report.errors) out.push_back({e.code, e.ids, e.message});
  return out;
}

}  // namespace

GenerationResult generate_graph(const GenerationRequest& request, Provider& provider) {
  GenerationResult result;
  if (request.max_attempts < 1) {
    result.status = GenerationStatus::AttemptsExhausted;
    result.error_message = "max_attempts must be at least 1";
    return result;
  }

  std::vector<ExchangeDiagnostic> previous;
  for (int attempt = 1; attempt <= request.max_attempts; ++attempt) {
    ProviderExchange exchange;
    exchange.attempt_index = attempt;
    exchange.prompt_text = prompt_for_attempt(request, attempt == 1 ? nullptr : &previous);

    try {
      exchange.raw_response = provider.complete(exchange.prompt_text);
    } catch (const PlanError& e) {
      result.status = GenerationStatus::ProviderError;
      result.error_message = e.what();
      result.exchanges.push_back(std::move(exchange));
      return result;
    }

    auto payload = extract_graph_payload(exchange.raw_response);
    if (!payload) {
      exchange.diagnostics.push_back(
          {"NO_PAYLOAD", {}, "no graph payload block found in the response"});
    } else {
      ParseResult parsed = parse_task_graph(*payload);
      if (!parsed.ok()) {
        exchange.diagnostics = from_parse(parsed.diagnostics);
      } else {
        ValidationReport report = validate_graph(parsed.document->graph);
        if (!report.ok()) {
          exchange.diagnostics = from_validation(report);
        } else {
          exchange.accepted = true;
          result.document = std::move(parsed.document);
        }
      }
    }

    previous = exchange.diagnostics;
    result.exchanges.push_back(std::move(exchange));
    if (result.document) {
      result.status = GenerationStatus::Ok;
      return result;
    }
  }
  result.status = GenerationStatus::AttemptsExhausted;
  result.error_message =
      "no structurally valid graph after " + std::to_string(request.max_attempts) + " attempts";
  return result;
}

void write_exchange_log(std::ostream& out, const std::vector<ProviderExchange>& exchanges) {
  for (const auto& exchange : exchanges) {
    ordered_json line;
    line["attempt"] = exchange.attempt_index;
    line["prompt"] = exchange.prompt_text;
    line["response"] = exchange.raw_response;
    line["diagnostics"] = ordered_json::array();
    for (const auto& d : exchange.diagnostics) {
      line["diagnostics"].push_back(
          ordered_json{{"code", d.code}, {"ids", d.ids}, {"message", d.message}});
    }
    line["accepted"] = exchange.accepted;
    out << line.dump() << "\n";
  }
}

std::string describe_world(const WorldState& world) {
  auto coarse = [](const Vec3& p) {
    std::string side = p.x < -0.05 ? "left" : (p.x > 0.05 ? "right" : "center");
    std::string depth = p.y > 0.4 ? "far" : "near";
    return depth + " " + side;
  };
  std::ostringstream out;
  out << "Objects:";
  bool first = true;
  for (const auto& [name, pos] : world.objects) {
    out << (first ? " " : "; ") << name << " (" << coarse(pos) << ")";
    first = false;
  }
  if (first) out << " none";
  out << ".";
  if (!world.articulation.empty()) {
    out << " Articulated:";
    first = true;
    for (const auto& [name, state] : world.articulation) {
      out << (first ? " " : "; ") << name << " ("
          << (state == ArticulationState::Open ? "open" : "closed") << ")";
      first = false;
    }
    out << ".";
  }
  return out.str();
}

}  // namespace dualplan
