#pragma once

#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dualplan/io.hpp"
#include "dualplan/world.hpp"

namespace dualplan {

struct GenerationRequest {
  std::string instruction;
  std::string environment_description;
  int max_attempts = 3;
};

struct ExchangeDiagnostic {
  std::string code;
  std::vector<std::string> ids;
  std::string message;
};

/// One prompt/response round with its verdict.
struct ProviderExchange {
  int attempt_index = 1;
  std::string prompt_text;
  std::string raw_response;
  std::vector<ExchangeDiagnostic> diagnostics;
  bool accepted = false;
};

/// A text completion backend: prompt in, completion out. Implementations
/// throw PlanError{ProviderTransport} for transport trouble.
class Provider {
 public:
  virtual ~Provider() = default;
  virtual std::string complete(const std::string& prompt) = 0;
};

/// Test/demo backend that replays canned responses; the last one repeats once
/// the script is exhausted.
class ScriptedProvider : public Provider {
 public:
  explicit ScriptedProvider(std::vector<std::string> responses);
  std::string complete(const std::string& prompt) override;
  int calls() const { return calls_; }

 private:
  std::vector<std::string> responses_;
  int calls_ = 0;
};

struct HttpProviderConfig {
  std::string url = "https://api.openai.com/v1/chat/completions";
  std::string model = "gpt-4o";
  std::string auth_env = "DUALPLAN_API_KEY";  // name of the env var with the token
  double timeout_s = 60.0;
};

/// Minimal chat-completion client for any OpenAI-style endpoint.
class HttpProvider : public Provider {
 public:
  explicit HttpProvider(HttpProviderConfig config);
  std::string complete(const std::string& prompt) override;

 private:
  HttpProviderConfig config_;
};

enum class GenerationStatus { Ok, AttemptsExhausted, ProviderError };

struct GenerationResult {
  GenerationStatus status = GenerationStatus::AttemptsExhausted;
  std::optional<GraphDocument> document;  // set iff status == Ok
  std::vector<ProviderExchange> exchanges;
  std::string error_message;

  bool ok() const { return status == GenerationStatus::Ok; }
};

/// Version marker of the instruction template sent to providers.
inline constexpr int kPromptVersion = 1;

/// The fixed system text: task types, the occupy-release rule, the node
/// fields and the JSON wire schema.
std::string prompt_preamble();

/// Full prompt for one attempt; feedback from the previous rejection is
/// appended from the second attempt on.
std::string prompt_for_attempt(const GenerationRequest& request,
                               const std::vector<ExchangeDiagnostic>* previous_diagnostics);

/// Deterministic numbered list of the problems found, sorted by code then
/// ids, each naming the violated rule.
std::string build_reflection_feedback(const std::vector<ExchangeDiagnostic>& diagnostics);

/// Prompt, parse, validate, reflect, repeat. Every returned document passes
/// validate_graph with zero errors; every attempt is logged. Transport
/// failures end the loop with ProviderError.
GenerationResult generate_graph(const GenerationRequest& request, Provider& provider);

/// Exchange log as JSON Lines, one exchange per line.
void write_exchange_log(std::ostream& out, const std::vector<ProviderExchange>& exchanges);

/// Object names and coarse layout of a world, for prompts.
std::string describe_world(const WorldState& world);

}  // namespace dualplan
