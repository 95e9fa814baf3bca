#include <doctest.h>

#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "dualplan/error.hpp"
#include "dualplan/generator.hpp"
#include "dualplan/validate.hpp"
#include "support/builders.hpp"
#include "support/random_graphs.hpp"

using namespace dualplan;
using namespace dualplan::test;

namespace {

std::string fenced(const std::string& payload) {
  return "Here is the graph.\n```json\n" + payload + "\n```\n";
}

std::string valid_graph_payload() {
  GraphDocument doc;
  doc.task_name = "put away";
  doc.instruction = "Put the apple on the plate.";
  doc.graph = minimal_pair_graph();
  return serialize_task_graph(doc);
}

std::string invalid_graph_payload() {
  GraphDocument doc;
  doc.task_name = "put away";
  doc.instruction = "Put the apple on the plate.";
  doc.graph = make_graph({occupy("grasp-mug", "mug"), complete()}, {{"grasp-mug", "complete"}});
  return serialize_task_graph(doc);
}

GenerationRequest request() {
  GenerationRequest req;
  req.instruction = "Put the apple on the plate.";
  req.environment_description = "Objects: apple (near right); plate (far center).";
  req.max_attempts = 3;
  return req;
}

}  // namespace

TEST_CASE("an invalid graph is reflected and the retry accepted") {
  ScriptedProvider provider({fenced(invalid_graph_payload()), fenced(valid_graph_payload())});
  GenerationResult result = generate_graph(request(), provider);
  REQUIRE(result.ok());
  REQUIRE(result.exchanges.size() == 2);
  CHECK_FALSE(result.exchanges[0].accepted);
  bool saw_unmatched = false;
  for (const auto& d : result.exchanges[0].diagnostics) {
    if (d.code == codes::kUnmatchedOccupy) saw_unmatched = true;
  }
  CHECK(saw_unmatched);
  CHECK(result.exchanges[1].accepted);
  // The retry prompt carries the feedback.
  CHECK(result.exchanges[1].prompt_text.find("UNMATCHED_OCCUPY") != std::string::npos);
  CHECK(result.exchanges[1].prompt_text.find("grasp-mug") != std::string::npos);
  CHECK(validate_graph(result.document->graph).ok());
}

TEST_CASE("a valid first answer is accepted immediately") {
  ScriptedProvider provider({fenced(valid_graph_payload())});
  GenerationResult result = generate_graph(request(), provider);
  REQUIRE(result.ok());
  CHECK(result.exchanges.size() == 1);
  CHECK(result.exchanges[0].accepted);
}

TEST_CASE("pure prose exhausts the attempt budget") {
  ScriptedProvider provider({"I will think about it and get back to you."});
  GenerationResult result = generate_graph(request(), provider);
  CHECK(result.status == GenerationStatus::AttemptsExhausted);
  CHECK(result.exchanges.size() == 3);
  for (const auto& exchange : result.exchanges) {
    REQUIRE(exchange.diagnostics.size() == 1);
    CHECK(exchange.diagnostics[0].code == "NO_PAYLOAD");
    CHECK_FALSE(exchange.accepted);
  }
}

TEST_CASE("reflection feedback is deterministic, numbered and sorted") {
  std::vector<ExchangeDiagnostic> diagnostics{
      {"UNMATCHED_OCCUPY", {"grasp-mug"}, "Occupy has no matching downstream Release"},
      {"CYCLE", {"a", "b"}, "nodes form a dependency cycle"},
      {"DISCONNECTED", {"stray"}, "node has no path to the Complete node"},
  };
  const std::string feedback = build_reflection_feedback(diagnostics);
  CHECK(feedback ==
        "1. CYCLE on 'a' 'b': nodes form a dependency cycle (dependencies must form a directed "
        "acyclic graph)\n"
        "2. DISCONNECTED on 'stray': node has no path to the Complete node (every node must have "
        "a path to the Complete node)\n"
        "3. UNMATCHED_OCCUPY on 'grasp-mug': Occupy has no matching downstream Release (every "
        "Occupy must reach a matching Release of the same object)\n");
  CHECK(build_reflection_feedback(diagnostics) == feedback);
}

TEST_CASE("adversarial providers never get an invalid graph accepted") {
  Rng rng(808);
  for (int round = 0; round < 40; ++round) {
    GraphDocument doc = random_document(rng);
    std::string payload;
    try {
      payload = serialize_task_graph(doc);
    } catch (const std::exception&) {
      continue;
    }
    ScriptedProvider provider({fenced(payload)});
    GenerationRequest req = request();
    req.max_attempts = 1;
    GenerationResult result = generate_graph(req, provider);
    if (result.ok()) {
      CHECK(validate_graph(result.document->graph).ok());
    } else {
      CHECK(result.exchanges.size() == 1);
    }
  }
}

TEST_CASE("attempt accounting matches the budget") {
  ScriptedProvider provider({"no payload here"});
  GenerationRequest req = request();
  req.max_attempts = 5;
  GenerationResult result = generate_graph(req, provider);
  CHECK(result.exchanges.size() == 5);
  CHECK(provider.calls() == 5);
}

TEST_CASE("exchange logs are one JSON object per line") {
  ScriptedProvider provider({fenced(invalid_graph_payload()), fenced(valid_graph_payload())});
  GenerationResult result = generate_graph(request(), provider);
  std::ostringstream log;
  write_exchange_log(log, result.exchanges);
  const std::string text = log.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);
  CHECK(text.find("\"accepted\":true") != std::string::npos);
}

TEST_CASE("the loop is deterministic for a deterministic provider") {
  auto run_once = [] {
    ScriptedProvider provider({fenced(invalid_graph_payload()), fenced(valid_graph_payload())});
    GenerationResult result = generate_graph(request(), provider);
    std::ostringstream log;
    write_exchange_log(log, result.exchanges);
    return log.str();
  };
  CHECK(run_once() == run_once());
}

TEST_CASE("transport failures surface as ProviderError") {
  HttpProviderConfig config;
  config.url = "http://127.0.0.1:9/v1/chat/completions";  // discard port: refused
  config.timeout_s = 2;
  HttpProvider provider(config);
  GenerationResult result = generate_graph(request(), provider);
  CHECK(result.status == GenerationStatus::ProviderError);
  CHECK(result.exchanges.size() == 1);
  CHECK_FALSE(result.error_message.empty());
}

TEST_CASE("the http provider speaks chat-completion against a local server") {
  httplib::Server server;
  std::string seen_body;
  server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    seen_body = req.body;
    nlohmann::json reply;
    reply["choices"] = nlohmann::json::array();
    reply["choices"].push_back(
        {{"message", {{"role", "assistant"}, {"content", fenced(valid_graph_payload())}}}});
    res.set_content(reply.dump(), "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread serving([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  HttpProviderConfig config;
  config.url = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
  config.model = "test-model";
  HttpProvider provider(config);
  GenerationResult result = generate_graph(request(), provider);

  server.stop();
  serving.join();

  REQUIRE(result.ok());
  CHECK(result.exchanges.size() == 1);
  CHECK(seen_body.find("\"model\":\"test-model\"") != std::string::npos);
  CHECK(seen_body.find("Put the apple on the plate.") != std::string::npos);
}

TEST_CASE("world descriptions name objects with coarse layout") {
  WorldState world = load_fixture_world("task2");
  const std::string description = describe_world(world);
  CHECK(description.find("apple") != std::string::npos);
  CHECK(description.find("drawer") != std::string::npos);
  CHECK(description.find("closed") != std::string::npos);
  CHECK(description.find("0.2") == std::string::npos);  // no raw coordinates
}
