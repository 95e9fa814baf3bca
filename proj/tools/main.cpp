// dualplan: validate, plan, benchmark and generate dual-arm task graphs.
//
// Exit codes: 0 success, 1 validation errors, 2 planning infeasible or over
// budget, 3 provider failure, 4 usage or I/O trouble.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dualplan/bench.hpp"
#include "dualplan/config.hpp"
#include "dualplan/error.hpp"
#include "dualplan/generator.hpp"
#include "dualplan/io.hpp"
#include "dualplan/oracle.hpp"
#include "dualplan/planner.hpp"
#include "dualplan/validate.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitPlanning = 2;
constexpr int kExitProvider = 3;
constexpr int kExitUsage = 4;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw dualplan::PlanError(dualplan::Errc::Io, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw dualplan::PlanError(dualplan::Errc::Io, "cannot write '" + path + "'");
  out << content;
}

dualplan::AppConfig config_from(const std::string& path) {
  if (path.empty()) return dualplan::AppConfig{};
  return dualplan::load_app_config(path);
}

std::string default_manifest(const dualplan::AppConfig& config, const std::string& fixtures_flag) {
  if (!config.bench_manifest.empty()) return config.bench_manifest;
  std::string dir = fixtures_flag;
  if (dir.empty()) {
    if (const char* env = std::getenv("DUALPLAN_FIXTURES")) dir = env;
  }
  if (dir.empty()) dir = DUALPLAN_DEFAULT_FIXTURES;
  return (std::filesystem::path(dir) / "benchmark.json").string();
}

struct ParsedGraph {
  dualplan::GraphDocument document;
};

// Parses and prints diagnostics; returns nullopt after printing on failure.
std::optional<ParsedGraph> load_graph(const std::string& path) {
  dualplan::ParseResult parsed = dualplan::parse_task_graph(read_file(path));
  if (!parsed.ok()) {
    std::cerr << path << " does not parse:\n" << parsed.diagnostics_text();
    return std::nullopt;
  }
  for (const auto& d : parsed.diagnostics) {
    if (d.severity == dualplan::ParseDiagnostic::Severity::Warning) {
      std::cerr << "warning at " << d.line << ":" << d.column << " [" << d.code << "] "
                << d.message << "\n";
    }
  }
  return ParsedGraph{std::move(*parsed.document)};
}

int cmd_validate(const std::string& graph_path, bool as_json) {
  auto loaded = load_graph(graph_path);
  if (!loaded) return kExitValidation;
  dualplan::ValidationReport report = dualplan::validate_graph(loaded->document.graph);
  if (as_json) {
    nlohmann::ordered_json out;
    out["valid"] = report.ok();
    out["errors"] = nlohmann::ordered_json::array();
    for (const auto& e : report.errors) {
      out["errors"].push_back(
          nlohmann::ordered_json{{"code", e.code}, {"ids", e.ids}, {"message", e.message}});
    }
    std::cout << out.dump(2) << "\n";
  } else if (report.ok()) {
    std::cout << graph_path << ": valid (" << loaded->document.graph.nodes.size() << " nodes, "
              << loaded->document.graph.edges.size() << " edges)\n";
  } else {
    std::cout << report.summary();
  }
  return report.ok() ? kExitOk : kExitValidation;
}

int cmd_fmt(const std::string& path) {
  if (path.ends_with(".world.json")) {
    std::cout << dualplan::serialize_world(dualplan::parse_world(read_file(path)));
    return kExitOk;
  }
  auto loaded = load_graph(path);
  if (!loaded) return kExitValidation;
  std::cout << dualplan::serialize_task_graph(loaded->document);
  return kExitOk;
}

int cmd_plan(const std::string& graph_path, const std::string& world_path,
             const std::string& trace_path, const std::string& dot_path,
             const dualplan::AppConfig& config) {
  auto loaded = load_graph(graph_path);
  if (!loaded) return kExitValidation;
  dualplan::ValidationReport report = dualplan::validate_graph(loaded->document.graph);
  if (!report.ok()) {
    std::cout << report.summary();
    return kExitValidation;
  }
  dualplan::WorldState world = dualplan::parse_world(read_file(world_path));
  dualplan::ExecutionTrace trace =
      dualplan::run_inference(loaded->document.graph, world, config.planner);
  std::cout << trace.summary();
  if (!trace_path.empty()) write_file(trace_path, trace.to_jsonl());
  if (!dot_path.empty()) write_file(dot_path, dualplan::export_dot(loaded->document.graph));
  return trace.outcome == dualplan::Outcome::Completed ? kExitOk : kExitPlanning;
}

int cmd_bench(const dualplan::AppConfig& config, const std::string& fixtures_flag,
              const std::string& json_path, bool with_oracle) {
  const std::string manifest = default_manifest(config, fixtures_flag);
  auto tasks = dualplan::load_benchmark_manifest(manifest);
  dualplan::BenchOptions options;
  options.planner = config.planner;
  options.run_oracle = with_oracle;
  dualplan::BenchReport report = dualplan::run_benchmark(tasks, options);
  std::cout << report.to_table();
  if (!json_path.empty()) write_file(json_path, report.to_json());
  return report.all_within_expected() ? kExitOk : kExitPlanning;
}

int cmd_gen(const std::string& instruction, const std::string& env_path,
            const std::string& provider_name, const std::string& mock_script,
            const std::string& out_path, const std::string& log_path, int max_attempts,
            const dualplan::AppConfig& config) {
  dualplan::GenerationRequest request;
  request.instruction = instruction;
  request.max_attempts = max_attempts;
  if (!env_path.empty()) {
    const std::string text = read_file(env_path);
    if (env_path.ends_with(".world.json")) {
      request.environment_description = dualplan::describe_world(dualplan::parse_world(text));
    } else {
      request.environment_description = text;
    }
  }

  std::unique_ptr<dualplan::Provider> provider;
  if (provider_name == "mock") {
    if (mock_script.empty()) {
      std::cerr << "--provider mock needs --mock-script <file> (a JSON array of responses)\n";
      return kExitUsage;
    }
    nlohmann::json script = nlohmann::json::parse(read_file(mock_script), nullptr, false);
    if (script.is_discarded() || !script.is_array()) {
      std::cerr << mock_script << " must be a JSON array of response strings\n";
      return kExitUsage;
    }
    std::vector<std::string> responses;
    for (const auto& entry : script) {
      if (!entry.is_string()) {
        std::cerr << mock_script << " must contain only strings\n";
        return kExitUsage;
      }
      responses.push_back(entry.get<std::string>());
    }
    provider = std::make_unique<dualplan::ScriptedProvider>(std::move(responses));
  } else if (provider_name == "http") {
    provider = std::make_unique<dualplan::HttpProvider>(config.provider);
  } else {
    std::cerr << "unknown provider '" << provider_name << "' (use mock or http)\n";
    return kExitUsage;
  }

  dualplan::GenerationResult result = dualplan::generate_graph(request, *provider);
  if (!log_path.empty()) {
    std::ofstream log(log_path, std::ios::binary);
    dualplan::write_exchange_log(log, result.exchanges);
  }
  std::cout << "attempts: " << result.exchanges.size() << "\n";
  if (!result.ok()) {
    std::cerr << "generation failed: " << result.error_message << "\n";
    return kExitProvider;
  }
  const std::string serialized = dualplan::serialize_task_graph(*result.document);
  if (out_path.empty()) {
    std::cout << serialized;
  } else {
    write_file(out_path, serialized);
    std::cout << "wrote " << out_path << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dual-arm task graph planner"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file")->envname("DUALPLAN_CONFIG");

  auto* validate = app.add_subcommand("validate", "Check a task graph's structure");
  std::string validate_graph_path;
  bool validate_json = false;
  validate->add_option("graph", validate_graph_path, "graph file (.taskgraph.json)")->required();
  validate->add_flag("--json", validate_json, "machine-readable report");

  auto* fmt = app.add_subcommand("fmt", "Print a graph in canonical form");
  std::string fmt_graph_path;
  fmt->add_option("graph", fmt_graph_path, "graph file")->required();

  auto* plan = app.add_subcommand("plan", "Run the dual-arm stage planner");
  std::string plan_graph_path, plan_world_path, plan_trace_path, plan_dot_path;
  plan->add_option("graph", plan_graph_path, "graph file")->required();
  plan->add_option("world", plan_world_path, "world file (.world.json)")->required();
  plan->add_option("--trace", plan_trace_path, "write a JSONL trace here");
  plan->add_option("--dot", plan_dot_path, "write a Graphviz rendering here");

  auto* bench = app.add_subcommand("bench", "Run the fixture benchmark suite");
  std::string bench_fixtures, bench_json;
  bool bench_no_oracle = false;
  bench->add_option("--fixtures", bench_fixtures, "fixture directory");
  bench->add_option("--json", bench_json, "write the machine report here");
  bench->add_flag("--no-oracle", bench_no_oracle, "skip the exhaustive optimality check");

  auto* gen = app.add_subcommand("gen", "Generate a graph from an instruction");
  std::string gen_instruction, gen_env, gen_provider = "mock", gen_script, gen_out, gen_log;
  int gen_attempts = 3;
  gen->add_option("--instruction", gen_instruction, "natural language instruction")->required();
  gen->add_option("--env", gen_env, "environment description (.world.json or plain text)");
  gen->add_option("--provider", gen_provider, "mock or http");
  gen->add_option("--mock-script", gen_script, "JSON array of scripted responses");
  gen->add_option("--out", gen_out, "write the accepted graph here");
  gen->add_option("--log", gen_log, "write the exchange log (JSONL) here");
  gen->add_option("--max-attempts", gen_attempts, "regeneration budget")->check(CLI::Range(1, 20));

  CLI11_PARSE(app, argc, argv);

  try {
    const dualplan::AppConfig config = config_from(config_path);
    if (*validate) return cmd_validate(validate_graph_path, validate_json);
    if (*fmt) return cmd_fmt(fmt_graph_path);
    if (*plan) {
      return cmd_plan(plan_graph_path, plan_world_path, plan_trace_path, plan_dot_path, config);
    }
    if (*bench) return cmd_bench(config, bench_fixtures, bench_json, !bench_no_oracle);
    if (*gen) {
      return cmd_gen(gen_instruction, gen_env, gen_provider, gen_script, gen_out, gen_log,
                     gen_attempts, config);
    }
  } catch (const dualplan::PlanError& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
      case dualplan::Errc::FixtureInvalid: return kExitValidation;
      case dualplan::Errc::ProviderTransport: return kExitProvider;
      default: return kExitUsage;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
