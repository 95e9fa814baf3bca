#include "dualplan/config.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dualplan/error.hpp"

namespace dualplan {

using nlohmann::json;

AppConfig parse_app_config(const std::string& text) {
  json root = json::parse(text, nullptr, false);
  if (root.is_discarded() || !root.is_object()) {
    throw PlanError(Errc::InvalidConfig, "config file is not a JSON object");
  }
  AppConfig config;

  auto number = [&](const json& section, const char* key, double& into) {
    if (!section.contains(key)) return;
    if (!section[key].is_number()) {
      throw PlanError(Errc::InvalidConfig, std::string(key) + " must be a number");
    }
    into = section[key].get<double>();
  };
  auto text_field = [&](const json& section, const char* key, std::string& into) {
    if (!section.contains(key)) return;
    if (!section[key].is_string()) {
      throw PlanError(Errc::InvalidConfig, std::string(key) + " must be a string");
    }
    into = section[key].get<std::string>();
  };

  if (root.contains("planner")) {
    const json& planner = root["planner"];
    number(planner, "d_reachable_m", config.planner.d_reachable);
    number(planner, "d_across_m", config.planner.d_across);
    if (planner.contains("allow_idle_arm")) {
      if (!planner["allow_idle_arm"].is_boolean()) {
        throw PlanError(Errc::InvalidConfig, "planner.allow_idle_arm must be a boolean");
      }
      config.planner.allow_idle_arm = planner["allow_idle_arm"].get<bool>();
    }
    std::string tie_break = "lexicographic";
    text_field(planner, "tie_break", tie_break);
    if (tie_break != "lexicographic") {
      throw PlanError(Errc::InvalidConfig, "unknown planner.tie_break '" + tie_break + "'");
    }
  }
  if (root.contains("sim")) {
    const json& sim = root["sim"];
    number(sim, "occupy_s", config.planner.occupy_duration_s);
    number(sim, "tooluse_s", config.planner.tooluse_duration_s);
    number(sim, "release_s", config.planner.release_duration_s);
    number(sim, "operate_s", config.planner.operate_duration_s);
  }
  if (root.contains("provider")) {
    const json& provider = root["provider"];
    text_field(provider, "url", config.provider.url);
    text_field(provider, "model", config.provider.model);
    text_field(provider, "auth_env", config.provider.auth_env);
    number(provider, "timeout_s", config.provider.timeout_s);
  }
  if (root.contains("bench")) {
    text_field(root["bench"], "manifest", config.bench_manifest);
  }
  config.planner.check();
  return config;
}

AppConfig load_app_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PlanError(Errc::Io, "cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_app_config(buffer.str());
}

}  // namespace dualplan
