#pragma once

#include <string>

#include "dualplan/generator.hpp"
#include "dualplan/planner.hpp"

namespace dualplan {

/// Settings shared by the CLI and the benchmark harness, loadable from a JSON
/// file. Recognized keys:
///   planner.d_reachable_m, planner.d_across_m, planner.allow_idle_arm,
///   planner.tie_break ("lexicographic"),
///   sim.occupy_s, sim.tooluse_s, sim.release_s, sim.operate_s,
///   provider.url, provider.model, provider.auth_env, provider.timeout_s,
///   bench.manifest
struct AppConfig {
  PlannerConfig planner;
  HttpProviderConfig provider;
  std::string bench_manifest;  // empty: use the built-in default location
};

AppConfig load_app_config(const std::string& path);
AppConfig parse_app_config(const std::string& text);

}  // namespace dualplan
