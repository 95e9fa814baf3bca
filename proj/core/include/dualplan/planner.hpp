#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dualplan/graph.hpp"
#include "dualplan/pairs.hpp"
#include "dualplan/status.hpp"
#include "dualplan/world.hpp"

namespace dualplan {

enum class TieBreak { Lexicographic };

struct PlannerConfig {
  // Geometric band for simultaneous dual assignments: the two targets must be
  // strictly farther apart than d_across and no farther than d_reachable.
  double d_reachable = 0.8;
  double d_across = 0.15;
  TieBreak tie_break = TieBreak::Lexicographic;
  // When no two-node assignment survives filtering, allow a stage that moves
  // a single arm. Without it such stages end the run as infeasible.
  bool allow_idle_arm = true;

  // Wall-clock flavour for traces; per-type durations, stage duration is the
  // slower arm. Carries no weight in stage accounting.
  double occupy_duration_s = 3.0;
  double tooluse_duration_s = 5.0;
  double release_duration_s = 2.0;
  double operate_duration_s = 4.0;

  /// Throws PlanError{InvalidConfig} unless 0 <= d_across <= d_reachable.
  void check() const;
};

/// Candidate pools for one stage. common holds every Ready node; priority_*
/// holds the Ready nodes on an occupy-release path owned by that arm and
/// preempts common when nonempty. effective_* is what the selector actually
/// draws from after exclusions (the other arm's pair nodes, grasps for a busy
/// arm, two-arm nodes).
struct CandidateSets {
  std::set<std::string> common;
  std::set<std::string> priority_left;
  std::set<std::string> priority_right;
  std::set<std::string> effective_left;
  std::set<std::string> effective_right;
};

/// Which arm holds each open occupy-release pair (keyed by occupy id).
/// An arm owns at most one open pair: a gripper holds one thing.
struct PairOwnership {
  std::map<std::string, Arm> owner;

  std::optional<std::string> pair_of(Arm arm) const;
  bool arm_free(Arm arm) const { return !pair_of(arm).has_value(); }
};

struct DependencyViolation {
  std::string rule;  // "R1" or "R2"
  std::vector<std::string> witnesses;
  std::string message;
};

struct GeometryViolation {
  std::string check;  // "REACHABLE" or "ACROSS"
  double measured_m = 0;
};

struct RejectedAssignment {
  std::optional<std::string> left;
  std::optional<std::string> right;
  std::optional<std::string> joint;
  std::string reason;
};

struct ConsideredAssignment {
  std::optional<std::string> left;
  std::optional<std::string> right;
  std::optional<std::string> joint;
  double cost = 0;
};

/// One selected stage. Exactly one of {left and/or right, joint} is set.
struct StagePlan {
  std::optional<std::string> left;
  std::optional<std::string> right;
  std::optional<std::string> joint;
  double cost = 0;
  double left_cost = 0;
  double right_cost = 0;
  double duration_s = 0;
  bool terminal = false;  // consumed the Complete node
  std::vector<RejectedAssignment> rejected;    // audit: filtered candidates
  std::vector<ConsideredAssignment> considered;  // audit: survivors with costs

  std::vector<std::string> node_ids() const;
};

/// Immutable per-graph planning context: adjacency, extracted pairs and the
/// node-to-pair membership used for priority and ownership bookkeeping.
class PlannerContext {
 public:
  explicit PlannerContext(const TaskGraph& graph);

  const TaskGraph& graph() const { return *graph_; }
  const GraphIndex& index() const { return index_; }
  const std::vector<OccupyReleasePair>& pairs() const { return pairs_; }

  const OccupyReleasePair* pair(const std::string& pair_id) const;
  /// Pair whose path contains the node, if any.
  const OccupyReleasePair* pair_containing(const std::string& node_id) const;
  const TaskNode& node(const std::string& id) const;

 private:
  const TaskGraph* graph_;
  GraphIndex index_;
  std::vector<OccupyReleasePair> pairs_;
  std::map<std::string, std::string> node_to_pair_;
};

CandidateSets compute_candidates(const PlannerContext& ctx, const StatusMap& status,
                                 const PairOwnership& ownership);

/// Deadlock-avoidance filter over a tentative assignment.
///
/// R1: a grasp is rejected while its pair's release still waits on an undone
/// two-arm prerequisite outside the pair's own path; that prerequisite could
/// never run with the arm bound.
/// R2: if the assignment leaves both arms bound to open pairs, one of the two
/// pairs must be completable on its own (all outside prerequisites of its
/// release done) while the other has no two-arm outside prerequisite pending,
/// so the first can finish, free its arm and service the second.
/// Nodes assigned in the proposal count as done: a stage completes together.
std::optional<DependencyViolation> dependency_check(const PlannerContext& ctx,
                                                    const StatusMap& status,
                                                    const PairOwnership& ownership,
                                                    const StageAssignments& proposal);

/// Band check on a dual assignment: d_across < |target_l - target_r| <=
/// d_reachable. Single-arm and two-arm-node stages skip this.
std::optional<GeometryViolation> geometry_checks(const WorldState& world, const TaskNode& left,
                                                 const TaskNode& right,
                                                 const PlannerConfig& config);

/// Sum of each hand's distance to its assigned target; an idle arm adds 0.
double pair_cost(const WorldState& world, const TaskNode* left, const TaskNode* right);

struct StageSelection {
  std::optional<StagePlan> plan;  // nullopt: no feasible assignment
  std::vector<RejectedAssignment> rejected;
};

/// Evaluates dual assignments from effective_left x effective_right plus
/// two-arm singleton stages, filters them through the dependency and
/// geometry checks and returns the cheapest survivor (ties broken
/// lexicographically). Single-arm assignments are considered only when no
/// two-node assignment survives and allow_idle_arm is set. When just the
/// Complete node remains the terminal stage is returned.
StageSelection select_stage(const PlannerContext& ctx, const StatusMap& status,
                            const PairOwnership& ownership, const WorldState& world,
                            const ArmHoldings& holdings, const PlannerConfig& config);

enum class Outcome { Completed, Deadlock, Infeasible };

const char* to_string(Outcome outcome);

struct StageRecord {
  int stage = 0;  // 1-based
  StagePlan plan;
  WorldState world_before;
  WorldState world_after;
  ArmHoldings holdings_after;
};

struct ExecutionTrace {
  std::vector<StageRecord> stages;
  StatusMap final_status;
  int stage_count = 0;  // productive stages; the terminal stage is not counted
  Outcome outcome = Outcome::Infeasible;
  double total_duration_s = 0;

  /// One JSON line per stage:
  /// {stage, left:{node,cost_m}|null, right:{...}|null, joint:...,
  ///  rejected:[{left,right,reason}], world_after_digest}.
  std::string to_jsonl() const;
  std::string summary() const;
};

/// The full stage loop: recompute candidates, select a stage, apply its
/// effects, mark nodes done, repeat until only Complete remained and was
/// consumed. Deterministic for fixed inputs. Planning failures land in
/// outcome, only contract violations (unknown objects) throw.
ExecutionTrace run_inference(const TaskGraph& graph, const WorldState& world,
                             const PlannerConfig& config);

struct SingleArmPlan {
  int stage_count = 0;  // non-Complete nodes
  std::vector<std::string> order;
};

/// One arm, one node per stage, lexicographic among ready nodes.
SingleArmPlan single_arm_plan(const TaskGraph& graph);

/// Mean of single/method stage ratios, as a percentage.
double stage_efficiency_pct(const std::vector<std::pair<int, int>>& single_vs_method);

}  // namespace dualplan
