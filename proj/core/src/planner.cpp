#include "dualplan/planner.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dualplan/error.hpp"
#include "dualplan/io.hpp"

namespace dualplan {

using nlohmann::ordered_json;

void PlannerConfig::check() const {
  if (!(d_across >= 0.0) || !(d_across <= d_reachable)) {
    throw PlanError(Errc::InvalidConfig, "need 0 <= d_across <= d_reachable");
  }
}

std::optional<std::string> PairOwnership::pair_of(Arm arm) const {
  for (const auto& [pair_id, owning_arm] : owner) {
    if (owning_arm == arm) return pair_id;
  }
  return std::nullopt;
}

std::vector<std::string> StagePlan::node_ids() const {
  std::vector<std::string> ids;
  if (joint) ids.push_back(*joint);
  if (left) ids.push_back(*left);
  if (right) ids.push_back(*right);
  return ids;
}

const char* to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::Completed: return "completed";
    case Outcome::Deadlock: return "deadlock";
    case Outcome::Infeasible: return "infeasible";
  }
  return "?";
}

PlannerContext::PlannerContext(const TaskGraph& graph)
    : graph_(&graph), index_(graph), pairs_(extract_pairs(graph)) {
  for (const auto& pair : pairs_) {
    for (const auto& id : pair.path_ids) node_to_pair_[id] = pair.id();
  }
}

const OccupyReleasePair* PlannerContext::pair(const std::string& pair_id) const {
  for (const auto& pair : pairs_) {
    if (pair.id() == pair_id) return &pair;
  }
  return nullptr;
}

const OccupyReleasePair* PlannerContext::pair_containing(const std::string& node_id) const {
  auto it = node_to_pair_.find(node_id);
  return it == node_to_pair_.end() ? nullptr : pair(it->second);
}

const TaskNode& PlannerContext::node(const std::string& id) const {
  const TaskNode* node = graph_->find(id);
  if (node == nullptr) throw PlanError(Errc::UnknownObject, "node '" + id + "' not in graph");
  return *node;
}

CandidateSets compute_candidates(const PlannerContext& ctx, const StatusMap& status,
                                 const PairOwnership& ownership) {
  CandidateSets cs;
  cs.common = ready_nodes(ctx.graph(), status);

  for (Arm arm : {Arm::Left, Arm::Right}) {
    std::set<std::string>& priority = arm == Arm::Left ? cs.priority_left : cs.priority_right;
    if (auto pair_id = ownership.pair_of(arm)) {
      const OccupyReleasePair* pair = ctx.pair(*pair_id);
      if (pair != nullptr) {
        for (const auto& id : pair->path_ids) {
          if (cs.common.count(id)) priority.insert(id);
        }
      }
    }
  }

  for (Arm arm : {Arm::Left, Arm::Right}) {
    const std::set<std::string>& priority =
        arm == Arm::Left ? cs.priority_left : cs.priority_right;
    std::set<std::string>& effective =
        arm == Arm::Left ? cs.effective_left : cs.effective_right;
    const std::set<std::string>& base = priority.empty() ? cs.common : priority;
    const bool free_arm = ownership.arm_free(arm);

    for (const auto& id : base) {
      const TaskNode& node = ctx.node(id);
      if (node.type == TaskType::Complete) continue;  // terminal stage, handled apart
      if (node.arms_required == 2) continue;          // runs as a joint singleton
      const OccupyReleasePair* in_pair = ctx.pair_containing(id);
      if (in_pair != nullptr) {
        if (id == in_pair->occupy_id) {
          if (!free_arm) continue;  // a bound gripper cannot grasp
        } else {
          auto owner = ownership.owner.find(in_pair->id());
          if (owner == ownership.owner.end() || owner->second != arm) continue;
        }
      } else if (!free_arm) {
        continue;  // busy arms stay on their own pair's work
      }
      effective.insert(id);
    }
  }
  return cs;
}

std::optional<DependencyViolation> dependency_check(const PlannerContext& ctx,
                                                    const StatusMap& status,
                                                    const PairOwnership& ownership,
                                                    const StageAssignments& proposal) {
  std::set<std::string> proposed;
  if (proposal.left) proposed.insert(*proposal.left);
  if (proposal.right) proposed.insert(*proposal.right);
  if (proposal.joint) proposed.insert(*proposal.joint);

  auto done_after = [&](const std::string& id) {
    if (proposed.count(id)) return true;
    auto it = status.find(id);
    return it != status.end() && it->second == NodeStatus::Done;
  };

  // R1: a grasp whose release waits on an undone two-arm prerequisite outside
  // the pair would bind this arm with no way to ever free it.
  for (const auto& id : proposed) {
    const OccupyReleasePair* pair = ctx.pair_containing(id);
    if (pair == nullptr || pair->occupy_id != id) continue;
    for (const auto& anc : out_of_path_ancestors(ctx.index(), *pair)) {
      if (done_after(anc)) continue;
      if (ctx.node(anc).arms_required == 2) {
        return DependencyViolation{
            "R1",
            {id, anc},
            "grasping '" + id + "' would wait forever on two-arm node '" + anc + "'"};
      }
    }
  }

  // Ownership as it would stand after the stage.
  std::map<std::string, Arm> owners = ownership.owner;
  auto apply = [&](Arm arm, const std::optional<std::string>& id) {
    if (!id) return;
    const OccupyReleasePair* pair = ctx.pair_containing(*id);
    if (pair == nullptr) return;
    if (*id == pair->occupy_id) {
      owners[pair->id()] = arm;
    } else if (*id == pair->release_id) {
      owners.erase(pair->id());
    }
  };
  apply(Arm::Left, proposal.left);
  apply(Arm::Right, proposal.right);

  std::optional<std::string> left_pair, right_pair;
  for (const auto& [pair_id, arm] : owners) {
    (arm == Arm::Left ? left_pair : right_pair) = pair_id;
  }
  if (!left_pair || !right_pair) return std::nullopt;

  // R2: with both arms bound, one pair must be completable alone while the
  // other has no pending two-arm prerequisite outside its path.
  auto externals = [&](const std::string& pair_id) {
    return out_of_path_ancestors(ctx.index(), *ctx.pair(pair_id));
  };
  auto self_sufficient = [&](const std::string& pair_id) {
    for (const auto& anc : externals(pair_id)) {
      if (!done_after(anc)) return false;
    }
    return true;
  };
  auto no_two_arm_external = [&](const std::string& pair_id) {
    for (const auto& anc : externals(pair_id)) {
      if (!done_after(anc) && ctx.node(anc).arms_required == 2) return false;
    }
    return true;
  };
  const bool left_first = self_sufficient(*left_pair) && no_two_arm_external(*right_pair);
  const bool right_first = self_sufficient(*right_pair) && no_two_arm_external(*left_pair);
  if (left_first || right_first) return std::nullopt;
  return DependencyViolation{
      "R2",
      {*left_pair, *right_pair},
      "neither open pair could run to completion and free its arm"};
}

std::optional<GeometryViolation> geometry_checks(const WorldState& world, const TaskNode& left,
                                                 const TaskNode& right,
                                                 const PlannerConfig& config) {
  const double gap = distance(target_position(world, left), target_position(world, right));
  if (gap > config.d_reachable) return GeometryViolation{"REACHABLE", gap};
  if (gap <= config.d_across) return GeometryViolation{"ACROSS", gap};
  return std::nullopt;
}

double pair_cost(const WorldState& world, const TaskNode* left, const TaskNode* right) {
  double cost = 0;
  if (left != nullptr) cost += hand_distance(world, Arm::Left, *left);
  if (right != nullptr) cost += hand_distance(world, Arm::Right, *right);
  return cost;
}

namespace {

double node_duration(const TaskNode& node, const PlannerConfig& config) {
  switch (node.type) {
    case TaskType::Occupy: return config.occupy_duration_s;
    case TaskType::ToolUse: return config.tooluse_duration_s;
    case TaskType::Release: return config.release_duration_s;
    case TaskType::Operate: return config.operate_duration_s;
    case TaskType::Complete: return 0.0;
  }
  return 0.0;
}

// Deterministic order among equal-cost survivors.
std::tuple<double, std::string, std::string, std::string> selection_key(const StagePlan& plan) {
  return {plan.cost, plan.left.value_or(""), plan.right.value_or(""), plan.joint.value_or("")};
}

}  // namespace

StageSelection select_stage(const PlannerContext& ctx, const StatusMap& status,
                            const PairOwnership& ownership, const WorldState& world,
                            const ArmHoldings& holdings, const PlannerConfig& config) {
  StageSelection selection;

  const std::set<std::string> ready = ready_nodes(ctx.graph(), status);
  const TaskNode* complete = ctx.graph().complete_node();
  if (complete != nullptr && ready.count(complete->id)) {
    StagePlan plan;
    plan.joint = complete->id;
    plan.terminal = true;
    selection.plan = std::move(plan);
    return selection;
  }

  const CandidateSets cs = compute_candidates(ctx, status, ownership);
  std::vector<StagePlan> survivors;

  auto evaluate = [&](std::optional<std::string> left, std::optional<std::string> right,
                      std::optional<std::string> joint) {
    StageAssignments proposal{left, right, joint};
    if (auto violation = dependency_check(ctx, status, ownership, proposal)) {
      selection.rejected.push_back({left, right, joint, "DEPENDENCY_" + violation->rule});
      return;
    }
    if (left && right) {
      if (auto violation =
              geometry_checks(world, ctx.node(*left), ctx.node(*right), config)) {
        selection.rejected.push_back({left, right, joint, violation->check});
        return;
      }
    }
    StagePlan plan;
    plan.left = left;
    plan.right = right;
    plan.joint = joint;
    if (joint) {
      const TaskNode& node = ctx.node(*joint);
      plan.left_cost = hand_distance(world, Arm::Left, node);
      plan.right_cost = hand_distance(world, Arm::Right, node);
      plan.duration_s = node_duration(node, config);
    } else {
      if (left) {
        const TaskNode& node = ctx.node(*left);
        plan.left_cost = hand_distance(world, Arm::Left, node);
        plan.duration_s = std::max(plan.duration_s, node_duration(node, config));
      }
      if (right) {
        const TaskNode& node = ctx.node(*right);
        plan.right_cost = hand_distance(world, Arm::Right, node);
        plan.duration_s = std::max(plan.duration_s, node_duration(node, config));
      }
    }
    plan.cost = plan.left_cost + plan.right_cost;
    survivors.push_back(std::move(plan));
  };

  // Tier 1: both arms productive. Dual assignments plus two-arm singletons.
  for (const auto& left : cs.effective_left) {
    for (const auto& right : cs.effective_right) {
      if (left != right) evaluate(left, right, std::nullopt);
    }
  }
  const bool both_arms_free = ownership.arm_free(Arm::Left) && ownership.arm_free(Arm::Right) &&
                              holdings.left.is_free() && holdings.right.is_free();
  if (both_arms_free) {
    for (const auto& id : ready) {
      if (ctx.node(id).arms_required == 2) evaluate(std::nullopt, std::nullopt, id);
    }
  }

  // Tier 2: one arm moves while the other idles, only when no two-node
  // assignment survived.
  if (survivors.empty() && config.allow_idle_arm) {
    for (const auto& left : cs.effective_left) evaluate(left, std::nullopt, std::nullopt);
    for (const auto& right : cs.effective_right) evaluate(std::nullopt, right, std::nullopt);
  }

  if (survivors.empty()) return selection;

  auto best = std::min_element(survivors.begin(), survivors.end(),
                               [](const StagePlan& a, const StagePlan& b) {
                                 return selection_key(a) < selection_key(b);
                               });
  StagePlan plan = *best;
  for (const auto& s : survivors) {
    plan.considered.push_back({s.left, s.right, s.joint, s.cost});
  }
  plan.rejected = selection.rejected;
  selection.plan = std::move(plan);
  return selection;
}

ExecutionTrace run_inference(const TaskGraph& graph, const WorldState& world,
                             const PlannerConfig& config) {
  config.check();
  PlannerContext ctx(graph);
  ExecutionTrace trace;

  StatusMap status = initial_status(graph);
  PairOwnership ownership;
  ArmHoldings holdings;
  WorldState current = world;
  int stage_number = 0;

  while (true) {
    StageSelection selection = select_stage(ctx, status, ownership, current, holdings, config);
    if (!selection.plan) {
      const bool holding_something = !ownership.owner.empty();
      trace.outcome = holding_something ? Outcome::Deadlock : Outcome::Infeasible;
      break;
    }
    StagePlan plan = std::move(*selection.plan);

    StageRecord record;
    record.stage = ++stage_number;
    record.world_before = current;

    StageAssignments assignments{plan.left, plan.right, plan.joint};
    if (plan.terminal) assignments.joint = std::nullopt;  // the terminal moves nothing
    std::tie(current, holdings) = apply_stage_effects(current, holdings, graph, assignments);

    for (Arm arm : {Arm::Left, Arm::Right}) {
      const std::optional<std::string>& assigned = arm == Arm::Left ? plan.left : plan.right;
      if (!assigned) continue;
      const OccupyReleasePair* pair = ctx.pair_containing(*assigned);
      if (pair == nullptr) continue;
      if (*assigned == pair->occupy_id) {
        ownership.owner[pair->id()] = arm;
      } else if (*assigned == pair->release_id) {
        ownership.owner.erase(pair->id());
      }
    }

    status = mark_done(std::move(status), graph, plan.node_ids());

    record.world_after = current;
    record.holdings_after = holdings;
    record.plan = std::move(plan);
    trace.total_duration_s += record.plan.duration_s;
    trace.stages.push_back(std::move(record));

    if (trace.stages.back().plan.terminal) {
      trace.outcome = Outcome::Completed;
      break;
    }
  }

  trace.final_status = status;
  trace.stage_count = static_cast<int>(trace.stages.size());
  if (!trace.stages.empty() && trace.stages.back().plan.terminal) trace.stage_count -= 1;
  return trace;
}

SingleArmPlan single_arm_plan(const TaskGraph& graph) {
  SingleArmPlan plan;
  StatusMap status = initial_status(graph);
  const std::size_t total = graph.nodes.size();
  while (plan.order.size() < total) {
    std::set<std::string> ready = ready_nodes(graph, status);
    if (ready.empty()) {
      throw PlanError(Errc::FixtureInvalid, "graph is not executable in topological order");
    }
    const std::string next = *ready.begin();
    status = mark_done(std::move(status), graph, {next});
    if (graph.find(next)->type != TaskType::Complete) plan.stage_count += 1;
    plan.order.push_back(next);
  }
  return plan;
}

double stage_efficiency_pct(const std::vector<std::pair<int, int>>& single_vs_method) {
  if (single_vs_method.empty()) {
    throw std::invalid_argument("stage_efficiency_pct: no task ratios given");
  }
  double total = 0;
  for (const auto& [single_stages, method_stages] : single_vs_method) {
    if (method_stages < 1) {
      throw std::invalid_argument("stage_efficiency_pct: method stage count must be >= 1");
    }
    total += static_cast<double>(single_stages) / static_cast<double>(method_stages);
  }
  return total / static_cast<double>(single_vs_method.size()) * 100.0;
}

namespace {

ordered_json arm_entry(const std::optional<std::string>& node, double cost) {
  if (!node) return nullptr;
  ordered_json j;
  j["node"] = *node;
  j["cost_m"] = cost;
  return j;
}

}  // namespace

std::string ExecutionTrace::to_jsonl() const {
  std::ostringstream out;
  for (const auto& record : stages) {
    ordered_json line;
    line["stage"] = record.stage;
    line["left"] = arm_entry(record.plan.left, record.plan.left_cost);
    line["right"] = arm_entry(record.plan.right, record.plan.right_cost);
    line["joint"] = arm_entry(record.plan.joint, record.plan.cost);
    line["rejected"] = ordered_json::array();
    for (const auto& rejected : record.plan.rejected) {
      ordered_json r;
      r["left"] = rejected.left ? ordered_json(*rejected.left) : ordered_json(nullptr);
      r["right"] = rejected.right ? ordered_json(*rejected.right) : ordered_json(nullptr);
      if (rejected.joint) r["joint"] = *rejected.joint;
      r["reason"] = rejected.reason;
      line["rejected"].push_back(std::move(r));
    }
    line["world_after_digest"] = world_digest(record.world_after);
    out << line.dump() << "\n";
  }
  return out.str();
}

std::string ExecutionTrace::summary() const {
  std::ostringstream out;
  for (const auto& record : stages) {
    out << "stage " << record.stage << ":";
    if (record.plan.joint) {
      out << (record.plan.terminal ? " complete " : " joint ") << *record.plan.joint;
    }
    if (record.plan.left) out << " left=" << *record.plan.left;
    if (record.plan.right) out << " right=" << *record.plan.right;
    char buf[64];
    std::snprintf(buf, sizeof(buf), " (cost %.3f m, %.1f s)", record.plan.cost,
                  record.plan.duration_s);
    out << buf << "\n";
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "outcome: %s, %d stage%s, %.1f s simulated\n",
                to_string(outcome), stage_count, stage_count == 1 ? "" : "s", total_duration_s);
  out << buf;
  return out.str();
}

}  // namespace dualplan
