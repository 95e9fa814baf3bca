#pragma once

#include <map>
#include <optional>
#include <string>

#include "dualplan/graph.hpp"

namespace dualplan {

struct Vec3 {
  double x = 0, y = 0, z = 0;
  bool operator==(const Vec3&) const = default;
};

double distance(const Vec3& a, const Vec3& b);

enum class ArticulationState { Open, Closed };

/// Symbolic stand-in for perception: ground-truth object positions, the two
/// hand home positions and containment/articulation relations. Values only;
/// stage effects produce a new state.
struct WorldState {
  std::map<std::string, Vec3> objects;
  std::map<std::string, std::string> containers;  // object -> enclosing object
  std::map<std::string, ArticulationState> articulation;
  Vec3 left_hand;
  Vec3 right_hand;

  const Vec3& hand(Arm arm) const { return arm == Arm::Left ? left_hand : right_hand; }
};

struct Holding {
  enum class Kind { Free, Object, Tool };
  Kind kind = Kind::Free;
  std::string name;

  bool is_free() const { return kind == Kind::Free; }
  bool holds(std::string_view object) const { return kind != Kind::Free && name == object; }

  static Holding free() { return {}; }
  static Holding object(std::string name) { return {Kind::Object, std::move(name)}; }
  static Holding tool(std::string name) { return {Kind::Tool, std::move(name)}; }

  bool operator==(const Holding&) const = default;
};

struct ArmHoldings {
  Holding left;
  Holding right;

  Holding& of(Arm arm) { return arm == Arm::Left ? left : right; }
  const Holding& of(Arm arm) const { return arm == Arm::Left ? left : right; }

  bool operator==(const ArmHoldings&) const = default;
};

/// What runs in one stage: at most one node per arm, or a single two-arm node.
struct StageAssignments {
  std::optional<std::string> left;
  std::optional<std::string> right;
  std::optional<std::string> joint;
};

/// Current position of the node's target object. Throws
/// PlanError{UnknownObject} when the world does not know the object.
Vec3 target_position(const WorldState& world, const TaskNode& node);

/// Euclidean distance from the arm's hand to the node's target; 0 for the
/// Complete node.
double hand_distance(const WorldState& world, Arm arm, const TaskNode& node);

/// Applies one stage's declarative effects and returns the next world and
/// holdings. Occupy attaches the object to the hand, Release places it at the
/// node's destination and frees the arm, ToolUse keeps the tool in the
/// gripper, Operate toggles articulation, Complete changes nothing. Throws
/// PlanError{ArmNotEligible} or PlanError{UnknownObject} on contract
/// violations; scheduling legality is the planner's job.
std::pair<WorldState, ArmHoldings> apply_stage_effects(const WorldState& world,
                                                       const ArmHoldings& holdings,
                                                       const TaskGraph& graph,
                                                       const StageAssignments& assignments);

}  // namespace dualplan
