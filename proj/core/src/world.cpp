#include "dualplan/world.hpp"

#include <cmath>

#include "dualplan/error.hpp"

namespace dualplan {

double distance(const Vec3& a, const Vec3& b) {
  const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

Vec3 target_position(const WorldState& world, const TaskNode& node) {
  auto it = world.objects.find(node.target_object);
  if (it == world.objects.end()) {
    throw PlanError(Errc::UnknownObject, "object '" + node.target_object + "' (node '" +
                                             node.id + "') is not in the world");
  }
  return it->second;
}

double hand_distance(const WorldState& world, Arm arm, const TaskNode& node) {
  if (node.type == TaskType::Complete) return 0.0;
  return distance(world.hand(arm), target_position(world, node));
}

namespace {

const Vec3& require_object(const WorldState& world, const std::string& name,
                           const std::string& node_id) {
  auto it = world.objects.find(name);
  if (it == world.objects.end()) {
    throw PlanError(Errc::UnknownObject,
                    "object '" + name + "' (node '" + node_id + "') is not in the world");
  }
  return it->second;
}

void apply_one(WorldState& world, ArmHoldings& holdings, const TaskNode& node, Arm arm) {
  Holding& hand = holdings.of(arm);
  switch (node.type) {
    case TaskType::Occupy: {
      if (!hand.is_free()) {
        throw PlanError(Errc::ArmNotEligible, std::string(to_string(arm)) +
                                                  " arm is not free to grasp '" +
                                                  node.target_object + "'");
      }
      require_object(world, node.target_object, node.id);
      world.objects[node.target_object] = world.hand(arm);  // held objects ride the hand
      world.containers.erase(node.target_object);
      hand = Holding::object(node.target_object);
      break;
    }
    case TaskType::ToolUse: {
      if (!hand.holds(node.tool)) {
        throw PlanError(Errc::ArmNotEligible, std::string(to_string(arm)) +
                                                  " arm does not hold tool '" + node.tool + "'");
      }
      require_object(world, node.target_object, node.id);
      hand = Holding::tool(node.tool);
      break;
    }
    case TaskType::Release: {
      if (!hand.holds(node.target_object)) {
        throw PlanError(Errc::ArmNotEligible, std::string(to_string(arm)) +
                                                  " arm does not hold '" + node.target_object +
                                                  "'");
      }
      require_object(world, node.target_object, node.id);
      const Vec3 dest = require_object(world, node.destination, node.id);
      world.objects[node.target_object] = dest;
      world.containers[node.target_object] = node.destination;
      hand = Holding::free();
      break;
    }
    case TaskType::Operate: {
      require_object(world, node.target_object, node.id);
      auto art = world.articulation.find(node.target_object);
      if (art != world.articulation.end()) {
        art->second = art->second == ArticulationState::Open ? ArticulationState::Closed
                                                             : ArticulationState::Open;
      }
      // Holdings unchanged: a free arm stays free, an in-pair arm keeps its object.
      break;
    }
    case TaskType::Complete:
      break;
  }
}

}  // namespace

std::pair<WorldState, ArmHoldings> apply_stage_effects(const WorldState& world,
                                                       const ArmHoldings& holdings,
                                                       const TaskGraph& graph,
                                                       const StageAssignments& assignments) {
  WorldState next_world = world;
  ArmHoldings next_holdings = holdings;

  auto node_of = [&](const std::string& id) -> const TaskNode& {
    const TaskNode* node = graph.find(id);
    if (node == nullptr) {
      throw PlanError(Errc::UnknownObject, "node '" + id + "' is not in the graph");
    }
    return *node;
  };

  if (assignments.joint) {
    const TaskNode& node = node_of(*assignments.joint);
    if (node.arms_required == 2) {
      if (!next_holdings.left.is_free() || !next_holdings.right.is_free()) {
        throw PlanError(Errc::ArmNotEligible, "two-arm node '" + node.id +
                                                  "' needs both arms free");
      }
    }
    apply_one(next_world, next_holdings, node, Arm::Left);
  }
  if (assignments.left) apply_one(next_world, next_holdings, node_of(*assignments.left), Arm::Left);
  if (assignments.right) {
    apply_one(next_world, next_holdings, node_of(*assignments.right), Arm::Right);
  }
  return {std::move(next_world), std::move(next_holdings)};
}

}  // namespace dualplan
