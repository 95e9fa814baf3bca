#include "dualplan/oracle.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "dualplan/io.hpp"
#include "dualplan/pairs.hpp"

namespace dualplan {
namespace {

struct Model {
  std::vector<const TaskNode*> nodes;  // non-Complete, sorted by id
  std::map<std::string, int> index_of;
  std::vector<std::uint32_t> preds;    // prerequisite mask per node
  std::uint32_t two_arm_mask = 0;
  std::vector<int> pair_of;            // pair index per node, -1 outside any path
  std::vector<int> occupy_idx, release_idx;
  std::vector<std::uint32_t> externals;          // out-of-path ancestors of each release
  std::vector<std::uint32_t> two_arm_externals;  // the two-arm subset of the above
};

struct State {
  std::uint32_t done = 0;
  int owner_left = -1;   // pair index or -1
  int owner_right = -1;
  WorldState world;
};

std::pair<std::uint64_t, std::uint64_t> state_key(const State& s) {
  std::uint64_t packed = s.done;
  packed |= static_cast<std::uint64_t>(s.owner_left + 1) << 32;
  packed |= static_cast<std::uint64_t>(s.owner_right + 1) << 40;
  return {packed, fnv1a64(serialize_world(s.world))};
}

}  // namespace

std::optional<int> optimal_stage_oracle(const TaskGraph& graph, const WorldState& world,
                                        const PlannerConfig& config, int stage_budget) {
  if (graph.nodes.size() > 14) return std::nullopt;
  config.check();

  Model m;
  for (const auto& node : graph.nodes) {
    if (node.type != TaskType::Complete) m.nodes.push_back(&node);
  }
  std::sort(m.nodes.begin(), m.nodes.end(),
            [](const TaskNode* a, const TaskNode* b) { return a->id < b->id; });
  const int n = static_cast<int>(m.nodes.size());
  for (int i = 0; i < n; ++i) m.index_of[m.nodes[i]->id] = i;

  GraphIndex index(graph);
  m.preds.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    for (const auto& pred : index.predecessors(m.nodes[i]->id)) {
      auto it = m.index_of.find(pred);
      if (it != m.index_of.end()) m.preds[i] |= 1u << it->second;
    }
    if (m.nodes[i]->arms_required == 2) m.two_arm_mask |= 1u << i;
  }

  const std::vector<OccupyReleasePair> pairs = extract_pairs(graph);
  m.pair_of.assign(n, -1);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    for (const auto& id : pairs[p].path_ids) {
      m.pair_of[m.index_of.at(id)] = static_cast<int>(p);
    }
    m.occupy_idx.push_back(m.index_of.at(pairs[p].occupy_id));
    m.release_idx.push_back(m.index_of.at(pairs[p].release_id));
    std::uint32_t ext = 0;
    for (const auto& id : out_of_path_ancestors(index, pairs[p])) {
      auto it = m.index_of.find(id);
      if (it != m.index_of.end()) ext |= 1u << it->second;
    }
    m.externals.push_back(ext);
    m.two_arm_externals.push_back(0);
  }
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    m.two_arm_externals[p] = m.externals[p] & m.two_arm_mask;
  }

  const std::uint32_t full = n == 0 ? 0 : (n >= 32 ? ~0u : (1u << n) - 1u);

  // One arm's executable nodes at a state, grasp rules aside.
  auto arm_options = [&](const State& s, bool left) {
    std::vector<int> options;
    const int own = left ? s.owner_left : s.owner_right;
    for (int i = 0; i < n; ++i) {
      const std::uint32_t bit = 1u << i;
      if (s.done & bit) continue;
      if ((m.preds[i] & ~s.done) != 0) continue;  // not ready
      if (m.two_arm_mask & bit) continue;         // joint-only
      const int p = m.pair_of[i];
      if (p >= 0) {
        if (i == m.occupy_idx[p]) {
          if (own != -1) continue;
        } else if (own != p) {
          continue;
        }
      } else if (own != -1) {
        continue;
      }
      options.push_back(i);
    }
    return options;
  };

  auto owners_after = [&](const State& s, int left_node, int right_node) {
    int ol = s.owner_left, orr = s.owner_right;
    auto update = [&](int node, int& owner) {
      if (node < 0) return;
      const int p = m.pair_of[node];
      if (p < 0) return;
      if (node == m.occupy_idx[p]) owner = p;
      if (node == m.release_idx[p]) owner = -1;
    };
    update(left_node, ol);
    update(right_node, orr);
    return std::pair<int, int>{ol, orr};
  };

  // R1 and R2 against the post-stage done set.
  auto dependency_ok = [&](const State& s, int left_node, int right_node) {
    std::uint32_t done = s.done;
    if (left_node >= 0) done |= 1u << left_node;
    if (right_node >= 0) done |= 1u << right_node;
    for (int node : {left_node, right_node}) {
      if (node < 0) continue;
      const int p = m.pair_of[node];
      if (p >= 0 && node == m.occupy_idx[p] && (m.two_arm_externals[p] & ~done) != 0) {
        return false;
      }
    }
    auto [ol, orr] = owners_after(s, left_node, right_node);
    if (ol < 0 || orr < 0) return true;
    auto self_sufficient = [&](int p) { return (m.externals[p] & ~done) == 0; };
    auto no_two_arm = [&](int p) { return (m.two_arm_externals[p] & ~done) == 0; };
    return (self_sufficient(ol) && no_two_arm(orr)) ||
           (self_sufficient(orr) && no_two_arm(ol));
  };

  auto geometry_ok = [&](const State& s, int left_node, int right_node) {
    auto target = [&](int node) {
      return s.world.objects.at(m.nodes[node]->target_object);
    };
    const double gap = distance(target(left_node), target(right_node));
    return gap > config.d_across && gap <= config.d_reachable;
  };

  auto advance = [&](const State& s, int left_node, int right_node, int joint_node) {
    State next = s;
    next.done = s.done;
    ArmHoldings holdings;
    if (s.owner_left >= 0) holdings.left = Holding::object(pairs[s.owner_left].object);
    if (s.owner_right >= 0) holdings.right = Holding::object(pairs[s.owner_right].object);
    StageAssignments assignments;
    if (left_node >= 0) assignments.left = m.nodes[left_node]->id;
    if (right_node >= 0) assignments.right = m.nodes[right_node]->id;
    if (joint_node >= 0) assignments.joint = m.nodes[joint_node]->id;
    auto [world_after, holdings_after] =
        apply_stage_effects(s.world, holdings, graph, assignments);
    (void)holdings_after;
    next.world = std::move(world_after);
    for (int node : {left_node, right_node, joint_node}) {
      if (node >= 0) next.done |= 1u << node;
    }
    std::tie(next.owner_left, next.owner_right) = owners_after(s, left_node, right_node);
    return next;
  };

  State start;
  start.world = world;

  std::set<std::pair<std::uint64_t, std::uint64_t>> visited;
  std::vector<State> frontier{start};
  visited.insert(state_key(start));

  for (int depth = 0; depth <= stage_budget; ++depth) {
    std::vector<State> next_frontier;
    for (const State& s : frontier) {
      if (s.done == full) return depth;
    }
    if (depth == stage_budget) break;
    for (const State& s : frontier) {
      if (s.done == full) continue;
      std::vector<State> moves;
      const auto left_options = arm_options(s, true);
      const auto right_options = arm_options(s, false);
      for (int i : left_options) {
        for (int j : right_options) {
          if (i == j) continue;
          if (!dependency_ok(s, i, j)) continue;
          if (!geometry_ok(s, i, j)) continue;
          moves.push_back(advance(s, i, j, -1));
        }
      }
      if (config.allow_idle_arm) {
        for (int i : left_options) {
          if (dependency_ok(s, i, -1)) moves.push_back(advance(s, i, -1, -1));
        }
        for (int j : right_options) {
          if (dependency_ok(s, -1, j)) moves.push_back(advance(s, -1, j, -1));
        }
      }
      if (s.owner_left < 0 && s.owner_right < 0) {
        for (int i = 0; i < n; ++i) {
          const std::uint32_t bit = 1u << i;
          if ((s.done & bit) || !(m.two_arm_mask & bit)) continue;
          if ((m.preds[i] & ~s.done) != 0) continue;
          moves.push_back(advance(s, -1, -1, i));
        }
      }
      for (State& move : moves) {
        auto key = state_key(move);
        if (visited.insert(key).second) next_frontier.push_back(std::move(move));
      }
    }
    if (next_frontier.empty()) break;
    frontier = std::move(next_frontier);
  }
  return std::nullopt;
}

}  // namespace dualplan
