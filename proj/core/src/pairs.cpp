#include "dualplan/pairs.hpp"

#include <algorithm>
#include <map>
#include <limits>
#include <tuple>

#include "dualplan/error.hpp"

namespace dualplan {
namespace {

// Deterministic topological rank (Kahn, smallest id first). Nodes on cycles
// keep rank INT_MAX; pairing callers only rely on ranks of DAG regions.
std::map<std::string, int> topo_ranks(const TaskGraph& graph, const GraphIndex& index) {
  std::map<std::string, int> indegree;
  for (const auto& node : graph.nodes) {
    indegree[node.id] = static_cast<int>(index.predecessors(node.id).size());
  }
  std::set<std::string> frontier;
  for (const auto& [id, deg] : indegree) {
    if (deg == 0) frontier.insert(id);
  }
  std::map<std::string, int> rank;
  int next = 0;
  while (!frontier.empty()) {
    std::string id = *frontier.begin();
    frontier.erase(frontier.begin());
    rank[id] = next++;
    for (const auto& succ : index.successors(id)) {
      if (--indegree[succ] == 0) frontier.insert(succ);
    }
  }
  for (const auto& node : graph.nodes) {
    if (!rank.count(node.id)) rank[node.id] = std::numeric_limits<int>::max();
  }
  return rank;
}

std::vector<std::string> build_path(const TaskGraph& graph, const GraphIndex& index,
                                    const std::map<std::string, int>& rank,
                                    const std::string& occupy_id, const std::string& release_id,
                                    const std::string& object) {
  std::set<std::string> between = index.descendants(occupy_id);
  std::set<std::string> anc = index.ancestors(release_id);
  std::vector<std::string> path{occupy_id};
  for (const auto& id : between) {
    if (!anc.count(id)) continue;
    const TaskNode* node = graph.find(id);
    if (node == nullptr) continue;
    if (node->type != TaskType::ToolUse && node->type != TaskType::Operate) continue;
    if (node->target_object != object && node->tool != object) continue;
    path.push_back(id);
  }
  path.push_back(release_id);
  std::sort(path.begin(), path.end(), [&](const std::string& a, const std::string& b) {
    int ra = rank.at(a), rb = rank.at(b);
    return ra != rb ? ra < rb : a < b;
  });
  return path;
}

}  // namespace

namespace detail {

PairingOutcome compute_pairing(const TaskGraph& graph, const GraphIndex& index) {
  PairingOutcome out;
  std::vector<const TaskNode*> occupies;
  std::vector<const TaskNode*> releases;
  for (const auto& node : graph.nodes) {
    if (node.type == TaskType::Occupy) occupies.push_back(&node);
    if (node.type == TaskType::Release) releases.push_back(&node);
  }

  // (path length, occupy id, release id) for every same-object reachable combo.
  using Candidate = std::tuple<int, std::string, std::string>;
  std::vector<Candidate> candidates;
  for (const TaskNode* o : occupies) {
    for (const TaskNode* r : releases) {
      if (o->target_object != r->target_object) continue;
      auto len = index.shortest_path_length(o->id, r->id);
      if (len) candidates.emplace_back(*len, o->id, r->id);
    }
  }
  std::sort(candidates.begin(), candidates.end());

  std::set<std::string> claimed_occupies, claimed_releases, ambiguous_occupies;
  std::set<std::string> ambiguous_releases;
  std::vector<std::pair<std::string, std::string>> matches;

  // Nearest-first greedy matching. When one occupy sees several unclaimed
  // releases at its minimal distance the instance is ambiguous.
  for (std::size_t i = 0; i < candidates.size();) {
    auto [len, occupy, release] = candidates[i];
    std::size_t j = i;
    std::vector<std::string> open;
    while (j < candidates.size() && std::get<0>(candidates[j]) == len &&
           std::get<1>(candidates[j]) == occupy) {
      if (!claimed_releases.count(std::get<2>(candidates[j]))) {
        open.push_back(std::get<2>(candidates[j]));
      }
      ++j;
    }
    if (!claimed_occupies.count(occupy) && !ambiguous_occupies.count(occupy) && !open.empty()) {
      if (open.size() > 1) {
        ambiguous_occupies.insert(occupy);
        ambiguous_releases.insert(open.begin(), open.end());
        out.ambiguous.emplace_back(occupy, open);
      } else {
        claimed_occupies.insert(occupy);
        claimed_releases.insert(open.front());
        matches.emplace_back(occupy, open.front());
      }
    }
    i = j;
  }

  auto rank = topo_ranks(graph, index);
  std::sort(matches.begin(), matches.end());
  for (const auto& [occupy, release] : matches) {
    OccupyReleasePair pair;
    pair.occupy_id = occupy;
    pair.release_id = release;
    pair.object = graph.find(occupy)->target_object;
    pair.path_ids = build_path(graph, index, rank, occupy, release, pair.object);
    out.pairs.push_back(std::move(pair));
  }

  // Leftovers. A leftover occupy that still reaches some unclaimed release
  // (necessarily of another object) is a mismatch rather than a plain
  // unmatched node; same from the release side.
  for (const TaskNode* o : occupies) {
    if (claimed_occupies.count(o->id) || ambiguous_occupies.count(o->id)) continue;
    std::string partner;
    int best = std::numeric_limits<int>::max();
    for (const TaskNode* r : releases) {
      if (claimed_releases.count(r->id) || ambiguous_releases.count(r->id)) continue;
      auto len = index.shortest_path_length(o->id, r->id);
      if (!len) continue;
      if (*len < best || (*len == best && r->id < partner)) {
        best = *len;
        partner = r->id;
      }
    }
    out.unmatched_occupies.emplace_back(o->id, partner);
  }
  for (const TaskNode* r : releases) {
    if (claimed_releases.count(r->id) || ambiguous_releases.count(r->id)) continue;
    std::string partner;
    int best = std::numeric_limits<int>::max();
    for (const TaskNode* o : occupies) {
      if (claimed_occupies.count(o->id) || ambiguous_occupies.count(o->id)) continue;
      auto len = index.shortest_path_length(o->id, r->id);
      if (!len) continue;
      if (*len < best || (*len == best && o->id < partner)) {
        best = *len;
        partner = o->id;
      }
    }
    out.unmatched_releases.emplace_back(r->id, partner);
  }
  return out;
}

}  // namespace detail

std::vector<OccupyReleasePair> extract_pairs(const TaskGraph& graph) {
  GraphIndex index(graph);
  auto outcome = detail::compute_pairing(graph, index);
  if (!outcome.ambiguous.empty()) {
    std::string msg = "occupy '" + outcome.ambiguous.front().first + "' matches releases";
    for (const auto& r : outcome.ambiguous.front().second) msg += " '" + r + "'";
    msg += " equally well; name object instances apart";
    throw PlanError(Errc::PairingAmbiguous, msg);
  }
  if (!outcome.unmatched_occupies.empty() || !outcome.unmatched_releases.empty()) {
    throw PlanError(Errc::FixtureInvalid, "graph has unmatched occupy/release nodes");
  }
  return outcome.pairs;
}

std::set<std::string> out_of_path_ancestors(const GraphIndex& index,
                                            const OccupyReleasePair& pair) {
  std::set<std::string> anc = index.ancestors(pair.release_id);
  for (const auto& id : pair.path_ids) anc.erase(id);
  return anc;
}

std::set<std::string> out_of_path_ancestors(const TaskGraph& graph,
                                            const OccupyReleasePair& pair) {
  GraphIndex index(graph);
  return out_of_path_ancestors(index, pair);
}

}  // namespace dualplan
