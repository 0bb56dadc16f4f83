#pragma once

#include <aps/error.hpp>

#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace aps {

using ArgumentId = std::string;
using ConcernId = std::string;

/// Dense position of an argument inside one graph.
using ArgIndex = std::uint32_t;

/// Sorted, duplicate-free list of argument indices.
using ArgSet = std::vector<ArgIndex>;

inline void normalize(ArgSet& set) {
  std::sort(set.begin(), set.end());
  set.erase(std::unique(set.begin(), set.end()), set.end());
}

inline bool contains(const ArgSet& set, ArgIndex a) {
  return std::binary_search(set.begin(), set.end(), a);
}

struct Argument {
  ArgumentId id;
  std::string text;
  std::vector<ConcernId> concerns;  // sorted, unique
};

using Arc = std::pair<ArgIndex, ArgIndex>;  // (attacker, attackee)

/// Directed attack graph with an optional persuasion goal. Immutable once built.
class ArgumentGraph {
public:
  ArgumentGraph() = default;

  /// Validates that arc endpoints and the goal exist. Self attacks and
  /// duplicate arcs are kept (duplicates collapse) and reported in warnings().
  ArgumentGraph(std::vector<Argument> nodes,
                const std::vector<std::pair<ArgumentId, ArgumentId>>& arcs,
                std::optional<ArgumentId> goal = std::nullopt)
      : nodes_(std::move(nodes)) {
    index_.reserve(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      auto& node = nodes_[i];
      if (node.id.empty()) throw Error("argument with empty id");
      std::sort(node.concerns.begin(), node.concerns.end());
      node.concerns.erase(std::unique(node.concerns.begin(), node.concerns.end()),
                          node.concerns.end());
      if (!index_.emplace(node.id, static_cast<ArgIndex>(i)).second)
        throw Error("duplicate argument id '" + node.id + "'");
    }
    std::vector<Arc> resolved;
    resolved.reserve(arcs.size());
    for (const auto& [from, to] : arcs) resolved.emplace_back(index_of(from), index_of(to));
    build_arcs(std::move(resolved));
    if (goal) goal_ = index_of(*goal);
  }

  std::size_t size() const noexcept { return nodes_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }

  const Argument& argument(ArgIndex i) const { return nodes_.at(i); }
  const std::vector<Argument>& arguments() const noexcept { return nodes_; }
  const ArgumentId& id(ArgIndex i) const { return nodes_.at(i).id; }

  std::optional<ArgIndex> find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  ArgIndex index_of(std::string_view id) const {
    if (auto i = find(id)) return *i;
    throw LookupError("unknown argument '" + std::string(id) + "'");
  }

  std::optional<ArgIndex> goal() const noexcept { return goal_; }

  const std::vector<Arc>& arcs() const noexcept { return arcs_; }

  /// Arguments attacking `a`, ascending.
  std::span<const ArgIndex> attackers(ArgIndex a) const { return attackers_.at(a); }

  /// Arguments attacked by `a`, ascending.
  std::span<const ArgIndex> targets(ArgIndex a) const { return targets_.at(a); }

  bool attacks(ArgIndex from, ArgIndex to) const {
    const auto& t = targets_.at(from);
    return std::binary_search(t.begin(), t.end(), to);
  }

  bool is_initial(ArgIndex a) const { return attackers_.at(a).empty(); }

  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  ArgSet all() const {
    ArgSet out(nodes_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<ArgIndex>(i);
    return out;
  }

  std::vector<ArgumentId> ids(std::span<const ArgIndex> set) const {
    std::vector<ArgumentId> out;
    out.reserve(set.size());
    for (ArgIndex a : set) out.push_back(id(a));
    return out;
  }

  ArgSet indices(std::span<const ArgumentId> ids) const {
    ArgSet out;
    out.reserve(ids.size());
    for (const auto& i : ids) out.push_back(index_of(i));
    normalize(out);
    return out;
  }

private:
  void build_arcs(std::vector<Arc> arcs) {
    std::sort(arcs.begin(), arcs.end());
    for (std::size_t i = 1; i < arcs.size(); ++i)
      if (arcs[i] == arcs[i - 1])
        warnings_.push_back("duplicate arc " + nodes_[arcs[i].first].id + " -> " +
                            nodes_[arcs[i].second].id);
    arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());
    attackers_.assign(nodes_.size(), {});
    targets_.assign(nodes_.size(), {});
    for (const auto& [from, to] : arcs) {
      if (from == to) warnings_.push_back("self attack on " + nodes_[from].id);
      attackers_[to].push_back(from);
      targets_[from].push_back(to);
    }
    for (auto& v : attackers_) std::sort(v.begin(), v.end());
    arcs_ = std::move(arcs);
  }

  std::vector<Argument> nodes_;
  std::unordered_map<std::string, ArgIndex> index_;
  std::vector<Arc> arcs_;
  std::vector<ArgSet> attackers_;
  std::vector<ArgSet> targets_;
  std::optional<ArgIndex> goal_;
  std::vector<std::string> warnings_;
};

inline std::vector<ArgumentId> attackers(const ArgumentGraph& graph, std::string_view a) {
  auto i = graph.index_of(a);
  return graph.ids(graph.attackers(i));
}

inline ArgSet initial_arguments(const ArgumentGraph& graph) {
  ArgSet out;
  for (ArgIndex i = 0; i < graph.size(); ++i)
    if (graph.is_initial(i)) out.push_back(i);
  return out;
}

/// Which parity-based relations hold from `a` to `b`; in cyclic graphs both can.
struct RelationKinds {
  bool attacks = false;  // odd-length directed path a -> ... -> b
  bool defends = false;  // non-zero even-length directed path

  bool none() const noexcept { return !attacks && !defends; }
  bool operator==(const RelationKinds&) const = default;
};

inline RelationKinds indirect_relation(const ArgumentGraph& graph, ArgIndex a, ArgIndex b) {
  if (a >= graph.size() || b >= graph.size()) throw LookupError("argument index out of range");
  // BFS over (node, parity of path length so far).
  std::vector<std::array<bool, 2>> seen(graph.size(), {false, false});
  std::deque<std::pair<ArgIndex, int>> queue;
  for (ArgIndex t : graph.targets(a)) {
    if (!seen[t][1]) {
      seen[t][1] = true;
      queue.emplace_back(t, 1);
    }
  }
  while (!queue.empty()) {
    auto [node, parity] = queue.front();
    queue.pop_front();
    for (ArgIndex t : graph.targets(node)) {
      int p = parity ^ 1;
      if (!seen[t][p]) {
        seen[t][p] = true;
        queue.emplace_back(t, p);
      }
    }
  }
  return {seen[b][1], seen[b][0]};
}

inline RelationKinds indirect_relation(const ArgumentGraph& graph, std::string_view a,
                                       std::string_view b) {
  return indirect_relation(graph, graph.index_of(a), graph.index_of(b));
}

/// Subgraph on the union of the played sets with every original arc between
/// them. Node order follows the source graph; the goal survives if played.
inline ArgumentGraph induced_graph(const ArgumentGraph& graph, std::span<const ArgSet> played) {
  std::vector<bool> keep(graph.size(), false);
  for (const auto& step : played)
    for (ArgIndex a : step) {
      if (a >= graph.size()) throw LookupError("argument index out of range");
      keep[a] = true;
    }
  std::vector<Argument> nodes;
  for (ArgIndex i = 0; i < graph.size(); ++i)
    if (keep[i]) nodes.push_back(graph.argument(i));
  std::vector<std::pair<ArgumentId, ArgumentId>> arcs;
  for (const auto& [from, to] : graph.arcs())
    if (keep[from] && keep[to]) arcs.emplace_back(graph.id(from), graph.id(to));
  std::optional<ArgumentId> goal;
  if (graph.goal() && keep[*graph.goal()]) goal = graph.id(*graph.goal());
  return ArgumentGraph(std::move(nodes), arcs, goal);
}

}  // namespace aps
