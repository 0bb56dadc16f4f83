#pragma once

#include <aps/argument_graph.hpp>
#include <aps/belief_model.hpp>
#include <aps/dialogue.hpp>
#include <aps/error.hpp>

#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace aps {

enum class PropagationMode : std::uint8_t {
  /// Coefficients over attackers with init > 0.5; reinstatement whenever such an attacker exists.
  ExampleFaithful,
  /// Coefficients over all attackers; reinstatement only when every attacker has reinst <= 0.5.
  LiteralDefinition,
};

/// Per-argument stages, indexed like the graph they were computed on. Entries
/// for arguments that took no part hold NaN.
struct BeliefStages {
  ProbabilityLabelling init, att, reinst;
  std::vector<double> k_init, k_reinst;
};

/// Closed form of sum over subsets X of (-1)^|X| prod(b in X): prod(1 - b).
inline double sigma_coefficient(std::span<const double> values) {
  double k = 1.0;
  for (double b : values) {
    if (!(b >= 0.0 && b <= 1.0)) throw DomainError("coefficient input outside [0,1]");
    k *= 1.0 - b;
  }
  return k;
}

inline ArgSet effective_attackers(const ArgumentGraph& g, const ProbabilityLabelling& init, ArgIndex a) {
  ArgSet out;
  for (ArgIndex b : g.attackers(a))
    if (init[b] > 0.5) out.push_back(b);
  return out;
}

namespace detail {

inline BeliefStages propagate_lists(const std::vector<ArgSet>& attackers, const std::vector<bool>& active,
                                    const ProbabilityLabelling& init, PropagationMode mode) {
  const std::size_t n = attackers.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  BeliefStages s{ProbabilityLabelling(n), ProbabilityLabelling(n), ProbabilityLabelling(n),
                 std::vector<double>(n, nan), std::vector<double>(n, nan)};
  if (init.size() != n) throw DomainError("init labelling does not match the graph");
  std::vector<ArgSet> counted(n);
  std::vector<double> buf;
  for (ArgIndex a = 0; a < n; ++a) {
    if (!active[a]) continue;
    if (!init.has(a)) throw DomainError("missing init belief for argument " + std::to_string(a));
    s.init.set(a, init[a]);
    bool any_believed = false;
    for (ArgIndex b : attackers[a]) {
      if (!init.has(b)) throw DomainError("missing init belief for argument " + std::to_string(b));
      if (init[b] > 0.5) any_believed = true;
      if (mode == PropagationMode::LiteralDefinition || init[b] > 0.5) counted[a].push_back(b);
    }
    buf.clear();
    for (ArgIndex b : counted[a]) buf.push_back(init[b]);
    s.k_init[a] = sigma_coefficient(buf);
    s.att.set(a, any_believed ? init[a] * s.k_init[a] : init[a]);
  }

  // reinst needs the attackers' reinst first: iterative DFS post-order.
  enum : std::uint8_t { Fresh, Open, Done };
  std::vector<std::uint8_t> state(n, Fresh);
  auto finish = [&](ArgIndex a) {
    buf.clear();
    bool all_low = true;
    for (ArgIndex b : counted[a]) {
      buf.push_back(s.reinst[b]);
      if (s.reinst[b] > 0.5) all_low = false;
    }
    s.k_reinst[a] = sigma_coefficient(buf);
    bool apply = mode == PropagationMode::ExampleFaithful ? !counted[a].empty()
                                                          : !attackers[a].empty() && all_low;
    s.reinst.set(a, apply ? s.att[a] + s.k_reinst[a] * (1.0 - s.att[a]) : s.att[a]);
  };
  std::vector<std::pair<ArgIndex, std::size_t>> stack;
  for (ArgIndex root = 0; root < n; ++root) {
    if (!active[root] || state[root] == Done) continue;
    stack.emplace_back(root, 0);
    state[root] = Open;
    while (!stack.empty()) {
      auto& [a, next] = stack.back();
      if (next < counted[a].size()) {
        ArgIndex b = counted[a][next++];
        if (state[b] == Open) throw CyclicGraphError("attack cycle through argument " + std::to_string(b));
        if (state[b] == Fresh) {
          state[b] = Open;
          stack.emplace_back(b, 0);
        }
        continue;
      }
      finish(a);
      state[a] = Done;
      stack.pop_back();
    }
  }
  return s;
}

}  // namespace detail

/// Propagates over every argument of `induced`.
inline BeliefStages propagate(const ArgumentGraph& induced, const ProbabilityLabelling& init,
                              PropagationMode mode = PropagationMode::ExampleFaithful) {
  std::vector<ArgSet> attackers(induced.size());
  for (ArgIndex a = 0; a < induced.size(); ++a)
    attackers[a].assign(induced.attackers(a).begin(), induced.attackers(a).end());
  return detail::propagate_lists(attackers, std::vector<bool>(induced.size(), true), init, mode);
}

/// Propagates over the arguments played in `d`, with `init` indexed by the
/// full graph. Arcs from an argument played earlier onto one played later are
/// ignored, so only responses count as attacks.
inline BeliefStages propagate(const Dialogue& d, const ProbabilityLabelling& init,
                              PropagationMode mode = PropagationMode::ExampleFaithful) {
  const auto& g = d.graph();
  std::vector<bool> active(g.size(), false);
  std::vector<ArgSet> attackers(g.size());
  for (ArgIndex a = 0; a < g.size(); ++a) {
    if (d.played_at(a) == 0) continue;
    active[a] = true;
    for (ArgIndex b : g.attackers(a))
      if (d.played_at(b) != 0 && d.played_at(b) >= d.played_at(a)) attackers[a].push_back(b);
  }
  return detail::propagate_lists(attackers, active, init, mode);
}

inline double goal_belief(const BeliefStages& stages, ArgIndex goal) {
  if (!stages.reinst.has(goal)) throw Error("goal belief unavailable: goal never played");
  return stages.reinst[goal];
}

}  // namespace aps
