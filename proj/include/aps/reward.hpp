#pragma once

#include <aps/belief_dynamics.hpp>
#include <aps/concerns.hpp>
#include <aps/dialogue.hpp>

#include <cmath>
#include <vector>

namespace aps {

/// Every graph attacker of the arguments that `a` answered at its step (the
/// arguments of the preceding move it attacks), `a` included.
inline ArgSet siblings(const Dialogue& d, ArgIndex a) {
  const auto step = d.played_at(a);
  if (step == 0) throw Error("argument " + d.graph().id(a) + " was not played");
  if (step == 1) throw Error("the goal has no siblings");
  const auto& g = d.graph();
  ArgSet out;
  for (ArgIndex t : d.move(step - 1).arguments)
    if (g.attacks(a, t)) out.insert(out.end(), g.attackers(t).begin(), g.attackers(t).end());
  normalize(out);
  return out;
}

namespace detail {

inline std::vector<ConcernIndex> concerns_of(const ConcernContext& ctx, const ArgSet& args) {
  std::vector<ConcernIndex> out;
  for (ArgIndex a : args) out.insert(out.end(), ctx.concerns(a).begin(), ctx.concerns(a).end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace detail

/// Score of the System move at step 2i+1: how much, on average, the concerns
/// it raised are outranked by the sibling concerns it left unplayed.
inline double non_chosen_score(const Dialogue& d, const ConcernContext& ctx, std::size_t i) {
  const auto step = 2 * i + 1;
  if (i == 0 || step > d.length()) throw Error("system step " + std::to_string(step) + " out of range");
  const auto& args = d.move(step).arguments;
  const auto con = detail::concerns_of(ctx, args);
  ArgSet sibs;
  for (ArgIndex a : args) {
    auto s = siblings(d, a);
    sibs.insert(sibs.end(), s.begin(), s.end());
  }
  normalize(sibs);
  auto sib_con = detail::concerns_of(ctx, sibs);
  std::vector<ConcernIndex> ex;
  std::set_difference(sib_con.begin(), sib_con.end(), con.begin(), con.end(), std::back_inserter(ex));
  if (con.empty() || ex.empty()) return 0.0;
  double total = 0.0;
  for (auto c : con) {
    double inner = 0.0;
    for (auto cp : ex) inner += ctx.pref(cp, c);
    total += inner / static_cast<double>(ex.size());
  }
  return total / static_cast<double>(con.size());
}

/// Mean of 1 - NonChosenScore over System steps 3, 5, ..., 2n+1 with
/// n = ceil(k/2 - 1). Empty System moves are not scored; with nothing scored
/// the result is 1.
inline double concern_score(const Dialogue& d, const ConcernContext& ctx) {
  const auto k = d.length();
  if (k < 3) return 1.0;
  const auto n = static_cast<std::size_t>(std::ceil(static_cast<double>(k) / 2.0 - 1.0));
  double sum = 0.0;
  std::size_t scored = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    if (d.move(2 * i + 1).arguments.empty()) continue;
    sum += 1.0 - non_chosen_score(d, ctx, i);
    ++scored;
  }
  return scored ? sum / static_cast<double>(scored) : 1.0;
}

inline double combine_reward(double concern, double goal) { return concern * goal; }

inline double reward(const Dialogue& d, const ConcernContext& ctx, const BeliefStages& stages) {
  const auto goal = d.graph().goal();
  if (!goal) throw Error("graph has no persuasion goal");
  return combine_reward(concern_score(d, ctx), goal_belief(stages, *goal));
}

}  // namespace aps
