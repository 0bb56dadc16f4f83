#pragma once

#include <aps/analytics.hpp>
#include <aps/strategy.hpp>

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace aps {

/// splitmix64 step; used to derive independent per-trial seeds.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(master) ^ a) ^ b);
}

/// Plays a full dialogue of `strategy` against one simulated user.
inline Dialogue run_dialogue(std::shared_ptr<const ArgumentGraph> graph, Strategy& strategy, const SimulatedUser& user,
                             const ConcernContext& ctx, Rng& rng) {
  Dialogue d(std::move(graph));
  while (!d.terminated()) {
    if (actor_at(d.next_step()) == Actor::System)
      d = apply_move(d, strategy.choose(d));
    else
      d = apply_move(d, simulate_user_move(d, user, ctx, rng));
  }
  return d;
}

/// Slider value for a belief in [0,1].
inline double belief_to_slider(double belief) { return 6.0 * belief - 3.0; }

using StrategyFactory = std::function<std::unique_ptr<Strategy>(std::uint64_t seed)>;

struct Arm {
  std::string name;
  StrategyFactory make;
};

struct SimulationPlan {
  std::shared_ptr<const ArgumentGraph> graph;
  std::string graph_label = "graph";
  std::shared_ptr<const ConcernContext> context;
  std::shared_ptr<const UserSampler> population;
  std::vector<Arm> arms;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  PropagationMode propagation = PropagationMode::ExampleFaithful;
};

struct ArmResult {
  std::string name;
  std::vector<TrialRecord> records;
  double mean_reward = 0.0;
};

/// Trial t of every arm faces the same sampled user, so arms are compared on
/// paired populations. Before/after beliefs are the goal's init and reinst
/// mapped onto the slider scale.
inline std::vector<ArmResult> run_simulation(const SimulationPlan& plan) {
  if (plan.trials == 0) throw DomainError("trials must be at least 1");
  if (!plan.graph || !plan.context || !plan.population) throw Error("incomplete simulation plan");
  const auto goal = plan.graph->goal();
  if (!goal) throw Error("graph has no persuasion goal");
  std::vector<ArmResult> out;
  for (std::size_t a = 0; a < plan.arms.size(); ++a) {
    ArmResult res;
    res.name = plan.arms[a].name;
    double sum = 0.0;
    for (std::size_t t = 0; t < plan.trials; ++t) {
      Rng user_rng(derive_seed(plan.seed, t, 1));
      const SimulatedUser user = plan.population->sample(user_rng);
      Rng play_rng(derive_seed(plan.seed, t, 2 + a));
      auto strategy = plan.arms[a].make(derive_seed(plan.seed, t, 1000 + a));
      Dialogue d = run_dialogue(plan.graph, *strategy, user, *plan.context, play_rng);
      const auto stages = propagate(d, user.beliefs, plan.propagation);
      TrialRecord r;
      r.strategy = res.name;
      r.graph = plan.graph_label;
      r.before = belief_to_slider(user.beliefs[*goal]);
      r.after = belief_to_slider(goal_belief(stages, *goal));
      r.structure = classify(d);
      r.reward = reward(d, *plan.context, stages);
      r.dialogue = std::move(d);
      sum += r.reward;
      res.records.push_back(std::move(r));
    }
    res.mean_reward = sum / static_cast<double>(plan.trials);
    out.push_back(std::move(res));
  }
  return out;
}

}  // namespace aps
