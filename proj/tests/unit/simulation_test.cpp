#include "generators.hpp"

#include <gtest/gtest.h>

using namespace aps;
using namespace aps::testing;

namespace {

SimulationPlan small_plan(std::uint64_t seed) {
  Gen g(seed);
  SimulationPlan plan;
  plan.graph = std::make_shared<const ArgumentGraph>(random_graph(g, {6, 9, 0.2, 3}));
  plan.context = std::make_shared<const ConcernContext>(random_context(g, *plan.graph));
  plan.population = std::make_shared<const PopulationUserSampler>(
      *plan.graph, plan.context, std::vector<BetaMixture>(plan.graph->size(), BetaMixture(BetaComponent(2, 2))));
  auto users = plan.population;
  auto ctx = plan.context;
  plan.arms = {{"advanced",
                [users, ctx](std::uint64_t s) {
                  StrategyConfig cfg;
                  cfg.simulations = 100;
                  cfg.seed = s;
                  return std::unique_ptr<Strategy>(std::make_unique<MctsStrategist>(users, ctx, cfg));
                }},
               {"baseline", [](std::uint64_t s) { return std::unique_ptr<Strategy>(std::make_unique<BaselineStrategist>(s)); }}};
  plan.trials = 15;
  plan.seed = seed;
  return plan;
}

}  // namespace

TEST(Simulation, DeterministicPerSeed) {
  const auto a = run_simulation(small_plan(3));
  const auto b = run_simulation(small_plan(3));
  ASSERT_EQ(a.size(), 2u);
  for (std::size_t arm = 0; arm < a.size(); ++arm) {
    EXPECT_EQ(a[arm].mean_reward, b[arm].mean_reward);
    for (std::size_t t = 0; t < a[arm].records.size(); ++t) {
      EXPECT_EQ(a[arm].records[t].after, b[arm].records[t].after);
      EXPECT_EQ(a[arm].records[t].dialogue->moves(), b[arm].records[t].dialogue->moves());
    }
  }
}

TEST(Simulation, ArmsFaceTheSameUsers) {
  const auto res = run_simulation(small_plan(4));
  for (std::size_t t = 0; t < res[0].records.size(); ++t)
    EXPECT_EQ(res[0].records[t].before, res[1].records[t].before);
}

TEST(Simulation, RecordsAreConsistent) {
  for (const auto& arm : run_simulation(small_plan(5))) {
    EXPECT_EQ(arm.records.size(), 15u);
    for (const auto& r : arm.records) {
      ASSERT_TRUE(r.dialogue.has_value());
      EXPECT_TRUE(r.dialogue->terminated());
      EXPECT_TRUE(validate(*r.dialogue, {true}).ok());
      EXPECT_GE(r.reward, 0.0);
      EXPECT_LE(r.reward, 1.0);
      EXPECT_GE(r.before, -3.0);
      EXPECT_LE(r.after, 3.0);
      EXPECT_EQ(r.structure, classify(*r.dialogue));
    }
  }
}

TEST(Simulation, RejectsBadPlans) {
  auto plan = small_plan(6);
  plan.trials = 0;
  EXPECT_THROW(run_simulation(plan), DomainError);
  plan = small_plan(6);
  plan.context = nullptr;
  EXPECT_THROW(run_simulation(plan), Error);
}

TEST(Simulation, SeedsAreSpread) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t t = 0; t < 100; ++t)
    for (std::uint64_t k = 0; k < 5; ++k) seen.insert(derive_seed(42, t, k));
  EXPECT_EQ(seen.size(), 500u);
  EXPECT_EQ(derive_seed(1, 2, 3), derive_seed(1, 2, 3));
}

TEST(Simulation, SliderMapping) {
  EXPECT_DOUBLE_EQ(belief_to_slider(0.0), -3.0);
  EXPECT_DOUBLE_EQ(belief_to_slider(1.0), 3.0);
  EXPECT_DOUBLE_EQ(belief_to_slider(0.5), 0.0);
}
