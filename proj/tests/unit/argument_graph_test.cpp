#include "generators.hpp"

#include <gtest/gtest.h>

using namespace aps;
using namespace aps::testing;

namespace {

ArgumentGraph mutual_graph() {
  return ArgumentGraph({{"A1", "", {}}, {"A2", "", {}}, {"A3", "", {}}}, {{"A1", "A2"}, {"A2", "A1"}, {"A3", "A2"}});
}

std::vector<ArgumentId> sorted(std::vector<ArgumentId> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST(ArgumentGraph, AttackersOfMutualAttack) {
  const auto g = mutual_graph();
  EXPECT_EQ(sorted(attackers(g, "A2")), (std::vector<ArgumentId>{"A1", "A3"}));
  EXPECT_EQ(attackers(g, "A1"), (std::vector<ArgumentId>{"A2"}));
}

TEST(ArgumentGraph, ChainLeafHasNoAttackers) {
  const auto g = chain_graph();
  EXPECT_TRUE(attackers(*g, "A4").empty());
  EXPECT_EQ(g->ids(initial_arguments(*g)), (std::vector<ArgumentId>{"A4"}));
}

TEST(ArgumentGraph, EdgelessGraph) {
  ArgumentGraph g({{"x", "", {}}, {"y", "", {}}}, {});
  EXPECT_TRUE(attackers(g, "x").empty());
  EXPECT_EQ(initial_arguments(g).size(), 2u);
}

TEST(ArgumentGraph, UnknownIdIsLookupError) {
  const auto g = chain_graph();
  EXPECT_THROW(attackers(*g, "A9"), LookupError);
  EXPECT_THROW(ArgumentGraph({{"a", "", {}}}, {{"a", "b"}}), LookupError);
  EXPECT_THROW(ArgumentGraph({{"a", "", {}}}, {}, "zz"), LookupError);
}

TEST(ArgumentGraph, DuplicateIdRejected) {
  EXPECT_THROW(ArgumentGraph({{"a", "", {}}, {"a", "", {}}}, {}), Error);
}

TEST(ArgumentGraph, SelfAttackKeptWithWarning) {
  ArgumentGraph g({{"a", "", {}}}, {{"a", "a"}, {"a", "a"}});
  EXPECT_TRUE(g.attacks(0, 0));
  EXPECT_EQ(g.arcs().size(), 1u);
  EXPECT_FALSE(g.warnings().empty());
}

TEST(ArgumentGraph, InitialArgumentsOfConcernExample) {
  const auto g = concern_example_graph();
  EXPECT_EQ(sorted(g->ids(initial_arguments(*g))), (std::vector<ArgumentId>{"A31", "A33", "A34", "A52", "A53"}));
}

TEST(ArgumentGraph, IndirectRelationByParity) {
  const auto g = chain_graph();
  auto r = indirect_relation(*g, "A4", "A1");
  EXPECT_TRUE(r.attacks);
  EXPECT_FALSE(r.defends);
  r = indirect_relation(*g, "A3", "A1");
  EXPECT_TRUE(r.defends);
  EXPECT_FALSE(r.attacks);
  EXPECT_TRUE(indirect_relation(*g, "A1", "A4").none());
}

TEST(ArgumentGraph, IndirectRelationCycleHoldsBoth) {
  ArgumentGraph g({{"a", "", {}}, {"b", "", {}}, {"c", "", {}}},
                  {{"a", "b"}, {"b", "c"}, {"c", "a"}});
  const auto r = indirect_relation(g, "a", "b");
  EXPECT_TRUE(r.attacks);   // a -> b
  EXPECT_TRUE(r.defends);   // a -> b -> c -> a -> b has length 4
}

TEST(ArgumentGraph, InducedGraphUpToStepThree) {
  const auto g = concern_example_graph();
  std::vector<ArgSet> played{g->indices(std::vector<ArgumentId>{"A10"}),
                             g->indices(std::vector<ArgumentId>{"A21", "A22"}),
                             g->indices(std::vector<ArgumentId>{"A32"})};
  const auto ind = induced_graph(*g, played);
  EXPECT_EQ(ind.size(), 4u);
  std::set<std::pair<ArgumentId, ArgumentId>> arcs;
  for (auto [a, b] : ind.arcs()) arcs.emplace(ind.id(a), ind.id(b));
  EXPECT_EQ(arcs, (std::set<std::pair<ArgumentId, ArgumentId>>{{"A21", "A10"}, {"A22", "A10"}, {"A32", "A21"}}));
  EXPECT_EQ(ind.id(*ind.goal()), "A10");
}

TEST(ArgumentGraph, InducedGraphEdgeCases) {
  const auto g = concern_example_graph();
  EXPECT_TRUE(induced_graph(*g, std::vector<ArgSet>{}).empty());
  const auto all = induced_graph(*g, std::vector<ArgSet>{g->all()});
  EXPECT_EQ(all.size(), g->size());
  EXPECT_EQ(all.arcs().size(), g->arcs().size());
}

TEST(ArgumentGraph, PropertyAttackersAreNodes) {
  Gen gen(1);
  for (int i = 0; i < 200; ++i) {
    const auto g = random_graph(gen);
    for (ArgIndex a = 0; a < g.size(); ++a)
      for (ArgIndex b : g.attackers(a)) {
        ASSERT_LT(b, g.size());
        ASSERT_TRUE(g.attacks(b, a));
        ASSERT_TRUE(std::find(g.targets(b).begin(), g.targets(b).end(), a) != g.targets(b).end());
      }
  }
}
