#include "generators.hpp"

#include <gtest/gtest.h>

using namespace aps;
using namespace aps::testing;

namespace {

std::vector<PreferenceRelation> population() {
  return {PreferenceRelation({"C1", "C2", "C3"}), PreferenceRelation({"C2", "C1", "C3"}),
          PreferenceRelation({"C2", "C3", "C1"}), PreferenceRelation({"C3", "C2", "C1"})};
}

}  // namespace

TEST(PrefScore, PopulationFractions) {
  const auto pop = population();
  EXPECT_DOUBLE_EQ(pref_score_population(pop, "C1", "C2"), 0.25);
  EXPECT_DOUBLE_EQ(pref_score_population(pop, "C2", "C1"), 0.75);
  EXPECT_DOUBLE_EQ(pref_score_population(pop, "C1", "C1"), 1.0);
  const std::vector<PreferenceRelation> everyone{PreferenceRelation({"X", "Y"}), PreferenceRelation({"X", "Y"})};
  EXPECT_DOUBLE_EQ(pref_score_population(everyone, "X", "Y"), 1.0);
  EXPECT_DOUBLE_EQ(pref_score_population(everyone, "Y", "X"), 0.0);
}

TEST(PrefScore, OrderedPairsSumToOne) {
  Gen g(4);
  std::vector<ConcernId> names{"a", "b", "c", "d", "e"};
  for (int round = 0; round < 100; ++round) {
    std::vector<PreferenceRelation> pop;
    for (std::size_t i = 0; i < uniform(g, 1, 30); ++i) {
      auto order = names;
      std::shuffle(order.begin(), order.end(), g);
      pop.emplace_back(order);
    }
    for (const auto& x : names)
      for (const auto& y : names)
        if (x != y) ASSERT_NEAR(pref_score_population(pop, x, y) + pref_score_population(pop, y, x), 1.0, 1e-12);
  }
}

TEST(PrefScore, SkipsParticipantsMissingAConcern) {
  const std::vector<PreferenceRelation> pop{PreferenceRelation({"A", "B"}), PreferenceRelation({"B"})};
  EXPECT_DOUBLE_EQ(pref_score_population(pop, "A", "B"), 1.0);
  EXPECT_THROW(pref_score_population(pop, "A", "Z"), LookupError);
  EXPECT_THROW(pref_score_population(std::vector<PreferenceRelation>{}, "A", "B"), DomainError);
  EXPECT_THROW(PreferenceRelation({"A", "A"}), DomainError);
}

TEST(PreferenceTree, FigureExample) {
  const auto tree = figure_tree();
  EXPECT_EQ(tree.predict(profile_with({{"C", 4.0}})), 0.77);
  EXPECT_EQ(tree.predict(profile_with({{"C", 5.0}, {"N", 5.0}})), 0.57);
  EXPECT_EQ(tree.predict(profile_with({{"C", 6.5}, {"N", 5.0}})), 0.34);
  EXPECT_EQ(tree.predict(profile_with({{"C", 7.0}, {"N", 7.0}})), 0.0);
  EXPECT_EQ(tree.depth(), 3u);
  EXPECT_EQ(tree.leaf_count(), 4u);
}

TEST(PreferenceTree, BundleFallbacks) {
  TreeBundle b;
  b.add("Fairness", "Economy", figure_tree());
  const auto p = profile_with({{"C", 7.0}, {"N", 7.0}});
  EXPECT_EQ(predict_pref_score(b, p, "Economy", "Fairness"), 1.0);
  EXPECT_EQ(predict_pref_score(b, p, "Economy", "Economy"), 1.0);
  EXPECT_EQ(predict_pref_score(b, p, "Health", "Economy"), 0.5);
  const std::vector<PreferenceRelation> pop{PreferenceRelation({"Health", "Economy"})};
  EXPECT_EQ(predict_pref_score(b, p, "Health", "Economy", pop), 1.0);
  EXPECT_THROW(b.add("X", "X", PreferenceTree::leaf(0.5)), DomainError);
}

TEST(PreferenceTree, RecoversSeparableThreshold) {
  std::vector<TreeSample> data;
  for (int i = 0; i < 60; ++i) {
    TreeSample s;
    s.profile.conscientiousness = 1.0 + (i % 7);
    s.profile.openness = 1.0 + ((i * 5) % 7);
    s.first_preferred = s.profile.conscientiousness < 4.5;
    data.push_back(s);
  }
  const auto r = train_preference_tree(data);
  EXPECT_EQ(r.cv_loss, 0.0);
  EXPECT_EQ(r.depth, 1u);
  EXPECT_EQ(hamming_loss(r.tree, data), 0.0);
  EXPECT_EQ(r.tree.nodes()[0].feature, static_cast<int>(UserProfile::feature_index("C")));
  EXPECT_DOUBLE_EQ(r.tree.nodes()[0].threshold, 4.5);
}

TEST(PreferenceTree, ConstantLabelsGiveASingleLeaf) {
  std::vector<TreeSample> data(12);
  for (std::size_t i = 0; i < data.size(); ++i) {
    data[i].profile.age = 20.0 + static_cast<double>(i);
    data[i].first_preferred = true;
  }
  const auto r = train_preference_tree(data);
  EXPECT_EQ(r.tree.depth(), 0u);
  EXPECT_EQ(r.tree.predict(data[0].profile), 1.0);
  EXPECT_THROW(train_preference_tree(std::vector<TreeSample>{}), DomainError);
}

TEST(PreferenceTree, LeavesAreProbabilities) {
  Gen g(17);
  std::vector<TreeSample> data(80);
  for (auto& s : data) {
    for (std::size_t f = 0; f < 5; ++f) s.profile.feature(f) = 1.0 + 6.0 * unit(g);
    s.profile.age = 18 + 50 * unit(g);
    s.first_preferred = unit(g) < 0.5;
  }
  const auto r = train_preference_tree(data, {{1, 2, 3, 4}, {1, 5}, 4});
  for (const auto& s : data) {
    const double p = r.tree.predict(s.profile);
    ASSERT_GE(p, 0.0);
    ASSERT_LE(p, 1.0);
  }
  EXPECT_LE(r.tree.depth(), 4u);
  EXPECT_GE(r.cv_loss, 0.0);
}

TEST(PreferenceTree, BundleCoversEveryPair) {
  std::vector<ProfiledRanking> data;
  Gen g(5);
  std::vector<ConcernId> names{"a", "b", "c"};
  for (int i = 0; i < 30; ++i) {
    auto order = names;
    std::shuffle(order.begin(), order.end(), g);
    ProfiledRanking r;
    r.profile.openness = 1 + 6 * unit(g);
    r.ranking = PreferenceRelation(order);
    data.push_back(r);
  }
  const auto b = train_tree_bundle(data, {{1, 2}, {1, 5}, 3});
  EXPECT_EQ(b.size(), 3u);
  EXPECT_NE(b.find("a", "b"), nullptr);
  EXPECT_EQ(b.find("b", "a"), nullptr);
}

TEST(Profile, FeatureNamesAndValidation) {
  UserProfile p;
  EXPECT_EQ(UserProfile::feature_index("children_in_school"), 9u);
  EXPECT_THROW(UserProfile::feature_index("height"), LookupError);
  p.neuroticism = 8.0;
  EXPECT_THROW(p.validate(), DomainError);
}

TEST(ConcernContext, FromScoresAndWarnings) {
  const auto g = concern_example_graph();
  const auto ctx = concern_example_context(*g);
  EXPECT_EQ(ctx.concern_count(), 4u);
  EXPECT_EQ(ctx.pref(ctx.index_of("C1"), ctx.index_of("C2")), 0.25);
  EXPECT_EQ(ctx.pref(ctx.index_of("C2"), ctx.index_of("C1")), 0.5);
  EXPECT_EQ(ctx.pref(ctx.index_of("C3"), ctx.index_of("C3")), 1.0);
  EXPECT_FALSE(ctx.warnings().empty());  // A10, A21, A22, A42 carry no concern
  EXPECT_THROW(ConcernContext::from_scores(*g, {{{"C1", "C9"}, 0.1}}), LookupError);
  EXPECT_THROW(ctx.index_of("C9"), LookupError);
}

TEST(ConcernContext, FromPopulationAndTrees) {
  ArgumentGraph g({{"g", "", {}}, {"x", "", {"Economy"}}, {"y", "", {"Fairness"}}}, {{"x", "g"}, {"y", "g"}}, "g");
  const std::vector<PreferenceRelation> pop{PreferenceRelation({"Economy", "Fairness"}),
                                            PreferenceRelation({"Fairness", "Economy"}),
                                            PreferenceRelation({"Economy", "Fairness"})};
  const auto ctx = ConcernContext::from_population(g, pop);
  EXPECT_NEAR(ctx.pref(ctx.index_of("Economy"), ctx.index_of("Fairness")), 2.0 / 3.0, 1e-12);

  TreeBundle b;
  b.add("Fairness", "Economy", figure_tree());
  const auto t = ConcernContext::from_trees(g, b, profile_with({{"C", 4.0}}));
  EXPECT_EQ(t.pref(t.index_of("Fairness"), t.index_of("Economy")), 0.77);
  EXPECT_NEAR(t.pref(t.index_of("Economy"), t.index_of("Fairness")), 0.23, 1e-12);
}
