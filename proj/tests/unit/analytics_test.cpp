#include "generators.hpp"

#include <gtest/gtest.h>

#include <numeric>

using namespace aps;
using namespace aps::testing;

TEST(ChangeBin, Boundaries) {
  EXPECT_EQ(change_bin(3.0), ChangeBin::VeryPositive);
  EXPECT_EQ(change_bin(1.0), ChangeBin::VeryPositive);
  EXPECT_EQ(change_bin(0.999), ChangeBin::Positive);
  EXPECT_EQ(change_bin(0.0), ChangeBin::None);
  EXPECT_EQ(change_bin(-0.2), ChangeBin::Negative);
  EXPECT_EQ(change_bin(-1.0), ChangeBin::VeryNegative);
  EXPECT_EQ(change_bin(2.46 - 2.4), ChangeBin::Positive);
  EXPECT_EQ(change_bin(1.4 - 0.4), ChangeBin::VeryPositive);
}

TEST(ChangeBin, OrientationFlipsTheSign) {
  auto r = flagged_record(true, true, "g", 1.0, 2.5);
  EXPECT_EQ(change_bin(r.change()), ChangeBin::VeryPositive);
  r.orientation = -1;
  EXPECT_DOUBLE_EQ(r.raw_change(), 1.5);
  EXPECT_EQ(change_bin(r.change()), ChangeBin::VeryNegative);
}

TEST(Records, Validation) {
  EXPECT_THROW(flagged_record(true, true, "g", 0.0, 1.0).validate(), DomainError);
  EXPECT_THROW(flagged_record(true, true, "g", 1.0, 3.5).validate(), DomainError);
  auto r = flagged_record(true, true, "g", 1.0, 1.0);
  r.orientation = 0;
  EXPECT_THROW(r.validate(), DomainError);
}

TEST(Analytics, EmptyCorpus) {
  const std::vector<TrialRecord> none;
  const auto t = structural_table(none, "g");
  EXPECT_EQ(t.total, 0u);
  EXPECT_EQ(t.rows.size(), 8u);
  EXPECT_EQ(t.complete_percent, 0.0);
  EXPECT_EQ(change_bins(none).total, 0u);
  EXPECT_THROW(average_changes(none), DomainError);
  for (const auto& row : breakdown(none, "g")) EXPECT_FALSE(row.averages.has_value());
  EXPECT_FALSE(render_structural_table(t).empty());
}

TEST(Analytics, SingleRecord) {
  const std::vector<TrialRecord> one{flagged_record(false, true, "g", -2.0, 0.5)};
  const auto bins = change_bins(one);
  EXPECT_EQ(bins.counts[0], 1u);
  EXPECT_EQ(bins.percents[0], 100.0);
  const auto avg = average_changes(one);
  EXPECT_DOUBLE_EQ(avg.mean, 2.5);
  EXPECT_DOUBLE_EQ(avg.mean_absolute, 2.5);
  const auto rows = breakdown(one, "g");
  ASSERT_EQ(rows.size(), 7u);
  EXPECT_EQ(rows[1].label, "Complete");
  EXPECT_EQ(rows[1].count, 0u);
  EXPECT_EQ(rows[2].population_percent, 100.0);
  EXPECT_FALSE(rows[6].averages.has_value());
}

TEST(Analytics, StructureTableCorpus) {
  const auto t = structural_table(structure_table_corpus(), "graph1");
  EXPECT_EQ(t.total, 126u);
  EXPECT_EQ(t.rows[0].count, 62u);
  EXPECT_NEAR(t.rows[0].percent, 49.21, 1e-9);
  EXPECT_NEAR(t.complete_percent, 82.54, 1e-9);
  EXPECT_NEAR(t.linear_percent, 69.84, 1e-9);
  EXPECT_NEAR(t.primary_graph_percent, 79.37, 1e-9);
  for (std::size_t i = 1; i < t.rows.size(); ++i) EXPECT_GE(t.rows[i - 1].count, t.rows[i].count);
}

TEST(Analytics, MeanAndAbsoluteMean) {
  const std::vector<TrialRecord> rs{flagged_record(true, true, "g", 1.0, 2.0), flagged_record(true, true, "g", 1.0, 0.0),
                                    flagged_record(true, true, "g", -1.0, -1.5)};
  const auto a = average_changes(rs);
  EXPECT_NEAR(a.mean, (1.0 - 1.0 - 0.5) / 3, 1e-15);
  EXPECT_NEAR(a.mean_absolute, (1.0 + 1.0 + 0.5) / 3, 1e-15);
}

TEST(Analytics, PercentsSumToHundred) {
  Gen g(6);
  for (int round = 0; round < 300; ++round) {
    std::vector<TrialRecord> rs;
    for (std::size_t i = 0, n = uniform(g, 1, 200); i < n; ++i) {
      double before = -3.0 + 6.0 * unit(g);
      if (before == 0.0) before = 0.5;
      rs.push_back(flagged_record(unit(g) < 0.5, unit(g) < 0.5, unit(g) < 0.7 ? "p" : "q", before, -3.0 + 6.0 * unit(g)));
    }
    const auto bins = change_bins(rs);
    ASSERT_NEAR(std::accumulate(bins.percents.begin(), bins.percents.end(), 0.0), 100.0, 0.05);
    ASSERT_EQ(std::accumulate(bins.counts.begin(), bins.counts.end(), std::size_t{0}), rs.size());
    const auto t = structural_table(rs, "p");
    double total = 0;
    for (const auto& row : t.rows) total += row.percent;
    ASSERT_NEAR(total, 100.0, 0.05);
    const auto rows = breakdown(rs, "p");
    ASSERT_EQ(rows[1].count + rows[2].count, rs.size());
    ASSERT_EQ(rows[3].count + rows[4].count, rs.size());
    ASSERT_EQ(rows[5].count + rows[6].count, rs.size());
  }
}

TEST(Analytics, RenderedTablesCarryLabels) {
  const auto rs = structure_table_corpus();
  const auto rows = breakdown(rs, "graph1", "Graph 1", "Graph 2");
  const auto change = render_change_table(rows);
  const auto avg = render_average_table(rows);
  for (const char* label : {"All", "Complete", "Nonlinear", "Graph 1", "Graph 2"}) {
    EXPECT_NE(change.find(label), std::string::npos) << label;
    EXPECT_NE(avg.find(label), std::string::npos) << label;
  }
  EXPECT_NE(render_structural_table(structural_table(rs, "graph1")).find("82.54"), std::string::npos);
}

TEST(Analytics, MakeRecordClassifies) {
  const auto g = chain_graph();
  auto d = Dialogue::from_moves(g, {Move::posit({0}), Move::menu({1}), Move::posit({2}), Move::menu({3}), Move::posit({})});
  const auto r = make_record(d, "advanced", "chain", 1.2, 2.0);
  EXPECT_FALSE(r.structure.complete);
  EXPECT_TRUE(r.structure.linear);
  EXPECT_TRUE(r.dialogue.has_value());
  EXPECT_THROW(make_record(d, "advanced", "chain", 0.0, 2.0), DomainError);
}
