#include "generators.hpp"

#include <aps/io.hpp>

#include <gtest/gtest.h>

#include <filesystem>

using namespace aps;
using namespace aps::testing;

namespace {

const std::filesystem::path data_dir{APS_DATA_DIR};

int error_line(const std::function<void()>& f) {
  try {
    f();
  } catch (const FormatError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST(GraphIo, ParsesYamlAndJson) {
  const auto g = parse_graph("goal: a\nnodes:\n  - {id: a, concerns: [X]}\n  - {id: b, text: hi}\narcs:\n  - [b, a]\n");
  EXPECT_EQ(g.size(), 2u);
  EXPECT_EQ(g.id(*g.goal()), "a");
  EXPECT_TRUE(g.attacks(g.index_of("b"), g.index_of("a")));
  EXPECT_EQ(g.argument(g.index_of("b")).text, "hi");
  const auto j = parse_graph(graph_to_json(g).dump());
  EXPECT_EQ(j.ids(j.all()), g.ids(g.all()));
  EXPECT_EQ(j.arcs(), g.arcs());
  EXPECT_EQ(j.argument(0).concerns, g.argument(0).concerns);
}

TEST(GraphIo, ErrorsCarryLineNumbers) {
  EXPECT_EQ(error_line([] { parse_graph("nodes:\n  - {id: a}\n  - {id: a}\n"); }), 3);
  EXPECT_EQ(error_line([] { parse_graph("nodes:\n  - {id: a}\narcs:\n  - [a, zz]\n"); }), 4);
  EXPECT_EQ(error_line([] { parse_graph("nodes:\n  - {id: a}\narcs:\n  - [a]\n"); }), 4);
  EXPECT_EQ(error_line([] { parse_graph("nodes:\n  - {id: a}\ngoal: q\n"); }), 3);
  EXPECT_GT(error_line([] { parse_graph("nodes: [\n"); }), 0);
  EXPECT_THROW(parse_graph("- 1\n"), FormatError);
}

TEST(GraphIo, MissingFileIsAnError) {
  EXPECT_THROW(load_graph("/nonexistent/graph.yaml"), Error);
}

TEST(TranscriptIo, RoundTrip) {
  const auto g = published_dialogue_graph();
  Dialogue d(g);
  for (const auto& m : published_dialogue_moves(*g)) d = apply_move(d, m);
  const auto j = transcript_to_json(d);
  EXPECT_EQ(j["status"], "no_user_moves");
  const auto back = transcript_from_json(g, j);
  EXPECT_TRUE(back == d);
}

TEST(TranscriptIo, NullsAndErrors) {
  auto g = std::make_shared<const ArgumentGraph>(
      std::vector<Argument>{{"G", "", {}}, {"U", "", {}}}, std::vector<std::pair<ArgumentId, ArgumentId>>{{"U", "G"}},
      "G");
  auto d = apply_move(Dialogue(g), Move::posit({0}));
  d = apply_move(d, Move::menu({}, {{0, NullKind::Reject}}));
  const auto j = transcript_to_json(d);
  EXPECT_EQ(j["moves"][1]["nulls"][0]["kind"], "rej");
  EXPECT_TRUE(transcript_from_json(g, j) == d);
  EXPECT_THROW(move_from_json(*g, Json{{"actor", "robot"}, {"arguments", Json::array()}}), FormatError);
  EXPECT_THROW(move_from_json(*g, Json{{"actor", "user"}, {"arguments", {"nope"}}}), LookupError);
  EXPECT_THROW(move_from_json(*g, Json{{"actor", "user"}}), FormatError);
}

TEST(MixtureIo, RoundTripAndDefaults) {
  const auto bundle = parse_mixture_bundle(
      R"({"arguments": {"a": [{"alpha": 0.12, "beta": 0.45, "weight": 0.15}, {"alpha": 3.41, "beta": 3.38, "weight": 0.85}]}})");
  ASSERT_EQ(bundle.size(), 1u);
  EXPECT_EQ(bundle.at("a").size(), 2u);
  const auto back = parse_mixture_bundle(mixture_bundle_to_json(bundle).dump());
  EXPECT_EQ(back.at("a").components()[1].alpha, 3.41);
  ArgumentGraph g({{"a", "", {}}, {"b", "", {}}}, {});
  std::vector<ArgumentId> missing;
  const auto ms = mixtures_for(g, bundle, &missing);
  EXPECT_EQ(missing, (std::vector<ArgumentId>{"b"}));
  EXPECT_EQ(ms[1].components()[0].alpha, 1.0);
  EXPECT_EQ(ms[1].components()[0].beta, 1.0);
}

TEST(MixtureIo, Errors) {
  EXPECT_EQ(error_line([] { parse_mixture_bundle("arguments:\n  a:\n    - {alpha: -1, beta: 1, weight: 1}\n"); }), 3);
  EXPECT_GT(error_line([] { parse_mixture_bundle("arguments:\n  a:\n    - {alpha: 1, beta: 1, weight: 0.5}\n"); }), 0);
  EXPECT_THROW(parse_mixture_bundle("{}"), FormatError);
}

TEST(TableIo, Beliefs) {
  const auto b = parse_belief_dataset("argument,participant,slider\nA,p1,1\nA,p2,-5\nB,p1,0\n");
  EXPECT_EQ(b.at("A").size(), 2u);
  EXPECT_DOUBLE_EQ(b.at("A")[0], 0.6);
  EXPECT_DOUBLE_EQ(b.at("B")[0], 0.5);
  EXPECT_EQ(error_line([] { parse_belief_dataset("A,p1,1\nA,p2,9\n"); }), 2);
  EXPECT_EQ(error_line([] { parse_belief_dataset("A,p1,1\nA,p2\n"); }), 2);
  EXPECT_EQ(error_line([] { parse_belief_dataset("A,p1,1\nA,p2,abc\n"); }), 2);
}

TEST(TableIo, Rankings) {
  const auto r = parse_rankings("participant,concern,rank\np1,Cost,2\np1,Health,1\n");
  EXPECT_EQ(r.at("p1").order(), (std::vector<ConcernId>{"Health", "Cost"}));
  EXPECT_EQ(error_line([] { parse_rankings("p1,Cost,1\np1,Cost,2\n"); }), 2);
  EXPECT_EQ(error_line([] { parse_rankings("p1,Cost,1\np1,Health,1\n"); }), 2);
}

TEST(TableIo, Profiles) {
  const auto p = parse_profiles("participant-id,C,N,age\np1,4.5,2,33\n");
  EXPECT_EQ(p.at("p1").conscientiousness, 4.5);
  EXPECT_EQ(p.at("p1").age, 33.0);
  EXPECT_EQ(error_line([] { parse_profiles("participant-id,C\np1,9\n"); }), 2);
  EXPECT_EQ(error_line([] { parse_profiles("participant-id,height\np1,9\n"); }), 1);
  EXPECT_EQ(error_line([] { parse_profiles("C,N\n4,4\n"); }), 1);
  EXPECT_EQ(error_line([] { parse_profiles("participant-id,C\np1,4\np1,5\n"); }), 3);
  const auto j = profile_to_json(p.at("p1"));
  EXPECT_EQ(profile_from_json(j).age, 33.0);
  EXPECT_THROW(profile_from_json(Json{{"height", 2}}), LookupError);
}

TEST(TreeIo, RoundTrip) {
  TreeBundle b;
  b.add("Fairness", "Economy", figure_tree());
  const auto back = parse_tree_bundle(tree_bundle_to_json(b).dump());
  const auto* t = back.find("Fairness", "Economy");
  ASSERT_NE(t, nullptr);
  for (auto prof : {profile_with({{"C", 4.0}}), profile_with({{"C", 5.0}, {"N", 5.0}}), profile_with({{"C", 7.0}, {"N", 7.0}})})
    EXPECT_EQ(t->predict(prof), figure_tree().predict(prof));
  EXPECT_GT(error_line([] { parse_tree_bundle("trees:\n  - {first: X, second: X, tree: {leafRatio: 1}}\n"); }), 0);
}

TEST(CorpusIo, RoundTripKeepsFlagsAndTranscripts) {
  const auto g = chain_graph();
  auto d = Dialogue::from_moves(g, {Move::posit({0}), Move::menu({1}), Move::posit({2}), Move::menu({3}), Move::posit({})});
  std::vector<TrialRecord> rs{make_record(d, "advanced", "chain", 1.2, 2.0, -1), flagged_record(true, false, "other", -1.0, 0.5)};
  rs[0].reward = 0.25;
  const auto back = corpus_from_json(corpus_to_json(rs), {{"chain", g}});
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].orientation, -1);
  EXPECT_EQ(back[0].reward, 0.25);
  EXPECT_TRUE(back[0].dialogue.has_value());
  EXPECT_EQ(back[0].structure, rs[0].structure);
  EXPECT_EQ(back[1].structure, rs[1].structure);
  EXPECT_TRUE(std::isnan(back[1].reward));
}

TEST(CorpusIo, FlagsFromTranscriptWhenMissing) {
  const auto g = chain_graph();
  auto d = Dialogue::from_moves(g, {Move::posit({0}), Move::menu({1}), Move::posit({2}), Move::menu({3}), Move::posit({})});
  Json rec{{"graph", "chain"}, {"before", 1.0}, {"after", 2.0}, {"transcript", transcript_to_json(d)}};
  const auto back = corpus_from_json(Json{{"records", {rec}}}, {{"chain", g}});
  EXPECT_EQ(back[0].structure, classify(d));
  EXPECT_THROW(corpus_from_json(Json{{"records", {rec}}}, {}), FormatError);
}

TEST(CorpusIo, SummaryShape) {
  const auto s = analytics_summary(structure_table_corpus(), "graph1");
  EXPECT_EQ(s["total"], 126);
  EXPECT_EQ(s["structure"]["rows"].size(), 8u);
  EXPECT_EQ(s["types"].size(), 7u);
  EXPECT_EQ(s["changes"].size(), 126u);
  const auto empty = analytics_summary({}, "graph1");
  EXPECT_TRUE(empty["types"][0]["average_change"].is_null());
}

TEST(DataFiles, ShippedInputsLoad) {
  for (const char* name : {"maintain.yaml", "abolish.yaml"}) {
    const auto g = load_graph(data_dir / "graphs" / name);
    EXPECT_TRUE(g.goal().has_value()) << name;
    std::vector<ArgumentId> missing;
    mixtures_for(g, load_mixture_bundle(data_dir / "mixtures.json"), &missing);
    EXPECT_TRUE(missing.empty()) << name;
  }
  EXPECT_EQ(parse_rankings(read_file(data_dir / "rankings.csv")).size(), 40u);
  EXPECT_EQ(parse_profiles(read_file(data_dir / "profiles.csv")).size(), 40u);
  EXPECT_EQ(parse_belief_dataset(read_file(data_dir / "beliefs.csv")).at("A").size(), 6u);
  EXPECT_EQ(load_tree_bundle(data_dir / "trees.json").size(), 1u);
}
