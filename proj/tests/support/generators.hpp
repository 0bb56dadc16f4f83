#pragma once
// Hand-rolled generators and independent oracles shared by the unit tests and
// the acceptance binary.

#include <aps/aps.hpp>

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace aps::testing {

using Gen = std::mt19937_64;

inline std::size_t uniform(Gen& g, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(g);
}

inline double unit(Gen& g) { return std::uniform_real_distribution<double>(0.0, 1.0)(g); }

inline std::string concern_name(std::size_t i) { return "C" + std::to_string(i + 1); }

struct GraphSpec {
  std::size_t min_args = 3, max_args = 9;
  double extra_arc = 0.25;  // chance of each additional backward arc
  std::size_t concerns = 4;
};

/// Acyclic graph over A0..An-1 with goal A0: every other argument attacks
/// one earlier argument, plus random extra arcs pointing backwards.
inline ArgumentGraph random_graph(Gen& g, const GraphSpec& spec = {}) {
  const auto n = uniform(g, spec.min_args, spec.max_args);
  std::vector<Argument> nodes;
  for (std::size_t i = 0; i < n; ++i) {
    Argument a;
    a.id = "A" + std::to_string(i);
    if (i > 0 && spec.concerns > 0) {
      const auto count = uniform(g, 1, std::min<std::size_t>(2, spec.concerns));
      for (std::size_t c = 0; c < count; ++c) a.concerns.push_back(concern_name(uniform(g, 0, spec.concerns - 1)));
    }
    nodes.push_back(std::move(a));
  }
  std::vector<std::pair<ArgumentId, ArgumentId>> arcs;
  for (std::size_t i = 1; i < n; ++i) {
    arcs.emplace_back(nodes[i].id, nodes[uniform(g, 0, i - 1)].id);
    for (std::size_t j = 0; j < i; ++j)
      if (unit(g) < spec.extra_arc) arcs.emplace_back(nodes[i].id, nodes[j].id);
  }
  return ArgumentGraph(std::move(nodes), arcs, "A0");
}

/// Plays legal moves chosen uniformly from the enumerations until the dialogue ends.
inline Dialogue random_dialogue(Gen& g, std::shared_ptr<const ArgumentGraph> graph, const ProtocolConfig& cfg = {}) {
  Dialogue d(graph);
  d = apply_move(d, Move::posit({*graph->goal()}));
  while (!d.terminated()) {
    const auto step = d.next_step();
    std::vector<Move> moves = actor_at(step) == Actor::System
                                  ? posit_moves(d, step, PositEnumeration::Constrained, cfg)
                                  : menu_moves(d, step, cfg);
    // Stopping early is always legal; favour continuing so dialogues grow.
    if (actor_at(step) == Actor::System && moves.size() > 1 && unit(g) < 0.8)
      std::erase_if(moves, [](const Move& m) { return m.arguments.empty(); });
    d = apply_move(d, moves[uniform(g, 0, moves.size() - 1)]);
  }
  return d;
}

/// PrefScore table with random off-diagonal entries.
inline ConcernContext random_context(Gen& g, const ArgumentGraph& graph) {
  auto vocab = ConcernContext::graph_concerns(graph);
  const auto k = vocab.size();
  std::vector<double> m(k * k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) m[i * k + j] = i == j ? 1.0 : unit(g);
  return ConcernContext(graph, std::move(vocab), std::move(m));
}

inline ProbabilityLabelling random_beliefs(Gen& g, std::size_t n) {
  ProbabilityLabelling p(n);
  for (ArgIndex a = 0; a < n; ++a) p.set(a, unit(g));
  return p;
}

// ---------------------------------------------------------------------------
// Oracles

/// Sum over subsets X of (-1)^|X| prod(X), by enumeration.
inline double sigma_by_subsets(const std::vector<double>& values) {
  const std::size_t n = values.size();
  double total = 0.0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    double prod = 1.0;
    int sign = 1;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::size_t{1} << i)) {
        prod *= values[i];
        sign = -sign;
      }
    total += sign * prod;
  }
  return total;
}

/// Value of the best System play against a deterministic user, by exhaustive
/// backward induction over the constrained posit moves.
class BackwardInduction {
public:
  BackwardInduction(const ConcernContext& ctx, SimulatedUser user, PropagationMode mode = PropagationMode::ExampleFaithful)
      : ctx_(ctx), user_(std::move(user)), mode_(mode) {}

  double value(const Dialogue& d) {
    if (d.terminated()) return dialogue_reward(d, ctx_, user_.beliefs, mode_);
    if (actor_at(d.next_step()) == Actor::User) {
      Rng unused(0);
      return value(apply_move(d, simulate_user_move(d, user_, ctx_, unused)));
    }
    double best = -1.0;
    for (const auto& m : posit_moves(d, d.next_step())) best = std::max(best, value(apply_move(d, m)));
    return best;
  }

  /// Value of every candidate System move at `d`.
  std::vector<std::pair<Move, double>> move_values(const Dialogue& d) {
    std::vector<std::pair<Move, double>> out;
    for (const auto& m : posit_moves(d, d.next_step())) out.emplace_back(m, value(apply_move(d, m)));
    return out;
  }

private:
  const ConcernContext& ctx_;
  SimulatedUser user_;
  PropagationMode mode_;
};

// ---------------------------------------------------------------------------
// Fixtures

/// Concern-score example graph: A10 is the goal, concerns C1..C4.
inline std::shared_ptr<const ArgumentGraph> concern_example_graph() {
  auto arg = [](std::string id, std::vector<std::string> cs = {}) { return Argument{std::move(id), "", std::move(cs)}; };
  std::vector<Argument> nodes{arg("A10"),         arg("A21"),         arg("A22"),         arg("A31", {"C1"}),
                              arg("A32", {"C2"}), arg("A33", {"C3"}), arg("A34", {"C4"}), arg("A42"),
                              arg("A52", {"C2"}), arg("A53", {"C3"})};
  std::vector<std::pair<ArgumentId, ArgumentId>> arcs{{"A21", "A10"}, {"A22", "A10"}, {"A31", "A21"},
                                                      {"A32", "A21"}, {"A33", "A22"}, {"A34", "A22"},
                                                      {"A42", "A32"}, {"A52", "A42"}, {"A53", "A42"}};
  return std::make_shared<const ArgumentGraph>(std::move(nodes), arcs, "A10");
}

/// System posits {A10}, {A32,A33}, {A52}; the user answers {A21,A22} and {A42}.
inline Dialogue concern_example_dialogue(std::shared_ptr<const ArgumentGraph> g) {
  auto ix = [&](const char* id) { return g->index_of(id); };
  return Dialogue::from_moves(g, {Move::posit({ix("A10")}), Move::menu({ix("A21"), ix("A22")}),
                                  Move::posit({ix("A32"), ix("A33")}), Move::menu({ix("A42")}),
                                  Move::posit({ix("A52")})});
}

/// PrefScore values read off the worked example; everything else 0.5.
inline ConcernContext concern_example_context(const ArgumentGraph& g) {
  return ConcernContext::from_scores(g, {{{"C1", "C2"}, 0.25},
                                         {{"C4", "C2"}, 0.25},
                                         {{"C1", "C3"}, 0.25},
                                         {{"C4", "C3"}, 0.25},
                                         {{"C3", "C2"}, 0.25}});
}

/// A4 -> A3 -> A2 -> A1 with A1 the goal.
inline std::shared_ptr<const ArgumentGraph> chain_graph() {
  std::vector<Argument> nodes{{"A1", "", {}}, {"A2", "", {}}, {"A3", "", {}}, {"A4", "", {}}};
  return std::make_shared<const ArgumentGraph>(std::move(nodes),
                                               std::vector<std::pair<ArgumentId, ArgumentId>>{
                                                   {"A2", "A1"}, {"A3", "A2"}, {"A4", "A3"}},
                                               "A1");
}

/// Preference tree with root C < 4.75 -> 0.77, else N < 6.25 ? (C < 6.25 ? 0.57 : 0.34) : 0.0.
inline PreferenceTree figure_tree() {
  const int C = static_cast<int>(UserProfile::feature_index("C"));
  const int N = static_cast<int>(UserProfile::feature_index("N"));
  using Node = PreferenceTree::Node;
  return PreferenceTree({Node{C, 4.75, 1, 2, 0.0, 0}, Node{-1, 0.0, 0, 0, 0.77, 0}, Node{N, 6.25, 3, 4, 0.0, 0},
                         Node{C, 6.25, 5, 6, 0.0, 0}, Node{-1, 0.0, 0, 0, 0.0, 0}, Node{-1, 0.0, 0, 0, 0.57, 0},
                         Node{-1, 0.0, 0, 0, 0.34, 0}});
}

inline UserProfile profile_with(std::initializer_list<std::pair<const char*, double>> values) {
  UserProfile p;
  for (const auto& [k, v] : values) p.feature(UserProfile::feature_index(k)) = v;
  return p;
}

/// Excerpt of the fee-maintaining graph that the published seven-step
/// dialogue runs over; arguments are named by their tags.
inline std::shared_ptr<const ArgumentGraph> published_dialogue_graph() {
  const std::vector<std::pair<int, int>> arcs{
      {1, 0},   {2, 0},   {3, 0},   {4, 0},   {5, 1},   {10, 2},  {12, 3},  {15, 4},  {16, 5},
      {17, 5},  {18, 5},  {28, 10}, {34, 12}, {35, 12}, {36, 12}, {37, 15}, {40, 16}, {55, 18},
      {70, 28}, {71, 37}, {81, 40}, {93, 40}, {83, 55}, {100, 81}, {113, 93}};
  std::vector<Argument> nodes;
  std::vector<std::pair<ArgumentId, ArgumentId>> named;
  std::set<int> tags;
  for (auto [a, b] : arcs) {
    tags.insert(a);
    tags.insert(b);
    named.emplace_back(std::to_string(a), std::to_string(b));
  }
  for (int t : tags) nodes.push_back({std::to_string(t), "", {}});
  return std::make_shared<const ArgumentGraph>(std::move(nodes), named, "0");
}

inline std::vector<Move> published_dialogue_moves(const ArgumentGraph& g) {
  auto set = [&](std::initializer_list<int> tags) {
    ArgSet s;
    for (int t : tags) s.push_back(g.index_of(std::to_string(t)));
    normalize(s);
    return s;
  };
  return {Move::posit(set({0})),
          Move::menu(set({1, 2, 3, 4})),
          Move::posit(set({5, 10, 12, 15})),
          Move::menu(set({16, 17, 18, 28, 34, 35, 36, 37})),
          Move::posit(set({40, 55, 70, 71})),
          Move::menu(set({81, 83, 93})),
          Move::posit(set({100, 113}))};
}

/// Records with hand-set flags for analytics fixtures.
inline TrialRecord flagged_record(bool complete, bool linear, std::string graph, double before, double after) {
  TrialRecord r;
  r.strategy = "advanced";
  r.graph = std::move(graph);
  r.before = before;
  r.after = after;
  r.structure = {complete, linear};
  return r;
}

/// 126 records whose flag combinations follow the published structure table.
inline std::vector<TrialRecord> structure_table_corpus() {
  struct Row {
    bool c, l, g;
    int n;
  };
  const Row rows[] = {{true, true, true, 62},   {true, false, true, 23}, {true, true, false, 14},
                      {false, true, true, 10},  {true, false, false, 5}, {false, false, true, 5},
                      {false, false, false, 5}, {false, true, false, 2}};
  std::vector<TrialRecord> out;
  for (const auto& r : rows)
    for (int i = 0; i < r.n; ++i) out.push_back(flagged_record(r.c, r.l, r.g ? "graph1" : "graph2", 1.0, 1.5));
  return out;
}

}  // namespace aps::testing
