#pragma once

#include <aps/belief_dynamics.hpp>
#include <aps/belief_model.hpp>
#include <aps/concerns.hpp>
#include <aps/dialogue.hpp>
#include <aps/reward.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace aps {

// ---------------------------------------------------------------------------
// Simulated user

enum class FilterPolicy : std::uint8_t {
  UniformPrefix,  // keep the first t of the ordered believed set, t ~ U{0..|bc|}
  KeepAll,
};

/// One imagined user: beliefs drawn once per rollout plus a preference order.
struct SimulatedUser {
  ProbabilityLabelling beliefs;          // indexed by graph argument
  std::vector<std::size_t> concern_rank;  // by ConcernIndex; lower is preferred
  FilterPolicy filter = FilterPolicy::UniformPrefix;

  /// c ⪯ c_prime under this user's order. Unranked concerns sit last.
  bool weakly_prefers(ConcernIndex c_prime, ConcernIndex c) const {
    auto r = [&](ConcernIndex x) {
      return x < concern_rank.size() ? concern_rank[x] : std::numeric_limits<std::size_t>::max();
    };
    return r(c_prime) <= r(c);
  }
};

/// Order score of a believed counterargument b of `target`: its belief times
/// the share of sibling concerns that its own concerns weakly dominate.
inline double counter_score(const ArgumentGraph& g, const ConcernContext& ctx, const SimulatedUser& user,
                            ArgIndex target, ArgIndex b) {
  std::vector<ConcernIndex> sib;
  for (ArgIndex s : g.attackers(target)) sib.insert(sib.end(), ctx.concerns(s).begin(), ctx.concerns(s).end());
  std::sort(sib.begin(), sib.end());
  sib.erase(std::unique(sib.begin(), sib.end()), sib.end());
  const double p = user.beliefs[b];
  if (sib.empty()) return p;
  double hits = 0.0;
  for (auto c : ctx.concerns(b))
    for (auto cp : sib)
      if (user.weakly_prefers(c, cp)) hits += 1.0;
  return p * hits / static_cast<double>(sib.size());
}

/// Sample, order and filter the counterarguments of every attacked argument of
/// the previous System move. An empty pick becomes null^acc when nothing was
/// believed and null^rej otherwise; nulls for arguments already answered by a
/// counterargument picked elsewhere are dropped.
inline Move simulate_user_move(const Dialogue& d, const SimulatedUser& user, const ConcernContext& ctx, Rng& rng) {
  const auto step = d.next_step();
  if (d.terminated() || actor_at(step) != Actor::User) throw Error("not a user turn");
  const auto& g = d.graph();
  Move m{Actor::User, {}, {}};
  std::vector<NullMarker> nulls;
  for (const auto& listing : menu_listings(d, step)) {
    std::vector<std::pair<double, ArgIndex>> bc;
    for (ArgIndex b : listing.options)
      if (user.beliefs[b] > 0.5) bc.emplace_back(counter_score(g, ctx, user, listing.target, b), b);
    std::stable_sort(bc.begin(), bc.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
    std::size_t t = bc.size();
    if (user.filter == FilterPolicy::UniformPrefix) t = std::uniform_int_distribution<std::size_t>(0, bc.size())(rng);
    for (std::size_t i = 0; i < t; ++i) m.arguments.push_back(bc[i].second);
    if (t == 0) nulls.push_back({listing.target, bc.empty() ? NullKind::Accept : NullKind::Reject});
  }
  normalize(m.arguments);
  for (const auto& n : nulls) {
    bool answered = false;
    for (ArgIndex b : m.arguments)
      if (g.attacks(b, n.target)) answered = true;
    if (!answered) m.nulls.push_back(n);
  }
  std::sort(m.nulls.begin(), m.nulls.end());
  return m;
}

// ---------------------------------------------------------------------------
// User samplers

class UserSampler {
public:
  virtual ~UserSampler() = default;
  virtual SimulatedUser sample(Rng& rng) const = 0;
};

/// Always the same user (deterministic when its filter is KeepAll).
class FixedUserSampler final : public UserSampler {
public:
  explicit FixedUserSampler(SimulatedUser user) : user_(std::move(user)) {}
  SimulatedUser sample(Rng&) const override { return user_; }

private:
  SimulatedUser user_;
};

/// Beliefs from per-argument mixtures; preferences drawn uniformly from
/// recorded rankings, or, without rankings, built concern by concern with
/// weights from the context's pairwise scores.
class PopulationUserSampler final : public UserSampler {
public:
  PopulationUserSampler(const ArgumentGraph& graph, std::shared_ptr<const ConcernContext> ctx,
                        std::vector<BetaMixture> mixtures, std::vector<PreferenceRelation> rankings = {},
                        FilterPolicy filter = FilterPolicy::UniformPrefix)
      : ctx_(std::move(ctx)), mixtures_(std::move(mixtures)), filter_(filter) {
    if (!ctx_) throw Error("sampler needs a concern context");
    mixtures_.resize(graph.size());
    const auto k = ctx_->concern_count();
    for (const auto& r : rankings) {
      std::vector<std::size_t> ranks(k, k);
      for (std::size_t c = 0; c < k; ++c)
        if (auto pos = r.rank(ctx_->vocabulary()[c])) ranks[c] = *pos;
      ranks_.push_back(std::move(ranks));
    }
  }

  SimulatedUser sample(Rng& rng) const override {
    SimulatedUser u;
    u.filter = filter_;
    u.beliefs = ProbabilityLabelling(mixtures_.size());
    for (ArgIndex a = 0; a < mixtures_.size(); ++a) u.beliefs.set(a, mixtures_[a].sample(rng));
    if (!ranks_.empty()) {
      u.concern_rank = ranks_[std::uniform_int_distribution<std::size_t>(0, ranks_.size() - 1)(rng)];
      return u;
    }
    const auto k = ctx_->concern_count();
    std::vector<ConcernIndex> left(k);
    std::iota(left.begin(), left.end(), ConcernIndex{0});
    u.concern_rank.assign(k, 0);
    for (std::size_t pos = 0; pos < k; ++pos) {
      std::vector<double> w;
      for (auto c : left) {
        double s = 0.0;
        for (auto o : left)
          if (o != c) s += ctx_->pref(c, o);
        w.push_back(left.size() > 1 ? s / static_cast<double>(left.size() - 1) + 1e-9 : 1.0);
      }
      std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
      const auto i = pick(rng);
      u.concern_rank[left[i]] = pos;
      left.erase(left.begin() + static_cast<std::ptrdiff_t>(i));
    }
    return u;
  }

  const std::vector<BetaMixture>& mixtures() const noexcept { return mixtures_; }

private:
  std::shared_ptr<const ConcernContext> ctx_;
  std::vector<BetaMixture> mixtures_;
  std::vector<std::vector<std::size_t>> ranks_;
  FilterPolicy filter_;
};

/// Reward of a finished dialogue for a user with the given initial beliefs.
inline double dialogue_reward(const Dialogue& d, const ConcernContext& ctx, const ProbabilityLabelling& init,
                              PropagationMode mode = PropagationMode::ExampleFaithful) {
  return reward(d, ctx, propagate(d, init, mode));
}

// ---------------------------------------------------------------------------
// Strategies

struct StrategyConfig {
  std::size_t simulations = 1000;
  double exploration = std::sqrt(2.0);
  ProtocolConfig protocol{};
  PropagationMode propagation = PropagationMode::ExampleFaithful;
  std::uint64_t seed = 0;
  bool reuse_subtree = true;
};

struct TraceEntry {
  Move move;
  std::size_t visits = 0;
  double mean_reward = 0.0;
};

/// Root statistics of the last search.
struct SearchTrace {
  std::size_t root_visits = 0;
  std::vector<TraceEntry> children;
};

class Strategy {
public:
  virtual ~Strategy() = default;
  /// Next System move for a dialogue waiting on the System.
  virtual Move choose(const Dialogue& d) = 0;
  virtual std::string name() const = 0;
  virtual std::optional<SearchTrace> trace() const { return std::nullopt; }
};

namespace detail {

inline Move goal_posit(const Dialogue& d) {
  if (!d.graph().goal()) throw Error("graph has no persuasion goal");
  return Move::posit({*d.graph().goal()});
}

inline void check_system_turn(const Dialogue& d) {
  if (d.terminated()) throw Error("dialogue has terminated");
  if (actor_at(d.next_step()) != Actor::System) throw Error("not a system turn");
}

}  // namespace detail

/// Uniform over the non-empty legal posit moves; the empty move when there is none.
inline Move baseline_choose(const Dialogue& d, Rng& rng, const ProtocolConfig& protocol = {}) {
  detail::check_system_turn(d);
  const auto step = d.next_step();
  if (step == 1) return detail::goal_posit(d);
  auto moves = posit_moves(d, step, PositEnumeration::Constrained, protocol);
  std::erase_if(moves, [](const Move& m) { return m.arguments.empty(); });
  if (moves.empty()) return Move::posit({});
  return moves[std::uniform_int_distribution<std::size_t>(0, moves.size() - 1)(rng)];
}

class BaselineStrategist final : public Strategy {
public:
  explicit BaselineStrategist(std::uint64_t seed = 0, ProtocolConfig protocol = {}) : rng_(seed), protocol_(protocol) {}
  Move choose(const Dialogue& d) override { return baseline_choose(d, rng_, protocol_); }
  std::string name() const override { return "baseline"; }

private:
  Rng rng_;
  ProtocolConfig protocol_;
};

/// Mean reward plus the exploration bonus; unvisited children come first.
inline double ucb_value(double total, std::size_t visits, std::size_t parent_visits, double exploration) {
  if (visits == 0) return std::numeric_limits<double>::infinity();
  const double v = static_cast<double>(visits);
  return total / v + exploration * std::sqrt(std::log(static_cast<double>(parent_visits)) / v);
}

/// Monte Carlo tree search over System (decision) and user (chance) turns.
class MctsStrategist final : public Strategy {
public:
  MctsStrategist(std::shared_ptr<const UserSampler> users, std::shared_ptr<const ConcernContext> ctx,
                 StrategyConfig config = {})
      : users_(std::move(users)), ctx_(std::move(ctx)), config_(config), rng_(config.seed) {
    if (!users_ || !ctx_) throw Error("strategist needs a user sampler and a concern context");
    if (config_.simulations == 0) throw DomainError("simulations must be at least 1");
  }

  std::string name() const override { return "advanced"; }
  std::optional<SearchTrace> trace() const override { return trace_; }
  const StrategyConfig& config() const noexcept { return config_; }

  Move choose(const Dialogue& d) override {
    detail::check_system_turn(d);
    if (d.next_step() == 1) {
      reset(d);
      return detail::goal_posit(d);
    }
    if (!config_.reuse_subtree || !reroot(d)) reset(d);
    for (std::size_t i = 0; i < config_.simulations; ++i) iterate();

    const auto& root = nodes_[root_];
    trace_ = SearchTrace{root.visits, {}};
    std::optional<std::size_t> best;
    double best_mean = -1.0;
    for (std::size_t i = 0; i < root.moves.size(); ++i) {
      const auto c = root.child[i];
      const std::size_t visits = c == kNone ? 0 : nodes_[c].visits;
      const double mean = visits ? nodes_[c].total / static_cast<double>(visits) : 0.0;
      trace_->children.push_back({root.moves[i], visits, mean});
      if (visits == 0) continue;
      if (!best || mean > best_mean + 1e-12 ||
          (std::abs(mean - best_mean) <= 1e-12 && visits > trace_->children[*best].visits)) {
        best = i;
        best_mean = mean;
      }
    }
    if (!best) return Move::posit({});
    return root.moves[*best];
  }

private:
  static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
  enum class Kind : std::uint8_t { Decision, Chance, Terminal };

  struct Node {
    Kind kind = Kind::Decision;
    Dialogue dialogue;
    std::size_t visits = 0;
    double total = 0.0;
    bool expanded = false;
    std::vector<Move> moves;           // decision: legal posits, enumeration order
    std::vector<std::uint32_t> child;  // parallel to moves
    std::map<Move, std::uint32_t> observed;  // chance: by observed user move
  };

  static Kind kind_of(const Dialogue& d) {
    if (d.terminated()) return Kind::Terminal;
    return actor_at(d.next_step()) == Actor::System ? Kind::Decision : Kind::Chance;
  }

  std::uint32_t add(Dialogue d) {
    Node n;
    n.kind = kind_of(d);
    n.dialogue = std::move(d);
    nodes_.push_back(std::move(n));
    return static_cast<std::uint32_t>(nodes_.size() - 1);
  }

  void reset(const Dialogue& d) {
    nodes_.clear();
    root_ = add(d);
  }

  /// Walks the kept tree along the moves played since its root.
  bool reroot(const Dialogue& d) {
    if (nodes_.empty()) return false;
    const auto& old = nodes_[root_].dialogue;
    if (old.graph_ptr() != d.graph_ptr() || old.length() > d.length()) return false;
    for (std::size_t s = 1; s <= old.length(); ++s)
      if (!(old.move(s) == d.move(s))) return false;
    std::uint32_t at = root_;
    for (std::size_t s = old.length() + 1; s <= d.length(); ++s) {
      const auto& m = d.move(s);
      auto& n = nodes_[at];
      std::uint32_t next = kNone;
      if (n.kind == Kind::Decision) {
        for (std::size_t i = 0; i < n.moves.size(); ++i)
          if (n.moves[i] == m) next = n.child[i];
      } else if (n.kind == Kind::Chance) {
        if (auto it = n.observed.find(m); it != n.observed.end()) next = it->second;
      }
      if (next == kNone) return false;
      at = next;
    }
    if (!(nodes_[at].dialogue == d) || nodes_[at].kind != Kind::Decision) return false;
    compact(at);
    return true;
  }

  /// Keeps only the subtree under `at`.
  void compact(std::uint32_t at) {
    std::vector<std::uint32_t> order{at};
    for (std::size_t i = 0; i < order.size(); ++i) {
      const auto& n = nodes_[order[i]];
      for (auto c : n.child)
        if (c != kNone) order.push_back(c);
      for (const auto& [m, c] : n.observed) order.push_back(c);
    }
    std::vector<std::uint32_t> remap(nodes_.size(), kNone);
    for (std::size_t i = 0; i < order.size(); ++i) remap[order[i]] = static_cast<std::uint32_t>(i);
    std::vector<Node> kept;
    kept.reserve(order.size());
    for (auto old : order) {
      kept.push_back(std::move(nodes_[old]));
      for (auto& c : kept.back().child)
        if (c != kNone) c = remap[c];
      for (auto& [m, c] : kept.back().observed) c = remap[c];
    }
    nodes_ = std::move(kept);
    root_ = 0;
  }

  void expand(Node& n) {
    n.moves = posit_moves(n.dialogue, n.dialogue.next_step(), PositEnumeration::Constrained, config_.protocol);
    n.child.assign(n.moves.size(), kNone);
    n.expanded = true;
  }

  std::size_t ucb_pick(const Node& n) const {
    std::size_t best = 0;
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n.child.size(); ++i) {
      if (n.child[i] == kNone) return i;
      const auto& c = nodes_[n.child[i]];
      const double u = ucb_value(c.total, c.visits, n.visits, config_.exploration);
      if (u > top) {
        top = u;
        best = i;
      }
    }
    return best;
  }

  Dialogue rollout(Dialogue d, const SimulatedUser& user) {
    while (!d.terminated()) {
      const auto step = d.next_step();
      if (actor_at(step) == Actor::System) {
        auto moves = posit_moves(d, step, PositEnumeration::Constrained, config_.protocol);
        if (moves.empty()) moves.push_back(Move::posit({}));
        d = apply_move(d, moves[std::uniform_int_distribution<std::size_t>(0, moves.size() - 1)(rng_)]);
      } else {
        d = apply_move(d, simulate_user_move(d, user, *ctx_, rng_));
      }
    }
    return d;
  }

  void iterate() {
    const SimulatedUser user = users_->sample(rng_);
    std::vector<std::uint32_t> path{root_};
    std::uint32_t at = root_;
    bool fresh = false;
    while (!fresh && nodes_[at].kind != Kind::Terminal) {
      if (nodes_[at].kind == Kind::Decision) {
        if (!nodes_[at].expanded) expand(nodes_[at]);
        if (nodes_[at].moves.empty()) break;
        const auto i = ucb_pick(nodes_[at]);
        if (nodes_[at].child[i] == kNone) {
          auto next = apply_move(nodes_[at].dialogue, nodes_[at].moves[i]);
          const auto c = add(std::move(next));
          nodes_[at].child[i] = c;
          fresh = true;
        }
        at = nodes_[at].child[i];
      } else {
        auto m = simulate_user_move(nodes_[at].dialogue, user, *ctx_, rng_);
        auto it = nodes_[at].observed.find(m);
        if (it == nodes_[at].observed.end()) {
          auto next = apply_move(nodes_[at].dialogue, m);
          const auto c = add(std::move(next));
          nodes_[at].observed.emplace(std::move(m), c);
          fresh = true;
          at = c;
        } else {
          at = it->second;
        }
      }
      path.push_back(at);
    }
    const Dialogue end = nodes_[at].kind == Kind::Terminal ? nodes_[at].dialogue : rollout(nodes_[at].dialogue, user);
    const double r = end.terminated() ? dialogue_reward(end, *ctx_, user.beliefs, config_.propagation) : 0.0;
    for (auto p : path) {
      nodes_[p].visits += 1;
      nodes_[p].total += r;
    }
  }

  std::shared_ptr<const UserSampler> users_;
  std::shared_ptr<const ConcernContext> ctx_;
  StrategyConfig config_;
  Rng rng_;
  std::vector<Node> nodes_;
  std::uint32_t root_ = 0;
  std::optional<SearchTrace> trace_;
};

/// One-shot search from a fresh tree.
inline Move choose_move(const Dialogue& d, std::shared_ptr<const UserSampler> users,
                        std::shared_ptr<const ConcernContext> ctx, const StrategyConfig& config = {}) {
  MctsStrategist s(std::move(users), std::move(ctx), config);
  return s.choose(d);
}

}  // namespace aps
