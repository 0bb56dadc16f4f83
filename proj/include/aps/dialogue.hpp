#pragma once

#include <aps/argument_graph.hpp>

#include <compare>
#include <cstddef>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace aps {

enum class Actor : std::uint8_t { System, User };

enum class NullKind : std::uint8_t { Reject, Accept };

/// null^rej_A / null^acc_A: the user answers argument `target` without a counterargument.
struct NullMarker {
  ArgIndex target = 0;
  NullKind kind = NullKind::Accept;

  auto operator<=>(const NullMarker&) const = default;
};

struct Move {
  Actor actor = Actor::System;
  ArgSet arguments;
  std::vector<NullMarker> nulls;  // sorted; User moves only

  bool empty() const noexcept { return arguments.empty() && nulls.empty(); }

  auto operator<=>(const Move&) const = default;

  static Move posit(ArgSet args) {
    normalize(args);
    return Move{Actor::System, std::move(args), {}};
  }

  static Move menu(ArgSet args, std::vector<NullMarker> nulls = {}) {
    normalize(args);
    std::sort(nulls.begin(), nulls.end());
    return Move{Actor::User, std::move(args), std::move(nulls)};
  }
};

enum class Termination : std::uint8_t { InProgress, SystemStopped, NoUserMoves };

inline Actor actor_at(std::size_t step) { return step % 2 == 1 ? Actor::System : Actor::User; }

struct ProtocolConfig {
  /// Upper bound on posit-move size during enumeration (step 3 is widened to
  /// the number of user arguments that must be countered).
  std::size_t max_move_size = 6;
  /// Refuse to enumerate more than this many candidate moves.
  std::size_t max_enumeration = 1'000'000;
};

/// Sequence of moves over one graph. Value type: apply_move returns a new dialogue.
class Dialogue {
public:
  Dialogue() = default;

  explicit Dialogue(std::shared_ptr<const ArgumentGraph> graph)
      : graph_(std::move(graph)), played_at_(graph_ ? graph_->size() : 0, 0) {
    if (!graph_) throw Error("dialogue needs a graph");
  }

  /// Builds a dialogue from recorded moves without protocol checks; the
  /// termination status is inferred from the last move. Use validate() to check.
  static Dialogue from_moves(std::shared_ptr<const ArgumentGraph> graph, std::vector<Move> moves);

  const ArgumentGraph& graph() const { return *graph_; }
  const std::shared_ptr<const ArgumentGraph>& graph_ptr() const noexcept { return graph_; }

  const std::vector<Move>& moves() const noexcept { return moves_; }
  std::size_t length() const noexcept { return moves_.size(); }
  std::size_t next_step() const noexcept { return moves_.size() + 1; }

  /// 1-based.
  const Move& move(std::size_t step) const {
    if (step == 0 || step > moves_.size()) throw Error("step " + std::to_string(step) + " out of range");
    return moves_[step - 1];
  }

  Termination status() const noexcept { return status_; }
  bool terminated() const noexcept { return status_ != Termination::InProgress; }

  /// First step at which `a` was played, 0 if never.
  std::size_t played_at(ArgIndex a) const { return played_at_.at(a); }
  bool played_before(ArgIndex a, std::size_t step) const {
    auto s = played_at_.at(a);
    return s != 0 && s < step;
  }

  ArgSet played() const {
    ArgSet out;
    for (ArgIndex i = 0; i < played_at_.size(); ++i)
      if (played_at_[i] != 0) out.push_back(i);
    return out;
  }

  std::vector<ArgSet> played_per_step() const {
    std::vector<ArgSet> out;
    out.reserve(moves_.size());
    for (const auto& m : moves_) out.push_back(m.arguments);
    return out;
  }

  bool operator==(const Dialogue& other) const {
    return graph_ == other.graph_ && moves_ == other.moves_ && status_ == other.status_;
  }

private:
  friend Dialogue apply_move(const Dialogue&, const Move&);

  void push(Move m) {
    const auto step = moves_.size() + 1;
    for (ArgIndex a : m.arguments)
      if (a < played_at_.size() && played_at_[a] == 0) played_at_[a] = step;
    moves_.push_back(std::move(m));
  }

  std::shared_ptr<const ArgumentGraph> graph_;
  std::vector<Move> moves_;
  std::vector<std::size_t> played_at_;
  Termination status_ = Termination::InProgress;
};

// ---------------------------------------------------------------------------
// Move generation

/// Attackers of `a` not played at any step before `step`.
inline ArgSet options(const Dialogue& d, ArgIndex a, std::size_t step) {
  ArgSet out;
  for (ArgIndex b : d.graph().attackers(a))
    if (!d.played_before(b, step)) out.push_back(b);
  return out;
}

/// Arguments of the move preceding `step` (empty at step 1 or past the end).
inline const ArgSet& previous_arguments(const Dialogue& d, std::size_t step) {
  static const ArgSet none;
  if (step < 2 || step - 1 > d.length()) return none;
  return d.move(step - 1).arguments;
}

/// Union of the options over the previous move's arguments.
inline ArgSet posit_pool(const Dialogue& d, std::size_t step) {
  ArgSet pool;
  for (ArgIndex a : previous_arguments(d, step)) {
    auto o = options(d, a, step);
    pool.insert(pool.end(), o.begin(), o.end());
  }
  normalize(pool);
  return pool;
}

/// Step-2 user arguments that the step-3 posit has to counter: those with at
/// least one attacker still available.
inline ArgSet required_counters(const Dialogue& d) {
  ArgSet out;
  for (ArgIndex a : previous_arguments(d, 3))
    if (!options(d, a, 3).empty()) out.push_back(a);
  return out;
}

enum class PositEnumeration { Raw, Constrained };

namespace detail {

inline void check_turn(std::size_t step, Actor expected) {
  if (step == 0) throw Error("steps are 1-based");
  if (actor_at(step) != expected)
    throw Error("step " + std::to_string(step) + " is not a " +
                (expected == Actor::System ? "System" : "User") + " turn");
}

inline std::size_t count_non_initial(const ArgumentGraph& g, const ArgSet& args) {
  std::size_t n = 0;
  for (ArgIndex a : args)
    if (!g.is_initial(a)) ++n;
  return n;
}

}  // namespace detail

/// Candidate System moves at `step`. Raw follows the plain definition (every
/// subset of the pool). Constrained applies the size cap and conditions 6-7.
inline std::vector<Move> posit_moves(const Dialogue& d, std::size_t step,
                                     PositEnumeration mode = PositEnumeration::Constrained,
                                     const ProtocolConfig& config = {}) {
  detail::check_turn(step, Actor::System);
  const auto& g = d.graph();
  std::vector<Move> out;
  if (step == 1) {
    for (ArgIndex a = 0; a < g.size(); ++a) out.push_back(Move::posit({a}));
    return out;
  }
  const ArgSet pool = posit_pool(d, step);
  const bool constrained = mode == PositEnumeration::Constrained;
  ArgSet required;
  std::size_t cap = pool.size();
  if (constrained) {
    cap = std::min(cap, config.max_move_size);
    if (step == 3) {
      required = required_counters(d);
      cap = std::max(cap, std::min(pool.size(), required.size()));
    }
  } else if (pool.size() > 24) {
    throw Error("raw posit enumeration over " + std::to_string(pool.size()) + " options");
  }
  const std::size_t non_initial_cap = (constrained && step >= 5) ? 2 : pool.size();

  ArgSet current;
  auto covers = [&](const ArgSet& move) {
    for (ArgIndex a : required) {
      bool hit = false;
      for (ArgIndex b : move)
        if (g.attacks(b, a)) {
          hit = true;
          break;
        }
      if (!hit) return false;
    }
    return true;
  };
  auto rec = [&](auto&& self, std::size_t i, std::size_t non_initial) -> void {
    if (i == pool.size()) {
      if (!constrained || step != 3 || covers(current)) {
        out.push_back(Move::posit(current));
        if (out.size() > config.max_enumeration) throw Error("posit enumeration limit exceeded");
      }
      return;
    }
    self(self, i + 1, non_initial);
    if (current.size() >= cap) return;
    const bool init = g.is_initial(pool[i]);
    if (!init && non_initial >= non_initial_cap) return;
    current.push_back(pool[i]);
    self(self, i + 1, non_initial + (init ? 0 : 1));
    current.pop_back();
  };
  rec(rec, 0, 0);
  std::sort(out.begin(), out.end());
  return out;
}

/// The menu displayed for one argument: remaining attackers plus, whenever the
/// argument has attackers at all, the two null options.
struct MenuListing {
  ArgIndex target = 0;
  ArgSet options;
  bool has_nulls = false;

  bool empty() const noexcept { return options.empty() && !has_nulls; }
};

inline MenuListing menu_listing(const Dialogue& d, ArgIndex a, std::size_t step) {
  if (!contains(previous_arguments(d, step), a))
    throw Error("argument '" + d.graph().id(a) + "' was not posited at step " +
                std::to_string(step - 1));
  MenuListing listing{a, {}, false};
  if (d.graph().attackers(a).empty()) return listing;
  listing.options = options(d, a, step);
  listing.has_nulls = true;
  return listing;
}

/// Listings for every attacked argument of the previous move.
inline std::vector<MenuListing> menu_listings(const Dialogue& d, std::size_t step) {
  std::vector<MenuListing> out;
  for (ArgIndex a : previous_arguments(d, step))
    if (!d.graph().attackers(a).empty()) out.push_back(menu_listing(d, a, step));
  return out;
}

/// True iff MenuMoves(D, step) is non-empty.
inline bool has_menu_moves(const Dialogue& d, std::size_t step) {
  for (ArgIndex a : previous_arguments(d, step))
    if (a < d.graph().size() && !d.graph().attackers(a).empty()) return true;
  return false;
}

/// Why `move` is not a member of MenuMoves(D, step), or nullopt if it is.
/// A null for A may not be combined with counterarguments that attack A.
inline std::optional<std::string> menu_move_problem(const Dialogue& d, std::size_t step,
                                                    const Move& move) {
  const auto& g = d.graph();
  if (move.actor != Actor::User) return "not a user move";
  const auto listings = menu_listings(d, step);
  if (listings.empty()) return "no argument of the previous move can be countered";
  auto listed = [&](ArgIndex target) -> const MenuListing* {
    for (const auto& l : listings)
      if (l.target == target) return &l;
    return nullptr;
  };
  std::vector<ArgIndex> nulled;
  for (const auto& n : move.nulls) {
    if (!listed(n.target)) return "null option for '" + g.id(n.target) + "' which is not listed";
    if (contains(nulled, n.target)) return "two null options for '" + g.id(n.target) + "'";
    nulled.push_back(n.target);
    std::sort(nulled.begin(), nulled.end());
  }
  for (ArgIndex b : move.arguments) {
    bool placed = false;
    for (const auto& l : listings)
      if (!contains(nulled, l.target) && contains(l.options, b)) placed = true;
    if (!placed) return "'" + g.id(b) + "' is not a listed counterargument";
    for (ArgIndex t : nulled)
      if (g.attacks(b, t)) return "null option and counterargument both given for '" + g.id(t) + "'";
  }
  for (const auto& l : listings) {
    if (contains(nulled, l.target)) continue;
    bool answered = false;
    for (ArgIndex b : move.arguments)
      if (contains(l.options, b)) answered = true;
    if (!answered) return "no choice made for '" + g.id(l.target) + "'";
  }
  return std::nullopt;
}

/// Every candidate User move at `step` (product of per-argument picks).
inline std::vector<Move> menu_moves(const Dialogue& d, std::size_t step,
                                    const ProtocolConfig& config = {}) {
  detail::check_turn(step, Actor::User);
  const auto listings = menu_listings(d, step);
  std::vector<Move> out;
  if (listings.empty()) return out;

  struct Pick {
    ArgSet args;
    std::optional<NullMarker> null;
  };
  std::vector<std::vector<Pick>> picks;
  double total = 1;
  for (const auto& l : listings) {
    if (l.options.size() > 20) throw Error("menu enumeration over too many options");
    std::vector<Pick> p;
    const std::size_t n = l.options.size();
    for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
      Pick pick;
      for (std::size_t i = 0; i < n; ++i)
        if (mask & (std::size_t{1} << i)) pick.args.push_back(l.options[i]);
      p.push_back(std::move(pick));
    }
    p.push_back({{}, NullMarker{l.target, NullKind::Reject}});
    p.push_back({{}, NullMarker{l.target, NullKind::Accept}});
    total *= static_cast<double>(p.size());
    picks.push_back(std::move(p));
  }
  if (total > static_cast<double>(config.max_enumeration))
    throw Error("menu enumeration limit exceeded");

  std::set<Move> unique;
  const auto& g = d.graph();
  std::vector<std::size_t> idx(picks.size(), 0);
  while (true) {
    Move m{Actor::User, {}, {}};
    for (std::size_t h = 0; h < picks.size(); ++h) {
      const auto& p = picks[h][idx[h]];
      m.arguments.insert(m.arguments.end(), p.args.begin(), p.args.end());
      if (p.null) m.nulls.push_back(*p.null);
    }
    normalize(m.arguments);
    std::sort(m.nulls.begin(), m.nulls.end());
    bool exclusive = true;
    for (const auto& n : m.nulls)
      for (ArgIndex b : m.arguments)
        if (g.attacks(b, n.target)) exclusive = false;
    if (exclusive) unique.insert(std::move(m));
    std::size_t h = 0;
    while (h < idx.size() && ++idx[h] == picks[h].size()) idx[h++] = 0;
    if (h == idx.size()) break;
  }
  out.assign(unique.begin(), unique.end());
  return out;
}

// ---------------------------------------------------------------------------
// Applying moves

namespace detail {

/// Condition number violated by a System move at `step`, with message.
inline std::optional<std::pair<int, std::string>> posit_problem(const Dialogue& d,
                                                                std::size_t step,
                                                                const Move& move,
                                                                bool require_pool_at_step3) {
  const auto& g = d.graph();
  if (!move.nulls.empty())
    return std::pair{step == 1 ? 3 : 5, std::string("System move carries null options")};
  if (step == 1) {
    if (!g.goal()) return std::pair{3, std::string("graph has no persuasion goal")};
    if (move.arguments != ArgSet{*g.goal()})
      return std::pair{3, std::string("first move must posit exactly the persuasion goal")};
    return std::nullopt;
  }
  if (step > 3 || require_pool_at_step3) {
    const ArgSet pool = posit_pool(d, step);
    for (ArgIndex a : move.arguments)
      if (!contains(pool, a))
        return std::pair{5, "'" + g.id(a) + "' does not attack a remaining option of step " +
                                std::to_string(step - 1)};
  }
  if (step == 3) {
    for (ArgIndex a : required_counters(d)) {
      bool hit = false;
      for (ArgIndex b : move.arguments)
        if (g.attacks(b, a)) hit = true;
      if (!hit) return std::pair{6, "user argument '" + g.id(a) + "' is not countered"};
    }
  }
  if (step >= 5 && count_non_initial(g, move.arguments) > 2)
    return std::pair{7, std::string("more than two non-initial arguments posited")};
  return std::nullopt;
}

}  // namespace detail

/// Appends a legal move. Raises ProtocolViolation naming the broken condition.
/// An empty System move ends the dialogue; a System move that leaves the user
/// nothing to answer appends an explicit empty User move and ends it.
inline Dialogue apply_move(const Dialogue& d, const Move& move) {
  if (d.terminated()) throw ProtocolViolation(8, "dialogue has already terminated");
  const auto step = d.next_step();
  const auto& g = d.graph();
  for (ArgIndex a : move.arguments)
    if (a >= g.size()) throw ProtocolViolation(1, "argument outside the graph");
  for (const auto& n : move.nulls)
    if (n.target >= g.size()) throw ProtocolViolation(1, "null option for argument outside the graph");
  if (move.actor != actor_at(step))
    throw ProtocolViolation(2, "step " + std::to_string(step) + " belongs to the " +
                                   (actor_at(step) == Actor::System ? "System" : "User"));
  if (!std::is_sorted(move.arguments.begin(), move.arguments.end()) ||
      std::adjacent_find(move.arguments.begin(), move.arguments.end()) != move.arguments.end())
    throw Error("move arguments must be sorted and unique");

  Dialogue next = d;
  if (move.actor == Actor::System) {
    if (auto p = detail::posit_problem(d, step, move, true)) throw ProtocolViolation(p->first, p->second);
    next.push(move);
    if (step > 1 && move.arguments.empty()) {
      next.status_ = Termination::SystemStopped;
    } else if (!has_menu_moves(next, step + 1)) {
      next.push(Move{Actor::User, {}, {}});
      next.status_ = Termination::NoUserMoves;
    }
  } else {
    if (auto why = menu_move_problem(d, step, move)) throw ProtocolViolation(4, *why);
    next.push(move);
  }
  return next;
}

inline Dialogue Dialogue::from_moves(std::shared_ptr<const ArgumentGraph> graph,
                                     std::vector<Move> moves) {
  Dialogue d(std::move(graph));
  for (auto& m : moves) d.push(std::move(m));
  if (!d.moves_.empty()) {
    const auto k = d.moves_.size();
    const auto& last = d.moves_.back();
    if (actor_at(k) == Actor::System && k > 1 && last.empty())
      d.status_ = Termination::SystemStopped;
    else if (actor_at(k) == Actor::User && !has_menu_moves(d, k))
      d.status_ = Termination::NoUserMoves;
  }
  return d;
}

// ---------------------------------------------------------------------------
// Validation

struct Violation {
  int condition = 0;
  std::size_t step = 0;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
  bool has(int condition) const {
    for (const auto& v : violations)
      if (v.condition == condition) return true;
    return false;
  }
};

struct ValidationOptions {
  /// Also require the final step to be a termination step.
  bool require_terminated = false;
};

/// Checks the eight conditions of the incomplete asymmetric protocol.
inline ValidationReport validate(const Dialogue& d, ValidationOptions opts = {}) {
  ValidationReport report;
  auto flag = [&](int c, std::size_t step, std::string msg) {
    report.violations.push_back({c, step, std::move(msg)});
  };
  const auto& g = d.graph();
  const auto k = d.length();
  if (k == 0) {
    if (opts.require_terminated) flag(8, 0, "empty dialogue");
    return report;
  }
  // Every other condition needs graph lookups, so foreign arguments end the check.
  for (std::size_t i = 1; i <= k; ++i) {
    const auto& m = d.move(i);
    bool in_graph = true;
    for (ArgIndex a : m.arguments)
      if (a >= g.size()) in_graph = false;
    for (const auto& n : m.nulls)
      if (n.target >= g.size()) in_graph = false;
    if (!in_graph) flag(1, i, "argument outside the graph");
  }
  if (!report.ok()) return report;
  for (std::size_t i = 1; i <= k; ++i) {
    const auto& m = d.move(i);
    if (m.actor != actor_at(i)) flag(2, i, "turn order broken");
    const bool terminal_empty_user =
        i == k && actor_at(i) == Actor::User && m.empty() && !has_menu_moves(d, i);
    if (actor_at(i) == Actor::User) {
      if (!terminal_empty_user)
        if (auto why = menu_move_problem(d, i, Move{Actor::User, m.arguments, m.nulls}))
          flag(4, i, *why);
    } else {
      if (auto p = detail::posit_problem(d, i, Move{Actor::System, m.arguments, m.nulls}, false))
        flag(p->first, i, p->second);
    }
    const bool ends_here = (actor_at(i) == Actor::System && i > 1 && m.empty()) ||
                           (actor_at(i) == Actor::User && !has_menu_moves(d, i));
    if (i < k && ends_here) flag(8, i, "dialogue continues after a termination step");
    if (i == k && opts.require_terminated && !ends_here) flag(8, i, "final step is not a termination step");
  }
  return report;
}

// ---------------------------------------------------------------------------
// Structural classification

struct StructureFlags {
  bool complete = false;
  bool linear = false;

  bool operator==(const StructureFlags&) const = default;
};

/// complete: every leaf of the played attack tree was posited by the System
/// (even depth) and no null^rej was chosen. linear: at most one argument per
/// move and the played subgraph is a single chain from the goal.
inline StructureFlags classify(const Dialogue& d) {
  if (!d.terminated()) throw Error("cannot classify a dialogue that is still in progress");
  const auto& g = d.graph();
  StructureFlags flags;

  bool null_rej = false;
  for (const auto& m : d.moves())
    for (const auto& n : m.nulls)
      if (n.kind == NullKind::Reject) null_rej = true;

  const ArgSet played = d.played();
  bool leaves_even = true;
  for (ArgIndex a : played) {
    bool answered = false;
    for (ArgIndex b : g.attackers(a))
      if (d.played_at(b) > d.played_at(a)) answered = true;
    if (!answered && actor_at(d.played_at(a)) == Actor::User) leaves_even = false;
  }
  flags.complete = leaves_even && !null_rej;

  bool singletons = true;
  for (const auto& m : d.moves())
    if (m.arguments.size() > 1) singletons = false;
  bool chain = false;
  if (singletons && g.goal() && d.played_at(*g.goal()) == 1) {
    std::size_t arcs = 0;
    bool degrees_ok = true;
    for (ArgIndex a : played) {
      std::size_t in = 0, out = 0;
      for (ArgIndex b : g.attackers(a))
        if (d.played_at(b) != 0) ++in;
      for (ArgIndex b : g.targets(a))
        if (d.played_at(b) != 0) ++out;
      arcs += in;
      if (in > 1 || out > 1) degrees_ok = false;
    }
    if (degrees_ok && arcs + 1 == played.size()) {
      std::size_t seen = 1;
      ArgIndex cur = *g.goal();
      for (std::size_t guard = 0; guard < played.size(); ++guard) {
        std::optional<ArgIndex> next;
        for (ArgIndex b : g.attackers(cur))
          if (d.played_at(b) != 0) next = b;
        if (!next || *next == *g.goal()) break;
        cur = *next;
        ++seen;
      }
      chain = seen == played.size();
    }
  }
  flags.linear = singletons && chain;
  return flags;
}

}  // namespace aps
