#pragma once

#include <aps/io.hpp>
#include <aps/simulation.hpp>
#include <aps/strategy.hpp>

#include <sqlite3.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace aps {

/// Error reported to a client. `condition` is set for protocol violations.
class ServiceError : public Error {
public:
  ServiceError(int status, std::string code, const std::string& message, int condition = 0)
      : Error(message), status_(status), code_(std::move(code)), condition_(condition) {}

  int status() const noexcept { return status_; }
  const std::string& code() const noexcept { return code_; }
  int condition() const noexcept { return condition_; }

  Json to_json() const {
    Json e{{"code", code_}, {"condition", condition_ ? Json(condition_) : Json(nullptr)}, {"message", what()}};
    return Json{{"v", wire_version}, {"error", e}};
  }

private:
  int status_;
  std::string code_;
  int condition_;
};

// ---------------------------------------------------------------------------
// Registry of graphs and population models

struct GraphModel {
  std::string id;
  std::shared_ptr<const ArgumentGraph> graph;
  std::vector<BetaMixture> mixtures;  // graph order
};

/// A debate topic: the graph argued when the participant's stance is positive
/// and the dual graph for a negative stance.
struct Topic {
  std::string id;
  std::string positive;
  std::string negative;
};

class EngineRegistry {
public:
  void add_graph(std::string id, std::shared_ptr<const ArgumentGraph> g, const std::map<ArgumentId, BetaMixture>& bundle = {}) {
    if (!g || !g->goal()) throw Error("graph '" + id + "' has no persuasion goal");
    GraphModel m{id, g, mixtures_for(*g, bundle)};
    graphs_[id] = std::move(m);
  }

  void add_topic(Topic t) {
    if (!graphs_.count(t.positive) || !graphs_.count(t.negative))
      throw LookupError("topic '" + t.id + "' names an unknown graph");
    topics_[t.id] = std::move(t);
  }

  void set_rankings(std::vector<PreferenceRelation> r) { rankings_ = std::move(r); }
  void set_trees(TreeBundle t) { trees_ = std::move(t); }

  const GraphModel& graph(const std::string& id) const {
    auto it = graphs_.find(id);
    if (it == graphs_.end()) throw ServiceError(404, "unknown_graph", "unknown graph '" + id + "'");
    return it->second;
  }

  /// Topic by id; a bare graph id acts as a topic arguing that graph for both stances.
  Topic topic(const std::string& id) const {
    if (auto it = topics_.find(id); it != topics_.end()) return it->second;
    if (graphs_.count(id)) return Topic{id, id, id};
    throw ServiceError(404, "unknown_graph", "unknown graph '" + id + "'");
  }

  std::vector<Topic> topics() const {
    std::vector<Topic> out;
    for (const auto& [id, t] : topics_) out.push_back(t);
    if (out.empty())
      for (const auto& [id, g] : graphs_) out.push_back(Topic{id, id, id});
    return out;
  }

  const std::vector<PreferenceRelation>& rankings() const noexcept { return rankings_; }
  const TreeBundle& trees() const noexcept { return trees_; }

  /// Concern context for one participant: tree predictions when trees are
  /// loaded, else population rankings, else a neutral 0.5 everywhere.
  ConcernContext context_for(const ArgumentGraph& g, const UserProfile& profile) const {
    if (trees_.size()) return ConcernContext::from_trees(g, trees_, profile, rankings_);
    if (!rankings_.empty()) return ConcernContext::from_population(g, rankings_);
    return ConcernContext::from_scores(g, {});
  }

private:
  std::map<std::string, GraphModel> graphs_;
  std::map<std::string, Topic> topics_;
  std::vector<PreferenceRelation> rankings_;
  TreeBundle trees_;
};

// ---------------------------------------------------------------------------
// Session records and stores

struct SessionRecord {
  std::string id;
  std::string topic;
  std::string graph;
  std::string strategy;  // "advanced" | "baseline"
  double stance = 0.0;
  UserProfile profile;
  std::uint64_t seed = 0;
  bool debug = false;
  std::vector<Move> moves;
  std::optional<double> before, after;
  std::int64_t updated = 0;  // unix seconds
};

inline std::int64_t unix_now() {
  return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch()).count();
}

inline Json session_to_json(const SessionRecord& s, const ArgumentGraph& g) {
  Json moves = Json::array();
  for (std::size_t i = 0; i < s.moves.size(); ++i) moves.push_back(move_to_json(g, s.moves[i], i + 1));
  return Json{{"id", s.id},
              {"topic", s.topic},
              {"graph", s.graph},
              {"strategy", s.strategy},
              {"stance", s.stance},
              {"profile", profile_to_json(s.profile)},
              {"seed", s.seed},
              {"debug", s.debug},
              {"moves", moves},
              {"before", s.before ? Json(*s.before) : Json(nullptr)},
              {"after", s.after ? Json(*s.after) : Json(nullptr)},
              {"updated", s.updated}};
}

inline SessionRecord session_from_json(const Json& j, const EngineRegistry& reg) {
  SessionRecord s;
  s.id = j.at("id").get<std::string>();
  s.topic = j.at("topic").get<std::string>();
  s.graph = j.at("graph").get<std::string>();
  s.strategy = j.at("strategy").get<std::string>();
  s.stance = j.at("stance").get<double>();
  s.profile = profile_from_json(j.at("profile"));
  s.seed = j.at("seed").get<std::uint64_t>();
  s.debug = j.at("debug").get<bool>();
  const auto& g = *reg.graph(s.graph).graph;
  for (const auto& m : j.at("moves")) s.moves.push_back(move_from_json(g, m));
  if (!j.at("before").is_null()) s.before = j.at("before").get<double>();
  if (!j.at("after").is_null()) s.after = j.at("after").get<double>();
  s.updated = j.at("updated").get<std::int64_t>();
  return s;
}

/// Serialized sessions by id. Implementations must be safe for concurrent use.
class SessionStore {
public:
  virtual ~SessionStore() = default;
  virtual std::optional<std::string> get(const std::string& id) = 0;
  virtual void put(const std::string& id, const std::string& body, std::int64_t updated) = 0;
  virtual void erase(const std::string& id) = 0;
  /// Drops sessions not updated since `cutoff`; returns how many.
  virtual std::size_t purge_before(std::int64_t cutoff) = 0;
};

class MemoryStore final : public SessionStore {
public:
  std::optional<std::string> get(const std::string& id) override {
    std::lock_guard lock(mu_);
    auto it = rows_.find(id);
    if (it == rows_.end()) return std::nullopt;
    return it->second.first;
  }
  void put(const std::string& id, const std::string& body, std::int64_t updated) override {
    std::lock_guard lock(mu_);
    rows_[id] = {body, updated};
  }
  void erase(const std::string& id) override {
    std::lock_guard lock(mu_);
    rows_.erase(id);
  }
  std::size_t purge_before(std::int64_t cutoff) override {
    std::lock_guard lock(mu_);
    return std::erase_if(rows_, [&](const auto& kv) { return kv.second.second < cutoff; });
  }

private:
  std::mutex mu_;
  std::map<std::string, std::pair<std::string, std::int64_t>> rows_;
};

/// SQLite-backed store; one table of (id, body, updated).
class SqliteStore final : public SessionStore {
public:
  explicit SqliteStore(const std::filesystem::path& path) {
    if (sqlite3_open(path.string().c_str(), &db_) != SQLITE_OK) {
      std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
      sqlite3_close(db_);
      throw Error("cannot open session store " + path.string() + ": " + msg);
    }
    exec("PRAGMA journal_mode=WAL");
    exec("CREATE TABLE IF NOT EXISTS sessions (id TEXT PRIMARY KEY, body TEXT NOT NULL, updated INTEGER NOT NULL)");
  }
  ~SqliteStore() override { sqlite3_close(db_); }
  SqliteStore(const SqliteStore&) = delete;
  SqliteStore& operator=(const SqliteStore&) = delete;

  std::optional<std::string> get(const std::string& id) override {
    std::lock_guard lock(mu_);
    Stmt st(db_, "SELECT body FROM sessions WHERE id = ?1");
    sqlite3_bind_text(st.s, 1, id.c_str(), -1, SQLITE_TRANSIENT);
    if (sqlite3_step(st.s) != SQLITE_ROW) return std::nullopt;
    return std::string(reinterpret_cast<const char*>(sqlite3_column_text(st.s, 0)));
  }

  void put(const std::string& id, const std::string& body, std::int64_t updated) override {
    std::lock_guard lock(mu_);
    Stmt st(db_, "INSERT INTO sessions (id, body, updated) VALUES (?1, ?2, ?3) "
                 "ON CONFLICT(id) DO UPDATE SET body = excluded.body, updated = excluded.updated");
    sqlite3_bind_text(st.s, 1, id.c_str(), -1, SQLITE_TRANSIENT);
    sqlite3_bind_text(st.s, 2, body.c_str(), -1, SQLITE_TRANSIENT);
    sqlite3_bind_int64(st.s, 3, updated);
    st.done();
  }

  void erase(const std::string& id) override {
    std::lock_guard lock(mu_);
    Stmt st(db_, "DELETE FROM sessions WHERE id = ?1");
    sqlite3_bind_text(st.s, 1, id.c_str(), -1, SQLITE_TRANSIENT);
    st.done();
  }

  std::size_t purge_before(std::int64_t cutoff) override {
    std::lock_guard lock(mu_);
    Stmt st(db_, "DELETE FROM sessions WHERE updated < ?1");
    sqlite3_bind_int64(st.s, 1, cutoff);
    st.done();
    return static_cast<std::size_t>(sqlite3_changes(db_));
  }

private:
  struct Stmt {
    sqlite3* db;
    sqlite3_stmt* s = nullptr;
    Stmt(sqlite3* d, const char* sql) : db(d) {
      if (sqlite3_prepare_v2(db, sql, -1, &s, nullptr) != SQLITE_OK) throw Error(std::string("sqlite: ") + sqlite3_errmsg(db));
    }
    ~Stmt() { sqlite3_finalize(s); }
    void done() {
      if (sqlite3_step(s) != SQLITE_DONE) throw Error(std::string("sqlite: ") + sqlite3_errmsg(db));
    }
  };

  void exec(const char* sql) {
    char* err = nullptr;
    if (sqlite3_exec(db_, sql, nullptr, nullptr, &err) != SQLITE_OK) {
      std::string msg = err ? err : "unknown error";
      sqlite3_free(err);
      throw Error("sqlite: " + msg);
    }
  }

  sqlite3* db_ = nullptr;
  std::mutex mu_;
};

// ---------------------------------------------------------------------------
// Session manager

struct SessionConfig {
  std::size_t simulations = 1000;
  std::int64_t ttl_seconds = 24 * 3600;
  ProtocolConfig protocol{};
};

/// Transport-independent session logic. Requests on one session are
/// serialized; different sessions proceed in parallel.
class SessionManager {
public:
  SessionManager(std::shared_ptr<const EngineRegistry> registry, std::shared_ptr<SessionStore> store,
                 SessionConfig config = {})
      : reg_(std::move(registry)), store_(std::move(store)), config_(config) {
    if (!reg_ || !store_) throw Error("session manager needs a registry and a store");
  }

  const EngineRegistry& registry() const noexcept { return *reg_; }

  Json list_graphs() const {
    Json out = Json::array();
    for (const auto& t : reg_->topics()) {
      const auto& pos = reg_->graph(t.positive);
      const auto& g = *pos.graph;
      out.push_back({{"id", t.id},
                     {"positive", t.positive},
                     {"negative", t.negative},
                     {"goal", {{"id", g.id(*g.goal())}, {"text", g.argument(*g.goal()).text}}}});
    }
    return Json{{"v", wire_version}, {"graphs", out}};
  }

  /// {"graph", "stance", "strategy"?, "profile"?, "seed"?, "debug"?}
  Json create(const Json& req) {
    check_version(req);
    if (!req.contains("graph") || !req.at("graph").is_string()) throw bad_request("field 'graph' must be a string");
    if (!req.contains("stance") || !req.at("stance").is_number()) throw bad_request("field 'stance' must be a number");
    const double stance = req.at("stance").get<double>();
    if (!(stance >= -3.0 && stance <= 3.0)) throw ServiceError(400, "out_of_range", "stance must lie in [-3,3]");
    if (stance == 0.0) throw ServiceError(400, "out_of_range", "stance 0 is not permitted");
    const auto topic = reg_->topic(req.at("graph").get<std::string>());

    SessionRecord s;
    s.id = new_id();
    s.topic = topic.id;
    s.graph = stance > 0 ? topic.positive : topic.negative;
    s.strategy = req.value("strategy", std::string("advanced"));
    if (s.strategy != "advanced" && s.strategy != "baseline") throw bad_request("strategy must be \"advanced\" or \"baseline\"");
    try {
      s.profile = profile_from_json(req.contains("profile") ? req.at("profile") : Json());
    } catch (const Error& e) {
      throw ServiceError(400, "invalid_profile", e.what());
    }
    s.stance = stance;
    s.before = stance;
    if (req.contains("seed")) {
      const auto& seed = req.at("seed");
      if (!seed.is_number_integer() || (!seed.is_number_unsigned() && seed.get<std::int64_t>() < 0))
        throw bad_request("seed must be a non-negative integer");
      s.seed = seed.get<std::uint64_t>();
    } else {
      s.seed = random_u64();
    }
    s.debug = req.value("debug", false);

    const auto& model = reg_->graph(s.graph);
    Dialogue d(model.graph);
    std::optional<SearchTrace> trace;
    d = system_turn(s, d, trace);
    s.moves = d.moves();
    auto lock = session_lock(s.id);
    save(s);
    Json out = view(s, d, trace);
    out["session"] = s.id;
    return out;
  }

  /// {"selections": [{"target", "arguments": [...]} | {"target", "null": "acc"|"rej"}]}
  Json submit_move(const std::string& id, const Json& req) {
    check_version(req);
    auto lock = session_lock(id);
    auto s = load(id);
    const auto& model = reg_->graph(s.graph);
    Dialogue d = Dialogue::from_moves(model.graph, s.moves);
    if (d.terminated()) throw ServiceError(409, "dialogue_terminated", "the dialogue has already ended");
    const Move user = selections_to_move(*model.graph, req);
    try {
      d = apply_move(d, user);
    } catch (const ProtocolViolation& e) {
      throw ServiceError(422, "protocol_violation", e.what(), e.condition());
    } catch (const Error& e) {
      throw ServiceError(422, "protocol_violation", e.what(), 4);
    }
    std::optional<SearchTrace> trace;
    const auto before_len = d.length();
    if (!d.terminated()) d = system_turn(s, d, trace);
    s.moves = d.moves();
    save(s);
    Json out = view(s, d, trace);
    out["user"] = move_to_json(*model.graph, user, before_len);
    return out;
  }

  /// {"phase": "before"|"after", "value"}
  Json record_belief(const std::string& id, const Json& req) {
    check_version(req);
    auto lock = session_lock(id);
    auto s = load(id);
    if (!req.contains("phase") || !req.at("phase").is_string()) throw bad_request("field 'phase' must be a string");
    if (!req.contains("value") || !req.at("value").is_number()) throw bad_request("field 'value' must be a number");
    const auto phase = req.at("phase").get<std::string>();
    const double v = req.at("value").get<double>();
    if (!(v >= -3.0 && v <= 3.0)) throw ServiceError(400, "out_of_range", "belief must lie in [-3,3]");
    const auto& model = reg_->graph(s.graph);
    Dialogue d = Dialogue::from_moves(model.graph, s.moves);
    Json out{{"v", wire_version}, {"phase", phase}, {"value", v}};
    if (phase == "before") {
      if (v == 0.0) throw ServiceError(400, "out_of_range", "belief before the dialogue may not be 0");
      if (d.length() > 1) throw ServiceError(409, "phase_order", "belief before must be given before the first answer");
      s.before = v;
    } else if (phase == "after") {
      if (!d.terminated()) throw ServiceError(409, "phase_order", "belief after requires a finished dialogue");
      if (s.after) throw ServiceError(409, "phase_order", "belief after already recorded");
      s.after = v;
      out["record"] = record_to_json(trial_record(s, d));
    } else {
      throw bad_request("phase must be \"before\" or \"after\"");
    }
    save(s);
    return out;
  }

  Json transcript(const std::string& id) {
    auto lock = session_lock(id);
    auto s = load(id);
    const auto& model = reg_->graph(s.graph);
    Dialogue d = Dialogue::from_moves(model.graph, s.moves);
    return Json{{"v", wire_version},
                {"session", s.id},
                {"graph", s.graph},
                {"strategy", s.strategy},
                {"transcript", transcript_to_json(d)},
                {"before", s.before ? Json(*s.before) : Json(nullptr)},
                {"after", s.after ? Json(*s.after) : Json(nullptr)}};
  }

  /// Trial record of a session whose dialogue ended and whose after-belief is known.
  TrialRecord trial_record(const SessionRecord& s, const Dialogue& d) const {
    TrialRecord r;
    r.strategy = s.strategy;
    r.graph = s.graph;
    r.before = s.before.value_or(s.stance);
    r.after = s.after.value_or(r.before);
    r.orientation = s.stance > 0 ? -1 : 1;
    r.structure = classify(d);
    r.dialogue = d;
    r.validate();
    return r;
  }

  std::size_t purge_expired() { return store_->purge_before(unix_now() - config_.ttl_seconds); }

private:
  static ServiceError bad_request(const std::string& msg) { return ServiceError(400, "invalid_request", msg); }

  static void check_version(const Json& req) {
    if (!req.is_object()) throw bad_request("request body must be an object");
    if (req.contains("v") && req.at("v") != wire_version) throw bad_request("unsupported wire version");
  }

  static std::uint64_t random_u64() {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }

  static std::string new_id() {
    static const char* hex = "0123456789abcdef";
    std::string id;
    for (int i = 0; i < 2; ++i) {
      auto v = random_u64();
      for (int k = 0; k < 16; ++k, v >>= 4) id += hex[v & 15];
    }
    return id;
  }

  std::unique_lock<std::mutex> session_lock(const std::string& id) {
    std::shared_ptr<std::mutex> m;
    {
      std::lock_guard g(locks_mu_);
      auto& slot = locks_[id];
      if (!slot) slot = std::make_shared<std::mutex>();
      m = slot;
    }
    return std::unique_lock<std::mutex>(*m);
  }

  SessionRecord load(const std::string& id) {
    auto body = store_->get(id);
    if (!body) throw ServiceError(404, "unknown_session", "unknown or expired session '" + id + "'");
    auto s = session_from_json(Json::parse(*body), *reg_);
    if (s.updated < unix_now() - config_.ttl_seconds) {
      store_->erase(id);
      throw ServiceError(404, "unknown_session", "unknown or expired session '" + id + "'");
    }
    return s;
  }

  void save(SessionRecord& s) {
    s.updated = unix_now();
    store_->put(s.id, session_to_json(s, *reg_->graph(s.graph).graph).dump(), s.updated);
  }

  /// The System move for the next step. Each step searches from a fresh
  /// strategist seeded by (session seed, step), so a stored session replays
  /// identically after a restart.
  Dialogue system_turn(const SessionRecord& s, const Dialogue& d, std::optional<SearchTrace>& trace) const {
    const auto& model = reg_->graph(s.graph);
    const auto step_seed = derive_seed(s.seed, d.next_step());
    Move m;
    if (s.strategy == "baseline") {
      Rng rng(step_seed);
      m = baseline_choose(d, rng, config_.protocol);
    } else {
      auto ctx = std::make_shared<const ConcernContext>(reg_->context_for(*model.graph, s.profile));
      auto users = std::make_shared<const PopulationUserSampler>(*model.graph, ctx, model.mixtures, reg_->rankings());
      StrategyConfig sc;
      sc.simulations = std::max<std::size_t>(1, config_.simulations);
      sc.protocol = config_.protocol;
      sc.seed = step_seed;
      sc.reuse_subtree = false;
      MctsStrategist strategist(users, ctx, sc);
      m = strategist.choose(d);
      if (s.debug) trace = strategist.trace();
    }
    return apply_move(d, m);
  }

  static Move selections_to_move(const ArgumentGraph& g, const Json& req) {
    if (!req.contains("selections") || !req.at("selections").is_array()) throw bad_request("field 'selections' must be a list");
    Move m{Actor::User, {}, {}};
    std::vector<ArgIndex> targets;
    auto lookup = [&](const Json& v) {
      if (!v.is_string()) throw bad_request("argument ids must be strings");
      auto i = g.find(v.get<std::string>());
      if (!i) throw ServiceError(422, "protocol_violation", "unknown argument '" + v.get<std::string>() + "'", 1);
      return *i;
    };
    for (const auto& sel : req.at("selections")) {
      if (!sel.is_object() || !sel.contains("target")) throw bad_request("each selection needs a target");
      const auto t = lookup(sel.at("target"));
      if (std::find(targets.begin(), targets.end(), t) != targets.end())
        throw ServiceError(422, "protocol_violation", "two selections for '" + g.id(t) + "'", 4);
      targets.push_back(t);
      const bool has_args = sel.contains("arguments") && !sel.at("arguments").empty();
      const bool has_null = sel.contains("null") && !sel.at("null").is_null();
      if (has_args == has_null)
        throw ServiceError(422, "protocol_violation",
                           "selection for '" + g.id(t) + "' needs either counterarguments or one null option", 4);
      if (has_null) {
        const auto& k = sel.at("null");
        if (k == "acc") m.nulls.push_back({t, NullKind::Accept});
        else if (k == "rej") m.nulls.push_back({t, NullKind::Reject});
        else throw bad_request("null must be \"acc\" or \"rej\"");
      } else {
        if (!sel.at("arguments").is_array()) throw bad_request("arguments must be a list");
        for (const auto& a : sel.at("arguments")) {
          const auto b = lookup(a);
          if (!g.attacks(b, t))
            throw ServiceError(422, "protocol_violation", "'" + g.id(b) + "' does not attack '" + g.id(t) + "'", 4);
          m.arguments.push_back(b);
        }
      }
    }
    normalize(m.arguments);
    std::sort(m.nulls.begin(), m.nulls.end());
    return m;
  }

  static Json argument_ref(const ArgumentGraph& g, ArgIndex a) {
    return Json{{"id", g.id(a)}, {"text", g.argument(a).text}};
  }

  Json view(const SessionRecord& s, const Dialogue& d, const std::optional<SearchTrace>& trace) const {
    const auto& g = d.graph();
    const auto& last_system = d.move(actor_at(d.length()) == Actor::System ? d.length() : d.length() - 1);
    Json system = Json::array();
    for (ArgIndex a : last_system.arguments) system.push_back(argument_ref(g, a));
    Json listings = Json::array();
    if (!d.terminated())
      for (const auto& l : menu_listings(d, d.next_step())) {
        Json opts = Json::array();
        for (ArgIndex b : l.options) opts.push_back(argument_ref(g, b));
        listings.push_back({{"target", argument_ref(g, l.target)}, {"options", opts}, {"nulls", {"acc", "rej"}}});
      }
    Json out{{"v", wire_version},
             {"graph", s.graph},
             {"step", d.length()},
             {"system", system},
             {"listings", listings},
             {"terminated", d.terminated()},
             {"status", status_name(d.status())}};
    if (trace) {
      Json children = Json::array();
      for (const auto& c : trace->children)
        children.push_back({{"arguments", g.ids(c.move.arguments)}, {"visits", c.visits}, {"mean_reward", c.mean_reward}});
      out["trace"] = {{"root_visits", trace->root_visits}, {"children", children}};
    }
    return out;
  }

  std::shared_ptr<const EngineRegistry> reg_;
  std::shared_ptr<SessionStore> store_;
  SessionConfig config_;
  std::mutex locks_mu_;
  std::map<std::string, std::shared_ptr<std::mutex>> locks_;
};

// ---------------------------------------------------------------------------
// Configuration

struct ServiceConfig {
  std::string host = "0.0.0.0";
  int port = 8080;
  std::filesystem::path graph_dir = "data/graphs";
  std::filesystem::path mixtures;
  std::filesystem::path rankings;
  std::filesystem::path trees;
  std::string store = "memory";  // "memory" or a SQLite file path
  SessionConfig session{};
  std::vector<Topic> topics;
};

/// Reads a YAML/JSON config file (when given) and then applies APS_*
/// environment overrides. Relative paths resolve against the file's directory.
inline ServiceConfig load_service_config(const std::optional<std::filesystem::path>& file) {
  ServiceConfig c;
  if (file) {
    detail::YamlDoc doc{file->string()};
    const auto root = doc.parse(read_file(*file));
    const auto base = file->parent_path();
    auto path = [&](const YAML::Node& n, const char* what) {
      std::filesystem::path p = doc.str(n, what);
      return p.is_absolute() || p.empty() ? p : base / p;
    };
    if (!root.IsMap()) throw FormatError(file->string(), 1, "config must be an object");
    if (auto n = root["host"]) c.host = doc.str(n, "host");
    if (auto n = root["port"]) c.port = static_cast<int>(doc.num(n, "port"));
    if (auto n = root["graph_dir"]) c.graph_dir = path(n, "graph_dir");
    if (auto n = root["mixtures"]) c.mixtures = path(n, "mixtures");
    if (auto n = root["rankings"]) c.rankings = path(n, "rankings");
    if (auto n = root["trees"]) c.trees = path(n, "trees");
    if (auto n = root["store"]) {
      c.store = doc.str(n, "store");
      if (c.store != "memory") c.store = path(n, "store").string();
    }
    if (auto n = root["simulations"]) c.session.simulations = static_cast<std::size_t>(doc.num(n, "simulations"));
    if (auto n = root["ttl_hours"]) c.session.ttl_seconds = static_cast<std::int64_t>(doc.num(n, "ttl_hours") * 3600);
    if (auto n = root["topics"])
      for (const auto& t : doc.seq(n, "topics"))
        c.topics.push_back({doc.str(doc.field(t, "id"), "id"), doc.str(doc.field(t, "positive"), "positive"),
                            doc.str(doc.field(t, "negative"), "negative")});
  }
  auto env = [](const char* k) -> std::optional<std::string> {
    const char* v = std::getenv(k);
    if (!v || !*v) return std::nullopt;
    return std::string(v);
  };
  try {
    if (auto v = env("APS_PORT")) c.port = std::stoi(*v);
    if (auto v = env("APS_SIMULATIONS")) c.session.simulations = std::stoul(*v);
  } catch (const std::exception&) {
    throw Error("APS_PORT and APS_SIMULATIONS must be integers");
  }
  if (auto v = env("APS_GRAPH_DIR")) c.graph_dir = *v;
  if (auto v = env("APS_MIXTURES")) c.mixtures = *v;
  if (auto v = env("APS_RANKINGS")) c.rankings = *v;
  if (auto v = env("APS_TREES")) c.trees = *v;
  if (auto v = env("APS_STORE")) c.store = *v;
  return c;
}

/// Loads every *.json / *.yaml graph of the directory (id = file stem) and
/// the optional model bundles.
inline std::shared_ptr<EngineRegistry> load_registry(const ServiceConfig& c) {
  if (!std::filesystem::is_directory(c.graph_dir)) throw Error("graph directory not found: " + c.graph_dir.string());
  std::map<ArgumentId, BetaMixture> mixtures;
  if (!c.mixtures.empty()) mixtures = load_mixture_bundle(c.mixtures);
  auto reg = std::make_shared<EngineRegistry>();
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(c.graph_dir)) {
    const auto ext = e.path().extension();
    if (e.is_regular_file() && (ext == ".json" || ext == ".yaml" || ext == ".yml")) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Error("no graph files in " + c.graph_dir.string());
  for (const auto& f : files) reg->add_graph(f.stem().string(), std::make_shared<const ArgumentGraph>(load_graph(f)), mixtures);
  for (const auto& t : c.topics) reg->add_topic(t);
  if (!c.rankings.empty()) {
    std::vector<PreferenceRelation> r;
    for (auto& [p, rel] : parse_rankings(read_file(c.rankings), c.rankings.string())) r.push_back(std::move(rel));
    reg->set_rankings(std::move(r));
  }
  if (!c.trees.empty()) reg->set_trees(load_tree_bundle(c.trees));
  return reg;
}

inline std::shared_ptr<SessionStore> make_store(const std::string& spec) {
  if (spec == "memory") return std::make_shared<MemoryStore>();
  return std::make_shared<SqliteStore>(spec);
}

}  // namespace aps
