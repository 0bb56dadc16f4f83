#pragma once

// File formats. Human-authored structured files (graphs, bundles, configs)
// are read with yaml-cpp, which accepts JSON and keeps line marks; everything
// the tools write is JSON via nlohmann.

#include <aps/analytics.hpp>
#include <aps/argument_graph.hpp>
#include <aps/belief_model.hpp>
#include <aps/concerns.hpp>
#include <aps/dialogue.hpp>
#include <aps/error.hpp>

#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace aps {

using Json = nlohmann::ordered_json;

inline constexpr int wire_version = 1;

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path.string(), 0, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError(path.string(), 0, "cannot write file");
  out << text;
}

namespace detail {

struct YamlDoc {
  std::string source;

  int line(const YAML::Node& n) const { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

  [[noreturn]] void fail(const YAML::Node& n, const std::string& msg) const { throw FormatError(source, line(n), msg); }

  YAML::Node parse(const std::string& text) const {
    try {
      return YAML::Load(text);
    } catch (const YAML::Exception& e) {
      throw FormatError(source, e.mark.line >= 0 ? e.mark.line + 1 : 0, e.msg);
    }
  }

  YAML::Node field(const YAML::Node& map, const char* key) const {
    if (!map.IsMap()) fail(map, "expected an object");
    auto v = map[key];
    if (!v) fail(map, std::string("missing field '") + key + "'");
    return v;
  }

  std::string str(const YAML::Node& n, const char* what) const {
    if (!n.IsScalar()) fail(n, std::string(what) + " must be a string");
    return n.as<std::string>();
  }

  double num(const YAML::Node& n, const char* what) const {
    if (!n.IsScalar()) fail(n, std::string(what) + " must be a number");
    try {
      return n.as<double>();
    } catch (const YAML::Exception&) {
      fail(n, std::string(what) + " must be a number");
    }
  }

  const YAML::Node& seq(const YAML::Node& n, const char* what) const {
    if (!n.IsSequence()) fail(n, std::string(what) + " must be a list");
    return n;
  }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Argument graphs

/// {"nodes": [{"id", "text", "concerns": []}], "arcs": [[attacker, target]], "goal": id}
inline ArgumentGraph parse_graph(const std::string& text, const std::string& source = "<graph>") {
  detail::YamlDoc doc{source};
  const auto root = doc.parse(text);
  if (!root.IsMap()) throw FormatError(source, 1, "graph file must hold an object");
  std::vector<Argument> nodes;
  std::map<std::string, int> seen;
  for (const auto& n : doc.seq(doc.field(root, "nodes"), "nodes")) {
    Argument a;
    a.id = doc.str(doc.field(n, "id"), "id");
    if (a.id.empty()) doc.fail(n, "empty argument id");
    if (!seen.emplace(a.id, doc.line(n)).second) doc.fail(n, "duplicate argument id '" + a.id + "'");
    if (auto t = n["text"]) a.text = doc.str(t, "text");
    if (auto cs = n["concerns"])
      for (const auto& c : doc.seq(cs, "concerns")) a.concerns.push_back(doc.str(c, "concern"));
    nodes.push_back(std::move(a));
  }
  std::vector<std::pair<ArgumentId, ArgumentId>> arcs;
  if (auto as = root["arcs"]) {
    for (const auto& arc : doc.seq(as, "arcs")) {
      if (!arc.IsSequence() || arc.size() != 2) doc.fail(arc, "an arc is a pair [attacker, target]");
      auto from = doc.str(arc[0], "attacker"), to = doc.str(arc[1], "target");
      if (!seen.count(from)) doc.fail(arc[0], "arc from unknown argument '" + from + "'");
      if (!seen.count(to)) doc.fail(arc[1], "arc to unknown argument '" + to + "'");
      arcs.emplace_back(std::move(from), std::move(to));
    }
  }
  std::optional<ArgumentId> goal;
  if (auto g = root["goal"]) {
    goal = doc.str(g, "goal");
    if (!seen.count(*goal)) doc.fail(g, "goal '" + *goal + "' is not an argument");
  }
  return ArgumentGraph(std::move(nodes), arcs, goal);
}

inline ArgumentGraph load_graph(const std::filesystem::path& path) { return parse_graph(read_file(path), path.string()); }

inline Json graph_to_json(const ArgumentGraph& g) {
  Json nodes = Json::array();
  for (const auto& a : g.arguments()) nodes.push_back({{"id", a.id}, {"text", a.text}, {"concerns", a.concerns}});
  Json arcs = Json::array();
  for (const auto& [from, to] : g.arcs()) arcs.push_back({g.id(from), g.id(to)});
  Json out{{"nodes", nodes}, {"arcs", arcs}};
  if (g.goal()) out["goal"] = g.id(*g.goal());
  return out;
}

// ---------------------------------------------------------------------------
// Transcripts

inline const char* status_name(Termination t) {
  switch (t) {
    case Termination::InProgress: return "in_progress";
    case Termination::SystemStopped: return "system_stopped";
    case Termination::NoUserMoves: return "no_user_moves";
  }
  return "in_progress";
}

inline Json move_to_json(const ArgumentGraph& g, const Move& m, std::size_t step) {
  Json nulls = Json::array();
  for (const auto& n : m.nulls) nulls.push_back({{"target", g.id(n.target)}, {"kind", n.kind == NullKind::Accept ? "acc" : "rej"}});
  return Json{{"step", step},
              {"actor", m.actor == Actor::System ? "system" : "user"},
              {"arguments", g.ids(m.arguments)},
              {"nulls", nulls}};
}

inline Json transcript_to_json(const Dialogue& d) {
  Json moves = Json::array();
  for (std::size_t s = 1; s <= d.length(); ++s) moves.push_back(move_to_json(d.graph(), d.move(s), s));
  return Json{{"v", wire_version}, {"moves", moves}, {"status", status_name(d.status())}};
}

namespace detail {

[[noreturn]] inline void bad_json(const std::string& source, const std::string& msg) { throw FormatError(source, 0, msg); }

inline const Json& jfield(const Json& j, const char* key, const std::string& source) {
  if (!j.is_object() || !j.contains(key)) bad_json(source, std::string("missing field '") + key + "'");
  return j.at(key);
}

}  // namespace detail

inline Move move_from_json(const ArgumentGraph& g, const Json& j, const std::string& source = "<move>") {
  Move m;
  const auto& actor = detail::jfield(j, "actor", source);
  if (actor == "system") m.actor = Actor::System;
  else if (actor == "user") m.actor = Actor::User;
  else detail::bad_json(source, "actor must be \"system\" or \"user\"");
  for (const auto& a : detail::jfield(j, "arguments", source)) {
    if (!a.is_string()) detail::bad_json(source, "argument ids must be strings");
    auto i = g.find(a.get<std::string>());
    if (!i) throw LookupError("unknown argument '" + a.get<std::string>() + "'");
    m.arguments.push_back(*i);
  }
  normalize(m.arguments);
  if (j.contains("nulls")) {
    for (const auto& n : j.at("nulls")) {
      NullMarker marker;
      const auto& t = detail::jfield(n, "target", source);
      if (!t.is_string()) detail::bad_json(source, "null target must be a string");
      marker.target = g.index_of(t.get<std::string>());
      const auto& kind = detail::jfield(n, "kind", source);
      if (kind == "acc") marker.kind = NullKind::Accept;
      else if (kind == "rej") marker.kind = NullKind::Reject;
      else detail::bad_json(source, "null kind must be \"acc\" or \"rej\"");
      m.nulls.push_back(marker);
    }
  }
  std::sort(m.nulls.begin(), m.nulls.end());
  return m;
}

inline Dialogue transcript_from_json(std::shared_ptr<const ArgumentGraph> g, const Json& j,
                                     const std::string& source = "<transcript>") {
  const auto& moves = detail::jfield(j, "moves", source);
  if (!moves.is_array()) detail::bad_json(source, "moves must be a list");
  std::vector<Move> out;
  std::size_t step = 0;
  for (const auto& m : moves) {
    ++step;
    if (m.contains("step") && m.at("step") != step) detail::bad_json(source, "moves out of order at step " + std::to_string(step));
    out.push_back(move_from_json(*g, m, source));
  }
  return Dialogue::from_moves(std::move(g), std::move(out));
}

// ---------------------------------------------------------------------------
// Mixture bundles

/// {"arguments": {id: [{"alpha", "beta", "weight"}]}}
inline std::map<ArgumentId, BetaMixture> parse_mixture_bundle(const std::string& text,
                                                             const std::string& source = "<mixtures>") {
  detail::YamlDoc doc{source};
  const auto root = doc.parse(text);
  const auto args = doc.field(root, "arguments");
  if (!args.IsMap()) doc.fail(args, "'arguments' must be an object");
  std::map<ArgumentId, BetaMixture> out;
  for (const auto& kv : args) {
    const auto id = kv.first.as<std::string>();
    std::vector<BetaComponent> comps;
    std::vector<double> weights;
    for (const auto& c : doc.seq(kv.second, "components")) {
      try {
        comps.emplace_back(doc.num(doc.field(c, "alpha"), "alpha"), doc.num(doc.field(c, "beta"), "beta"));
      } catch (const DomainError& e) {
        doc.fail(c, e.what());
      }
      weights.push_back(doc.num(doc.field(c, "weight"), "weight"));
    }
    try {
      out.emplace(id, BetaMixture(std::move(comps), std::move(weights)));
    } catch (const DomainError& e) {
      doc.fail(kv.second, "argument '" + id + "': " + e.what());
    }
  }
  return out;
}

inline std::map<ArgumentId, BetaMixture> load_mixture_bundle(const std::filesystem::path& path) {
  return parse_mixture_bundle(read_file(path), path.string());
}

inline Json mixture_bundle_to_json(const std::map<ArgumentId, BetaMixture>& bundle) {
  Json args = Json::object();
  for (const auto& [id, m] : bundle) {
    Json comps = Json::array();
    for (std::size_t c = 0; c < m.size(); ++c)
      comps.push_back({{"alpha", m.components()[c].alpha}, {"beta", m.components()[c].beta}, {"weight", m.weights()[c]}});
    args[id] = comps;
  }
  return Json{{"arguments", args}};
}

/// Mixtures in graph order. Arguments without a fitted model get the uniform
/// B(1,1); their ids are appended to `missing` when given.
inline std::vector<BetaMixture> mixtures_for(const ArgumentGraph& g, const std::map<ArgumentId, BetaMixture>& bundle,
                                            std::vector<ArgumentId>* missing = nullptr) {
  std::vector<BetaMixture> out(g.size());
  for (ArgIndex a = 0; a < g.size(); ++a) {
    auto it = bundle.find(g.id(a));
    if (it != bundle.end()) out[a] = it->second;
    else if (missing) missing->push_back(g.id(a));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Tabular inputs

namespace detail {

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

struct CsvRow {
  int line = 0;
  std::vector<std::string> cells;
};

/// Comma separated, no quoting. Blank lines and '#' comments are skipped.
inline std::vector<CsvRow> read_csv(const std::string& text) {
  std::vector<CsvRow> rows;
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    auto t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    CsvRow row{n, {}};
    std::size_t start = 0;
    while (true) {
      auto comma = t.find(',', start);
      row.cells.push_back(trim(t.substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline double to_number(const std::string& s, const std::string& source, int line, const std::string& what) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw FormatError(source, line, what + " '" + s + "' is not a number");
  }
}

inline bool looks_numeric(const std::string& s) {
  try {
    std::size_t used = 0;
    std::stod(s, &used);
    return used == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace detail

/// Rows (argument-id, participant-id, raw-slider-value); an optional header
/// row is recognised by a non-numeric third cell. Returns beliefs in [0,1]
/// per argument, in file order.
inline std::map<ArgumentId, std::vector<double>> parse_belief_dataset(const std::string& text,
                                                                      const std::string& source = "<beliefs>") {
  std::map<ArgumentId, std::vector<double>> out;
  auto rows = detail::read_csv(text);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.cells.size() != 3) throw FormatError(source, r.line, "expected 3 columns");
    if (i == 0 && !detail::looks_numeric(r.cells[2])) continue;
    const double raw = detail::to_number(r.cells[2], source, r.line, "slider value");
    try {
      out[r.cells[0]].push_back(slider_to_belief(raw));
    } catch (const DomainError& e) {
      throw FormatError(source, r.line, e.what());
    }
  }
  return out;
}

/// Rows (participant-id, concern, rank); rank 1 is most preferred.
inline std::map<std::string, PreferenceRelation> parse_rankings(const std::string& text,
                                                                 const std::string& source = "<rankings>") {
  std::map<std::string, std::vector<std::pair<double, ConcernId>>> raw;
  std::map<std::string, int> first_line;
  auto rows = detail::read_csv(text);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.cells.size() != 3) throw FormatError(source, r.line, "expected 3 columns");
    if (i == 0 && !detail::looks_numeric(r.cells[2])) continue;
    const double rank = detail::to_number(r.cells[2], source, r.line, "rank");
    auto& list = raw[r.cells[0]];
    first_line.emplace(r.cells[0], r.line);
    for (const auto& [k, c] : list) {
      if (c == r.cells[1]) throw FormatError(source, r.line, "concern '" + c + "' ranked twice by " + r.cells[0]);
      if (k == rank) throw FormatError(source, r.line, "rank " + r.cells[2] + " used twice by " + r.cells[0]);
    }
    list.emplace_back(rank, r.cells[1]);
  }
  std::map<std::string, PreferenceRelation> out;
  for (auto& [p, list] : raw) {
    std::sort(list.begin(), list.end());
    std::vector<ConcernId> order;
    for (auto& [k, c] : list) order.push_back(c);
    out.emplace(p, PreferenceRelation(std::move(order)));
  }
  return out;
}

/// Header row naming columns: participant-id plus any of the profile features.
inline std::map<std::string, UserProfile> parse_profiles(const std::string& text, const std::string& source = "<profiles>") {
  auto rows = detail::read_csv(text);
  std::map<std::string, UserProfile> out;
  if (rows.empty()) return out;
  const auto& header = rows.front();
  std::vector<int> column(header.cells.size(), -1);
  int id_col = -1;
  for (std::size_t c = 0; c < header.cells.size(); ++c) {
    const auto& name = header.cells[c];
    if (name == "participant-id" || name == "participant") {
      id_col = static_cast<int>(c);
      continue;
    }
    try {
      column[c] = static_cast<int>(UserProfile::feature_index(name));
    } catch (const LookupError& e) {
      throw FormatError(source, header.line, e.what());
    }
  }
  if (id_col < 0) throw FormatError(source, header.line, "missing participant-id column");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.cells.size() != header.cells.size()) throw FormatError(source, r.line, "column count differs from the header");
    UserProfile p;
    for (std::size_t c = 0; c < r.cells.size(); ++c)
      if (column[c] >= 0) p.feature(static_cast<std::size_t>(column[c])) = detail::to_number(r.cells[c], source, r.line, header.cells[c]);
    try {
      p.validate();
    } catch (const DomainError& e) {
      throw FormatError(source, r.line, e.what());
    }
    if (!out.emplace(r.cells[static_cast<std::size_t>(id_col)], p).second)
      throw FormatError(source, r.line, "duplicate participant '" + r.cells[static_cast<std::size_t>(id_col)] + "'");
  }
  return out;
}

/// Flat object of feature name to number; unknown keys are rejected.
inline UserProfile profile_from_json(const Json& j) {
  UserProfile p;
  if (j.is_null()) return p;
  if (!j.is_object()) throw DomainError("profile must be an object");
  for (const auto& [k, v] : j.items()) {
    if (!v.is_number()) throw DomainError("profile field '" + k + "' must be a number");
    p.feature(UserProfile::feature_index(k)) = v.get<double>();
  }
  p.validate();
  return p;
}

inline Json profile_to_json(const UserProfile& p) {
  Json j = Json::object();
  const auto f = p.features();
  for (std::size_t i = 0; i < UserProfile::feature_count; ++i) j[std::string(UserProfile::feature_names[i])] = f[i];
  return j;
}

// ---------------------------------------------------------------------------
// Tree bundles

namespace detail {

inline std::uint32_t read_tree_node(const YamlDoc& doc, const YAML::Node& n, std::vector<PreferenceTree::Node>& out,
                                    int depth) {
  if (depth > 64) doc.fail(n, "tree too deep");
  if (!n.IsMap()) doc.fail(n, "tree node must be an object");
  const auto self = static_cast<std::uint32_t>(out.size());
  out.emplace_back();
  if (auto r = n["leafRatio"]) {
    const double v = doc.num(r, "leafRatio");
    if (!(v >= 0.0 && v <= 1.0)) doc.fail(r, "leafRatio outside [0,1]");
    out[self].ratio = v;
    return self;
  }
  const auto fname = doc.str(doc.field(n, "feature"), "feature");
  try {
    out[self].feature = static_cast<int>(UserProfile::feature_index(fname));
  } catch (const LookupError& e) {
    doc.fail(n["feature"], e.what());
  }
  out[self].threshold = doc.num(doc.field(n, "threshold"), "threshold");
  if (!std::isfinite(out[self].threshold)) doc.fail(n["threshold"], "threshold must be finite");
  const auto l = read_tree_node(doc, doc.field(n, "left"), out, depth + 1);
  out[self].left = l;
  const auto r = read_tree_node(doc, doc.field(n, "right"), out, depth + 1);
  out[self].right = r;
  return self;
}

inline Json tree_node_to_json(const PreferenceTree& t, std::uint32_t i) {
  const auto& n = t.nodes()[i];
  if (n.feature < 0) return Json{{"leafRatio", n.ratio}};
  return Json{{"feature", std::string(UserProfile::feature_names[static_cast<std::size_t>(n.feature)])},
              {"threshold", n.threshold},
              {"left", tree_node_to_json(t, n.left)},
              {"right", tree_node_to_json(t, n.right)}};
}

}  // namespace detail

/// {"trees": [{"first", "second", "tree": node}]}; node is either
/// {"leafRatio"} or {"feature", "threshold", "left", "right"}, with `left`
/// taken when the feature is below the threshold. Ratios are the share of
/// participants preferring `first`.
inline TreeBundle parse_tree_bundle(const std::string& text, const std::string& source = "<trees>") {
  detail::YamlDoc doc{source};
  const auto root = doc.parse(text);
  TreeBundle b;
  for (const auto& e : doc.seq(doc.field(root, "trees"), "trees")) {
    auto first = doc.str(doc.field(e, "first"), "first");
    auto second = doc.str(doc.field(e, "second"), "second");
    if (first == second) doc.fail(e, "a tree needs two distinct concerns");
    if (b.find(first, second)) doc.fail(e, "duplicate tree for (" + first + ", " + second + ")");
    std::vector<PreferenceTree::Node> nodes;
    detail::read_tree_node(doc, doc.field(e, "tree"), nodes, 0);
    b.add(std::move(first), std::move(second), PreferenceTree(std::move(nodes)));
  }
  return b;
}

inline TreeBundle load_tree_bundle(const std::filesystem::path& path) { return parse_tree_bundle(read_file(path), path.string()); }

inline Json tree_bundle_to_json(const TreeBundle& b) {
  Json trees = Json::array();
  for (const auto& [pair, t] : b.trees())
    trees.push_back({{"first", pair.first}, {"second", pair.second}, {"tree", detail::tree_node_to_json(t, 0)}});
  return Json{{"trees", trees}};
}

// ---------------------------------------------------------------------------
// Trial corpora

inline Json record_to_json(const TrialRecord& r) {
  Json j{{"strategy", r.strategy},
         {"graph", r.graph},
         {"before", r.before},
         {"after", r.after},
         {"orientation", r.orientation},
         {"complete", r.structure.complete},
         {"linear", r.structure.linear}};
  if (!std::isnan(r.reward)) j["reward"] = r.reward;
  if (r.dialogue) j["transcript"] = transcript_to_json(*r.dialogue);
  return j;
}

/// Structure flags come from "complete"/"linear" when present, otherwise from
/// classifying the transcript against `graphs[record.graph]`.
inline TrialRecord record_from_json(const Json& j, const std::map<std::string, std::shared_ptr<const ArgumentGraph>>& graphs,
                                    const std::string& source = "<corpus>") {
  TrialRecord r;
  auto num = [&](const char* k) {
    const auto& v = detail::jfield(j, k, source);
    if (!v.is_number()) detail::bad_json(source, std::string(k) + " must be a number");
    return v.get<double>();
  };
  r.strategy = j.value("strategy", std::string());
  r.graph = j.value("graph", std::string());
  r.before = num("before");
  r.after = num("after");
  r.orientation = j.value("orientation", 1);
  if (j.contains("reward") && j.at("reward").is_number()) r.reward = j.at("reward").get<double>();
  auto g = graphs.find(r.graph);
  if (j.contains("transcript") && g != graphs.end()) r.dialogue = transcript_from_json(g->second, j.at("transcript"), source);
  if (j.contains("complete") && j.contains("linear")) {
    r.structure.complete = j.at("complete").get<bool>();
    r.structure.linear = j.at("linear").get<bool>();
  } else if (r.dialogue) {
    r.structure = classify(*r.dialogue);
  } else {
    detail::bad_json(source, "record has neither structure flags nor a resolvable transcript");
  }
  r.validate();
  return r;
}

inline Json corpus_to_json(const std::vector<TrialRecord>& records) {
  Json rs = Json::array();
  for (const auto& r : records) rs.push_back(record_to_json(r));
  return Json{{"v", wire_version}, {"records", rs}};
}

inline std::vector<TrialRecord> corpus_from_json(const Json& j,
                                                 const std::map<std::string, std::shared_ptr<const ArgumentGraph>>& graphs,
                                                 const std::string& source = "<corpus>") {
  std::vector<TrialRecord> out;
  const auto& rs = detail::jfield(j, "records", source);
  if (!rs.is_array()) detail::bad_json(source, "records must be a list");
  for (std::size_t i = 0; i < rs.size(); ++i) out.push_back(record_from_json(rs[i], graphs, source + " record " + std::to_string(i)));
  return out;
}

inline Json analytics_summary(const std::vector<TrialRecord>& records, const std::string& primary_graph) {
  const auto t = structural_table(records, primary_graph);
  Json rows = Json::array();
  for (const auto& r : t.rows)
    rows.push_back({{"complete", r.complete}, {"linear", r.linear}, {"primary_graph", r.primary_graph}, {"count", r.count}, {"percent", r.percent}});
  Json types = Json::array();
  for (const auto& b : breakdown(records, primary_graph)) {
    Json bins = Json::object();
    for (std::size_t i = 0; i < 5; ++i) bins[change_bin_labels[i]] = b.bins.percents[i];
    Json row{{"type", b.label}, {"count", b.count}, {"population_percent", b.population_percent}, {"bins", bins}};
    if (b.averages) {
      row["average_change"] = detail::round_to(b.averages->mean, 3);
      row["average_absolute_change"] = detail::round_to(b.averages->mean_absolute, 3);
    } else {
      row["average_change"] = nullptr;
      row["average_absolute_change"] = nullptr;
    }
    types.push_back(row);
  }
  Json changes = Json::array();
  for (const auto& r : records) changes.push_back(r.change());
  return Json{{"v", wire_version},
              {"total", t.total},
              {"structure", {{"rows", rows},
                             {"complete", t.complete},
                             {"linear", t.linear},
                             {"primary_graph", t.primary_graph},
                             {"complete_percent", t.complete_percent},
                             {"linear_percent", t.linear_percent},
                             {"primary_graph_percent", t.primary_graph_percent}}},
              {"types", types},
              {"changes", changes}};
}

}  // namespace aps
