#pragma once

#include <aps/dialogue.hpp>
#include <aps/error.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace aps {

/// One finished dialogue with the participant's belief in the goal statement
/// before and after, on the -3..3 slider scale.
struct TrialRecord {
  std::string strategy;
  std::string graph;
  double before = 0.0;
  double after = 0.0;
  /// +1 when a rise of the slider value moves toward the persuasion goal, -1 otherwise.
  int orientation = 1;
  StructureFlags structure;
  double reward = std::numeric_limits<double>::quiet_NaN();
  std::optional<Dialogue> dialogue;

  double raw_change() const { return after - before; }
  double change() const { return orientation * raw_change(); }

  void validate() const {
    for (double v : {before, after})
      if (!(v >= -3.0 && v <= 3.0)) throw DomainError("belief outside [-3,3]");
    if (before == 0.0) throw DomainError("belief before the dialogue may not be 0");
    if (orientation != 1 && orientation != -1) throw DomainError("orientation must be +1 or -1");
  }
};

/// Record for a terminated dialogue; structure flags are computed from it.
inline TrialRecord make_record(Dialogue d, std::string strategy, std::string graph, double before, double after,
                               int orientation = 1) {
  TrialRecord r;
  r.strategy = std::move(strategy);
  r.graph = std::move(graph);
  r.before = before;
  r.after = after;
  r.orientation = orientation;
  r.structure = classify(d);
  r.dialogue = std::move(d);
  r.validate();
  return r;
}

namespace detail {

inline double round_to(double v, int places) {
  const double s = std::pow(10.0, places);
  return std::round(v * s) / s;
}

inline double percent(std::size_t part, std::size_t whole) {
  return whole ? round_to(100.0 * static_cast<double>(part) / static_cast<double>(whole), 2) : 0.0;
}

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

inline std::string pad(std::string s, std::size_t width, bool right = false) {
  if (s.size() >= width) return s;
  return right ? std::string(width - s.size(), ' ') + s : s + std::string(width - s.size(), ' ');
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Structure

struct StructuralRow {
  bool complete = false, linear = false, primary_graph = false;
  std::size_t count = 0;
  double percent = 0.0;
};

struct StructuralTable {
  std::vector<StructuralRow> rows;  // all eight flag combinations, most frequent first
  std::size_t total = 0;
  std::size_t complete = 0, linear = 0, primary_graph = 0;
  double complete_percent = 0.0, linear_percent = 0.0, primary_graph_percent = 0.0;
};

/// Cross-tabulates complete x linear x (graph == primary_graph). Ties in count
/// keep a fixed row order.
inline StructuralTable structural_table(const std::vector<TrialRecord>& records, const std::string& primary_graph) {
  static constexpr std::array<std::array<bool, 3>, 8> order{{{true, true, true},
                                                            {true, false, true},
                                                            {true, true, false},
                                                            {false, true, true},
                                                            {true, false, false},
                                                            {false, false, true},
                                                            {false, false, false},
                                                            {false, true, false}}};
  StructuralTable t;
  for (const auto& f : order) t.rows.push_back({f[0], f[1], f[2], 0, 0.0});
  for (const auto& r : records) {
    const bool p = r.graph == primary_graph;
    for (auto& row : t.rows)
      if (row.complete == r.structure.complete && row.linear == r.structure.linear && row.primary_graph == p) ++row.count;
    t.complete += r.structure.complete;
    t.linear += r.structure.linear;
    t.primary_graph += p;
  }
  t.total = records.size();
  for (auto& row : t.rows) row.percent = detail::percent(row.count, t.total);
  std::stable_sort(t.rows.begin(), t.rows.end(), [](const auto& a, const auto& b) { return a.count > b.count; });
  t.complete_percent = detail::percent(t.complete, t.total);
  t.linear_percent = detail::percent(t.linear, t.total);
  t.primary_graph_percent = detail::percent(t.primary_graph, t.total);
  return t;
}

// ---------------------------------------------------------------------------
// Belief change

enum class ChangeBin : std::uint8_t { VeryPositive, Positive, None, Negative, VeryNegative };

inline constexpr std::array<const char*, 5> change_bin_labels{"++", "+", "x", "-", "--"};

/// [1,3] (0,1) 0 (-1,0) [-3,-1]. Changes are rounded to 1e-9 first so that
/// slider arithmetic like 2.46 - 2.4 does not land between bins.
inline ChangeBin change_bin(double change) {
  const double c = detail::round_to(change, 9);
  if (c >= 1.0) return ChangeBin::VeryPositive;
  if (c > 0.0) return ChangeBin::Positive;
  if (c == 0.0) return ChangeBin::None;
  if (c > -1.0) return ChangeBin::Negative;
  return ChangeBin::VeryNegative;
}

struct BinDistribution {
  std::array<std::size_t, 5> counts{};
  std::array<double, 5> percents{};
  std::size_t total = 0;
};

inline BinDistribution change_bins(const std::vector<TrialRecord>& records) {
  BinDistribution d;
  for (const auto& r : records) ++d.counts[static_cast<std::size_t>(change_bin(r.change()))];
  d.total = records.size();
  for (std::size_t i = 0; i < 5; ++i) d.percents[i] = detail::percent(d.counts[i], d.total);
  return d;
}

struct AverageChange {
  double mean = 0.0;
  double mean_absolute = 0.0;
};

inline AverageChange average_changes(const std::vector<TrialRecord>& records) {
  if (records.empty()) throw DomainError("average change of an empty record set is undefined");
  AverageChange a;
  for (const auto& r : records) {
    a.mean += r.change();
    a.mean_absolute += std::abs(r.change());
  }
  a.mean /= static_cast<double>(records.size());
  a.mean_absolute /= static_cast<double>(records.size());
  return a;
}

// ---------------------------------------------------------------------------
// Breakdown by dialogue type

struct BreakdownRow {
  std::string label;
  double population_percent = 0.0;
  BinDistribution bins;
  std::optional<AverageChange> averages;  // empty subsets have none
  std::size_t count = 0;
};

inline std::vector<BreakdownRow> breakdown(const std::vector<TrialRecord>& records, const std::string& primary_graph,
                                           const std::string& primary_label = "Primary graph",
                                           const std::string& other_label = "Other graph") {
  struct Filter {
    std::string label;
    bool (*keep)(const TrialRecord&, const std::string&);
  };
  const std::vector<Filter> filters{
      {"All", [](const TrialRecord&, const std::string&) { return true; }},
      {"Complete", [](const TrialRecord& r, const std::string&) { return r.structure.complete; }},
      {"Incomplete", [](const TrialRecord& r, const std::string&) { return !r.structure.complete; }},
      {"Linear", [](const TrialRecord& r, const std::string&) { return r.structure.linear; }},
      {"Nonlinear", [](const TrialRecord& r, const std::string&) { return !r.structure.linear; }},
      {primary_label, [](const TrialRecord& r, const std::string& g) { return r.graph == g; }},
      {other_label, [](const TrialRecord& r, const std::string& g) { return r.graph != g; }},
  };
  std::vector<BreakdownRow> out;
  for (const auto& f : filters) {
    std::vector<TrialRecord> subset;
    for (const auto& r : records)
      if (f.keep(r, primary_graph)) subset.push_back(r);
    BreakdownRow row;
    row.label = f.label;
    row.count = subset.size();
    row.population_percent = detail::percent(subset.size(), records.size());
    row.bins = change_bins(subset);
    if (!subset.empty()) row.averages = average_changes(subset);
    out.push_back(std::move(row));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Text rendering

inline std::string render_structural_table(const StructuralTable& t, const std::string& graph_column = "Primary graph") {
  auto mark = [](bool b) { return std::string(b ? "yes" : ""); };
  const std::size_t gw = std::max<std::size_t>(graph_column.size(), 5);
  std::string out = detail::pad("Complete", 10) + detail::pad("Linear", 8) + detail::pad(graph_column, gw + 2) +
                    detail::pad("Dialogues", 11, true) + detail::pad("%", 9, true) + "\n";
  for (const auto& r : t.rows)
    out += detail::pad(mark(r.complete), 10) + detail::pad(mark(r.linear), 8) + detail::pad(mark(r.primary_graph), gw + 2) +
           detail::pad(std::to_string(r.count), 11, true) + detail::pad(detail::fmt("%.2f%%", r.percent), 9, true) + "\n";
  out += detail::pad(std::to_string(t.complete), 10) + detail::pad(std::to_string(t.linear), 8) +
         detail::pad(std::to_string(t.primary_graph), gw + 2) + detail::pad(std::to_string(t.total), 11, true) + "\n";
  out += detail::pad(detail::fmt("%.2f%%", t.complete_percent), 10) + detail::pad(detail::fmt("%.2f%%", t.linear_percent), 8) +
         detail::pad(detail::fmt("%.2f%%", t.primary_graph_percent), gw + 2) + "\n";
  return out;
}

inline std::string render_change_table(const std::vector<BreakdownRow>& rows) {
  std::size_t lw = 12;
  for (const auto& r : rows) lw = std::max(lw, r.label.size() + 2);
  std::string out = detail::pad("", lw) + detail::pad("Population", 12, true);
  for (const char* l : change_bin_labels) out += detail::pad(l, 9, true);
  out += "\n" + detail::pad("", lw) + detail::pad("", 12, true);
  for (const char* l : {"[1,3]", "(0,1)", "0", "(-1,0)", "[-3,-1]"}) out += detail::pad(l, 9, true);
  out += "\n";
  for (const auto& r : rows) {
    out += detail::pad(r.label, lw) + detail::pad(detail::fmt("%.2f%%", r.population_percent), 12, true);
    for (double p : r.bins.percents) out += detail::pad(detail::fmt("%.2f%%", p), 9, true);
    out += "\n";
  }
  return out;
}

inline std::string render_average_table(const std::vector<BreakdownRow>& rows) {
  std::size_t lw = 12;
  for (const auto& r : rows) lw = std::max(lw, r.label.size() + 2);
  std::string out = detail::pad("", lw) + detail::pad("Average", 10, true) + detail::pad("Absolute", 10, true) + "\n";
  for (const auto& r : rows) {
    out += detail::pad(r.label, lw);
    if (r.averages)
      out += detail::pad(detail::fmt("%.3f", r.averages->mean), 10, true) +
             detail::pad(detail::fmt("%.3f", r.averages->mean_absolute), 10, true);
    else
      out += detail::pad("-", 10, true) + detail::pad("-", 10, true);
    out += "\n";
  }
  return out;
}

}  // namespace aps
