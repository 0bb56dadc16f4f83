#pragma once

#include <aps/argument_graph.hpp>
#include <aps/belief_model.hpp>
#include <aps/error.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace aps {

/// One participant's linear order over concerns, most preferred first.
class PreferenceRelation {
public:
  PreferenceRelation() = default;
  explicit PreferenceRelation(std::vector<ConcernId> order) : order_(std::move(order)) {
    auto sorted = order_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw DomainError("concern ranked twice");
  }

  const std::vector<ConcernId>& order() const noexcept { return order_; }

  std::optional<std::size_t> rank(std::string_view c) const {
    for (std::size_t i = 0; i < order_.size(); ++i)
      if (order_[i] == c) return i;
    return std::nullopt;
  }

  bool ranks(std::string_view c) const { return rank(c).has_value(); }

  /// c ⪯ c_prime: c_prime is ranked at least as high as c.
  bool weakly_prefers(std::string_view c_prime, std::string_view c) const {
    auto rp = rank(c_prime), r = rank(c);
    if (!rp || !r) throw LookupError("concern not ranked by this participant");
    return *rp <= *r;
  }

private:
  std::vector<ConcernId> order_;
};

/// Fraction of participants for whom c ⪯ c_prime. Participants that rank
/// neither or only one of the two concerns are skipped.
inline double pref_score_population(std::span<const PreferenceRelation> rankings, std::string_view c_prime,
                                    std::string_view c) {
  if (rankings.empty()) throw DomainError("empty population");
  std::size_t n = 0, yes = 0;
  for (const auto& r : rankings) {
    if (!r.ranks(c_prime) || !r.ranks(c)) continue;
    ++n;
    if (r.weakly_prefers(c_prime, c)) ++yes;
  }
  if (n == 0) throw LookupError("no participant ranks both concerns");
  return static_cast<double>(yes) / static_cast<double>(n);
}

// ---------------------------------------------------------------------------
// Profiles

struct UserProfile {
  // TIPI scale, 1..7
  double openness = 4.0;
  double conscientiousness = 4.0;
  double extroversion = 4.0;
  double agreeableness = 4.0;
  double neuroticism = 4.0;
  double age = 30.0;
  double sex = 0.0;  // indicator
  double student = 0.0;
  double children = 0.0;
  double children_in_school = 0.0;

  static constexpr std::size_t feature_count = 10;
  static constexpr std::array<std::string_view, feature_count> feature_names{
      "O", "C", "E", "A", "N", "age", "sex", "student", "children", "children_in_school"};

  std::array<double, feature_count> features() const {
    return {openness, conscientiousness, extroversion, agreeableness, neuroticism,
            age,      sex,               student,      children,      children_in_school};
  }

  double& feature(std::size_t i) {
    switch (i) {
      case 0: return openness;
      case 1: return conscientiousness;
      case 2: return extroversion;
      case 3: return agreeableness;
      case 4: return neuroticism;
      case 5: return age;
      case 6: return sex;
      case 7: return student;
      case 8: return children;
      case 9: return children_in_school;
    }
    throw LookupError("feature index out of range");
  }

  static std::size_t feature_index(std::string_view name) {
    for (std::size_t i = 0; i < feature_count; ++i)
      if (feature_names[i] == name) return i;
    throw LookupError("unknown profile feature '" + std::string(name) + "'");
  }

  void validate() const {
    for (double v : {openness, conscientiousness, extroversion, agreeableness, neuroticism})
      if (!(v >= 1.0 && v <= 7.0)) throw DomainError("personality score outside 1..7");
    for (double v : features())
      if (!std::isfinite(v)) throw DomainError("non-finite profile value");
  }
};

// ---------------------------------------------------------------------------
// Preference trees

/// Binary threshold tree for one ordered concern pair (first, second). Leaves
/// hold the fraction of participants preferring `first`.
class PreferenceTree {
public:
  struct Node {
    int feature = -1;  // -1 for a leaf
    double threshold = 0.0;
    std::uint32_t left = 0, right = 0;  // left when value < threshold
    double ratio = 0.5;
    std::uint32_t samples = 0;
  };

  PreferenceTree() : nodes_{Node{}} {}
  explicit PreferenceTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) { check(); }

  static PreferenceTree leaf(double ratio) { return PreferenceTree({Node{-1, 0.0, 0, 0, ratio, 0}}); }

  const std::vector<Node>& nodes() const noexcept { return nodes_; }

  double predict(const UserProfile& p) const {
    const auto f = p.features();
    std::uint32_t at = 0;
    while (nodes_[at].feature >= 0) at = f[nodes_[at].feature] < nodes_[at].threshold ? nodes_[at].left : nodes_[at].right;
    return nodes_[at].ratio;
  }

  std::size_t depth() const { return depth_from(0); }

  std::size_t leaf_count() const {
    return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.feature < 0; }));
  }

private:
  std::size_t depth_from(std::uint32_t i) const {
    const auto& n = nodes_[i];
    if (n.feature < 0) return 0;
    return 1 + std::max(depth_from(n.left), depth_from(n.right));
  }

  void check() const {
    if (nodes_.empty()) throw DomainError("empty preference tree");
    std::vector<int> seen(nodes_.size(), 0);
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const auto& n = nodes_[i];
      if (n.feature < 0) {
        if (!(n.ratio >= 0.0 && n.ratio <= 1.0)) throw DomainError("leaf ratio outside [0,1]");
        continue;
      }
      if (n.feature >= static_cast<int>(UserProfile::feature_count)) throw DomainError("bad feature index");
      if (!std::isfinite(n.threshold)) throw DomainError("non-finite threshold");
      for (auto c : {n.left, n.right}) {
        if (c <= i || c >= nodes_.size()) throw DomainError("tree children must follow their parent");
        if (++seen[c] > 1) throw DomainError("tree node reached twice");
      }
    }
  }

  std::vector<Node> nodes_;
};

struct TreeSample {
  UserProfile profile;
  bool first_preferred = false;
};

struct TreeTrainingConfig {
  std::vector<std::size_t> depth_grid{1, 2, 3, 4};
  std::vector<std::size_t> min_leaf_grid{1, 5, 10};
  std::size_t folds = 5;
};

namespace detail {

inline std::uint32_t grow_tree(std::vector<PreferenceTree::Node>& nodes, std::span<const TreeSample> data,
                               std::vector<std::size_t> idx, std::size_t depth_left, std::size_t min_leaf) {
  const auto self = static_cast<std::uint32_t>(nodes.size());
  std::size_t pos = 0;
  for (auto i : idx) pos += data[i].first_preferred ? 1 : 0;
  PreferenceTree::Node node;
  node.samples = static_cast<std::uint32_t>(idx.size());
  node.ratio = idx.empty() ? 0.5 : static_cast<double>(pos) / static_cast<double>(idx.size());
  nodes.push_back(node);
  const std::size_t errors = std::min(pos, idx.size() - pos);
  if (depth_left == 0 || errors == 0 || idx.size() < 2 * min_leaf) return self;

  std::size_t best_err = errors;
  int best_f = -1;
  double best_t = 0.0;
  std::vector<std::pair<double, bool>> col(idx.size());
  for (std::size_t f = 0; f < UserProfile::feature_count; ++f) {
    for (std::size_t k = 0; k < idx.size(); ++k)
      col[k] = {data[idx[k]].profile.features()[f], data[idx[k]].first_preferred};
    std::sort(col.begin(), col.end(), [](auto& a, auto& b) { return a.first < b.first; });
    std::size_t left_pos = 0;
    for (std::size_t k = 0; k + 1 < col.size(); ++k) {
      left_pos += col[k].second ? 1 : 0;
      if (col[k].first == col[k + 1].first) continue;
      const std::size_t nl = k + 1, nr = col.size() - nl;
      if (nl < min_leaf || nr < min_leaf) continue;
      const std::size_t right_pos = pos - left_pos;
      const std::size_t err = std::min(left_pos, nl - left_pos) + std::min(right_pos, nr - right_pos);
      if (err < best_err) {
        best_err = err;
        best_f = static_cast<int>(f);
        best_t = 0.5 * (col[k].first + col[k + 1].first);
      }
    }
  }
  if (best_f < 0) return self;
  std::vector<std::size_t> l, r;
  for (auto i : idx) (data[i].profile.features()[best_f] < best_t ? l : r).push_back(i);
  nodes[self].feature = best_f;
  nodes[self].threshold = best_t;
  const auto li = grow_tree(nodes, data, std::move(l), depth_left - 1, min_leaf);
  nodes[self].left = li;
  const auto ri = grow_tree(nodes, data, std::move(r), depth_left - 1, min_leaf);
  nodes[self].right = ri;
  return self;
}

inline PreferenceTree fit_tree(std::span<const TreeSample> data, std::vector<std::size_t> idx, std::size_t depth,
                               std::size_t min_leaf) {
  std::vector<PreferenceTree::Node> nodes;
  grow_tree(nodes, data, std::move(idx), depth, std::max<std::size_t>(1, min_leaf));
  return PreferenceTree(std::move(nodes));
}

}  // namespace detail

/// Fraction of samples whose preferred concern differs from the tree's
/// majority prediction.
inline double hamming_loss(const PreferenceTree& tree, std::span<const TreeSample> data) {
  if (data.empty()) return 0.0;
  std::size_t wrong = 0;
  for (const auto& s : data)
    if ((tree.predict(s.profile) >= 0.5) != s.first_preferred) ++wrong;
  return static_cast<double>(wrong) / static_cast<double>(data.size());
}

struct TreeTrainingResult {
  PreferenceTree tree;
  std::size_t depth = 0;
  std::size_t min_leaf = 1;
  double cv_loss = 0.0;
};

/// Greedy misclassification splits; (depth, min leaf) picked by k-fold
/// cross-validated Hamming loss, ties to the smaller depth then smaller
/// min leaf. Fold membership is index modulo k.
inline TreeTrainingResult train_preference_tree(std::span<const TreeSample> data,
                                                const TreeTrainingConfig& config = {}) {
  if (data.empty()) throw DomainError("no training samples");
  if (config.depth_grid.empty() || config.min_leaf_grid.empty()) throw DomainError("empty hyperparameter grid");
  auto depths = config.depth_grid;
  auto leaves = config.min_leaf_grid;
  std::sort(depths.begin(), depths.end());
  std::sort(leaves.begin(), leaves.end());
  const std::size_t folds = std::clamp<std::size_t>(config.folds, 2, std::max<std::size_t>(2, data.size()));

  TreeTrainingResult best;
  best.cv_loss = std::numeric_limits<double>::infinity();
  for (auto depth : depths) {
    for (auto leaf : leaves) {
      double loss = 0.0;
      if (data.size() >= 2) {
        std::size_t counted = 0;
        for (std::size_t f = 0; f < folds; ++f) {
          std::vector<std::size_t> train;
          std::vector<TreeSample> held;
          for (std::size_t i = 0; i < data.size(); ++i) {
            if (i % folds == f) held.push_back(data[i]);
            else train.push_back(i);
          }
          if (held.empty() || train.empty()) continue;
          auto t = detail::fit_tree(data, train, depth, leaf);
          loss += hamming_loss(t, held) * static_cast<double>(held.size());
          counted += held.size();
        }
        loss = counted ? loss / static_cast<double>(counted) : 0.0;
      }
      if (loss < best.cv_loss - 1e-12) {
        best.cv_loss = loss;
        best.depth = depth;
        best.min_leaf = leaf;
      }
    }
  }
  std::vector<std::size_t> all(data.size());
  std::iota(all.begin(), all.end(), 0);
  best.tree = detail::fit_tree(data, all, best.depth, best.min_leaf);
  return best;
}

/// Trees keyed by ordered concern pair.
class TreeBundle {
public:
  void add(ConcernId first, ConcernId second, PreferenceTree tree) {
    if (first == second) throw DomainError("tree pair needs two distinct concerns");
    trees_[{std::move(first), std::move(second)}] = std::move(tree);
  }

  const PreferenceTree* find(std::string_view first, std::string_view second) const {
    auto it = trees_.find({std::string(first), std::string(second)});
    return it == trees_.end() ? nullptr : &it->second;
  }

  const std::map<std::pair<ConcernId, ConcernId>, PreferenceTree>& trees() const noexcept { return trees_; }
  std::size_t size() const noexcept { return trees_.size(); }

private:
  std::map<std::pair<ConcernId, ConcernId>, PreferenceTree> trees_;
};

/// Probability that c_prime is preferred to c for this profile. Falls back to
/// the reversed pair, then the population, then 0.5.
inline double predict_pref_score(const TreeBundle& trees, const UserProfile& profile, std::string_view c_prime,
                                 std::string_view c,
                                 std::span<const PreferenceRelation> population = {}) {
  if (c_prime == c) return 1.0;
  if (const auto* t = trees.find(c_prime, c)) return t->predict(profile);
  if (const auto* t = trees.find(c, c_prime)) return 1.0 - t->predict(profile);
  if (!population.empty()) {
    try {
      return pref_score_population(population, c_prime, c);
    } catch (const LookupError&) {
    }
  }
  return 0.5;
}

struct ProfiledRanking {
  UserProfile profile;
  PreferenceRelation ranking;
};

/// One tree per unordered pair of concerns (first < second), trained on the
/// participants that rank both.
inline TreeBundle train_tree_bundle(std::span<const ProfiledRanking> data, const TreeTrainingConfig& config = {}) {
  std::vector<ConcernId> vocab;
  for (const auto& d : data) vocab.insert(vocab.end(), d.ranking.order().begin(), d.ranking.order().end());
  std::sort(vocab.begin(), vocab.end());
  vocab.erase(std::unique(vocab.begin(), vocab.end()), vocab.end());
  TreeBundle bundle;
  for (std::size_t i = 0; i < vocab.size(); ++i)
    for (std::size_t j = i + 1; j < vocab.size(); ++j) {
      std::vector<TreeSample> samples;
      for (const auto& d : data)
        if (d.ranking.ranks(vocab[i]) && d.ranking.ranks(vocab[j]))
          samples.push_back({d.profile, d.ranking.weakly_prefers(vocab[i], vocab[j])});
      if (samples.empty()) continue;
      bundle.add(vocab[i], vocab[j], train_preference_tree(samples, config).tree);
    }
  return bundle;
}

// ---------------------------------------------------------------------------
// Concern context

using ConcernIndex = std::uint16_t;

/// Concern assignment of one graph plus a dense PrefScore matrix.
/// pref(c_prime, c) is the probability that c ⪯ c_prime.
class ConcernContext {
public:
  ConcernContext() = default;

  /// `vocabulary` must contain every concern used by the graph.
  ConcernContext(const ArgumentGraph& graph, std::vector<ConcernId> vocabulary, std::vector<double> matrix)
      : vocab_(std::move(vocabulary)), matrix_(std::move(matrix)) {
    const auto k = vocab_.size();
    if (matrix_.size() != k * k) throw DomainError("preference matrix has the wrong size");
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) {
        double v = matrix_[i * k + j];
        if (!(v >= 0.0 && v <= 1.0)) throw DomainError("preference score outside [0,1]");
      }
    by_arg_.resize(graph.size());
    for (ArgIndex a = 0; a < graph.size(); ++a) {
      for (const auto& c : graph.argument(a).concerns) by_arg_[a].push_back(index_of(c));
      std::sort(by_arg_[a].begin(), by_arg_[a].end());
      if (by_arg_[a].empty()) warnings_.push_back("argument " + graph.id(a) + " has no concern");
    }
  }

  static std::vector<ConcernId> graph_concerns(const ArgumentGraph& g) {
    std::vector<ConcernId> out;
    for (const auto& a : g.arguments()) out.insert(out.end(), a.concerns.begin(), a.concerns.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  /// Population scores; pairs nobody ranked get 0.5.
  static ConcernContext from_population(const ArgumentGraph& g, std::span<const PreferenceRelation> rankings) {
    auto vocab = graph_concerns(g);
    const auto k = vocab.size();
    std::vector<double> m(k * k, 0.5);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) {
        if (i == j) {
          m[i * k + j] = 1.0;
          continue;
        }
        try {
          m[i * k + j] = pref_score_population(rankings, vocab[i], vocab[j]);
        } catch (const LookupError&) {
        } catch (const DomainError&) {
        }
      }
    return ConcernContext(g, std::move(vocab), std::move(m));
  }

  static ConcernContext from_trees(const ArgumentGraph& g, const TreeBundle& trees, const UserProfile& profile,
                                   std::span<const PreferenceRelation> population = {}) {
    auto vocab = graph_concerns(g);
    const auto k = vocab.size();
    std::vector<double> m(k * k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) m[i * k + j] = predict_pref_score(trees, profile, vocab[i], vocab[j], population);
    return ConcernContext(g, std::move(vocab), std::move(m));
  }

  /// Explicit scores for ordered pairs (c_prime, c); the diagonal is 1 and
  /// unlisted pairs take `fallback`.
  static ConcernContext from_scores(const ArgumentGraph& g,
                                    const std::map<std::pair<ConcernId, ConcernId>, double>& scores,
                                    double fallback = 0.5) {
    auto vocab = graph_concerns(g);
    const auto k = vocab.size();
    std::vector<double> m(k * k, fallback);
    for (std::size_t i = 0; i < k; ++i) m[i * k + i] = 1.0;
    for (const auto& [pair, v] : scores) {
      auto i = std::lower_bound(vocab.begin(), vocab.end(), pair.first) - vocab.begin();
      auto j = std::lower_bound(vocab.begin(), vocab.end(), pair.second) - vocab.begin();
      if (static_cast<std::size_t>(i) == k || vocab[i] != pair.first || static_cast<std::size_t>(j) == k ||
          vocab[j] != pair.second)
        throw LookupError("concern pair (" + pair.first + ", " + pair.second + ") not used by the graph");
      m[i * k + j] = v;
    }
    return ConcernContext(g, std::move(vocab), std::move(m));
  }

  const std::vector<ConcernId>& vocabulary() const noexcept { return vocab_; }
  std::size_t concern_count() const noexcept { return vocab_.size(); }

  ConcernIndex index_of(std::string_view c) const {
    for (std::size_t i = 0; i < vocab_.size(); ++i)
      if (vocab_[i] == c) return static_cast<ConcernIndex>(i);
    throw LookupError("unknown concern '" + std::string(c) + "'");
  }

  std::span<const ConcernIndex> concerns(ArgIndex a) const { return by_arg_.at(a); }

  double pref(ConcernIndex c_prime, ConcernIndex c) const { return matrix_.at(c_prime * vocab_.size() + c); }

  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

private:
  std::vector<ConcernId> vocab_;
  std::vector<double> matrix_;
  std::vector<std::vector<ConcernIndex>> by_arg_;
  std::vector<std::string> warnings_;
};

}  // namespace aps
