#pragma once

#include <aps/argument_graph.hpp>
#include <aps/error.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace aps {

using Rng = std::mt19937_64;

/// Belief in [0,1] per argument of one graph (indexed by ArgIndex). Unset
/// entries hold NaN.
class ProbabilityLabelling {
public:
  ProbabilityLabelling() = default;
  explicit ProbabilityLabelling(std::size_t size)
      : values_(size, std::numeric_limits<double>::quiet_NaN()) {}
  ProbabilityLabelling(std::initializer_list<double> values) {
    for (double v : values) check(v);
    values_.assign(values);
  }

  std::size_t size() const noexcept { return values_.size(); }

  double operator[](ArgIndex a) const { return values_.at(a); }
  bool has(ArgIndex a) const { return a < values_.size() && !std::isnan(values_[a]); }

  void set(ArgIndex a, double v) {
    check(v);
    values_.at(a) = v;
  }

  std::span<const double> values() const noexcept { return values_; }

private:
  static void check(double v) {
    if (!(v >= 0.0 && v <= 1.0)) throw DomainError("belief " + std::to_string(v) + " outside [0,1]");
  }

  std::vector<double> values_;
};

struct BetaComponent {
  double alpha = 1.0;
  double beta = 1.0;

  BetaComponent() = default;
  BetaComponent(double a, double b) : alpha(a), beta(b) {
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
      throw DomainError("beta parameters must be positive and finite");
  }

  double mean() const noexcept { return alpha / (alpha + beta); }
  double variance() const noexcept {
    const double s = alpha + beta;
    return alpha * beta / (s * s * (s + 1.0));
  }
};

inline double log_beta_function(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

/// Log density; -inf where the density is zero, +inf at a divergent endpoint.
inline double beta_log_pdf(const BetaComponent& c, double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("x = " + std::to_string(x) + " outside [0,1]");
  const double inf = std::numeric_limits<double>::infinity();
  auto endpoint = [&](double shape, double other) {
    if (shape < 1.0) return inf;
    if (shape > 1.0) return -inf;
    return -log_beta_function(1.0, other);  // density there is 1/B(1, other)
  };
  if (x == 0.0) return endpoint(c.alpha, c.beta);
  if (x == 1.0) return endpoint(c.beta, c.alpha);
  return (c.alpha - 1.0) * std::log(x) + (c.beta - 1.0) * std::log1p(-x) -
         log_beta_function(c.alpha, c.beta);
}

/// Beta density. Returns +infinity at an endpoint whose shape parameter is < 1.
inline double beta_pdf(const BetaComponent& c, double x) { return std::exp(beta_log_pdf(c, x)); }

/// Method of moments with the population variance (1/m). Requires
/// 0 < variance < mean(1 - mean).
inline BetaComponent moments_estimate(std::span<const double> samples) {
  if (samples.size() < 2) throw EstimationError("method of moments needs at least two samples");
  const double m = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double x : samples) {
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("sample outside [0,1]");
    mean += x;
  }
  mean /= m;
  double var = 0.0;
  for (double x : samples) var += (x - mean) * (x - mean);
  var /= m;
  const double bound = mean * (1.0 - mean);
  if (!(var > 1e-12) || !(var < bound))
    throw EstimationError("infeasible moments: mean " + std::to_string(mean) + ", variance " +
                          std::to_string(var));
  const double common = bound / var - 1.0;
  return BetaComponent(mean * common, (1.0 - mean) * common);
}

class BetaMixture {
public:
  BetaMixture() : components_{BetaComponent(1.0, 1.0)}, weights_{1.0} {}

  BetaMixture(std::vector<BetaComponent> components, std::vector<double> weights)
      : components_(std::move(components)), weights_(std::move(weights)) {
    if (components_.empty()) throw DomainError("mixture needs at least one component");
    if (components_.size() != weights_.size())
      throw DomainError("mixture components and weights differ in length");
    double sum = 0.0;
    for (double w : weights_) {
      if (!(w >= 0.0)) throw DomainError("negative mixture weight");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw DomainError("mixture weights sum to " + std::to_string(sum));
  }

  explicit BetaMixture(BetaComponent single) : components_{single}, weights_{1.0} {}

  std::size_t size() const noexcept { return components_.size(); }
  const std::vector<BetaComponent>& components() const noexcept { return components_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  double pdf(double x) const {
    double total = 0.0;
    for (std::size_t c = 0; c < size(); ++c)
      if (weights_[c] > 0.0) total += weights_[c] * beta_pdf(components_[c], x);
    return total;
  }

  double mean() const {
    double m = 0.0;
    for (std::size_t c = 0; c < size(); ++c) m += weights_[c] * components_[c].mean();
    return m;
  }

  /// Picks a component by weight, then draws a beta variate as X/(X+Y) with
  /// X ~ Gamma(alpha), Y ~ Gamma(beta).
  double sample(Rng& rng) const {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double r = u(rng);
    std::size_t c = 0;
    double acc = weights_[0];
    while (c + 1 < size() && r >= acc) acc += weights_[++c];
    const auto& comp = components_[c];
    std::gamma_distribution<double> gx(comp.alpha, 1.0), gy(comp.beta, 1.0);
    const double x = gx(rng), y = gy(rng);
    if (x + y == 0.0) return comp.mean();
    return x / (x + y);
  }

private:
  std::vector<BetaComponent> components_;
  std::vector<double> weights_;
};

inline double mixture_pdf(const BetaMixture& m, double x) { return m.pdf(x); }

inline double sample_belief(const BetaMixture& m, Rng& rng) { return m.sample(rng); }

// ---------------------------------------------------------------------------
// Survey slider mapping

/// Survey sliders run from -5 to 5; beliefs are (v + 5) / 10 clamped away
/// from the endpoints so that densities stay finite.
inline double slider_to_belief(double raw) {
  if (!(raw >= -5.0 && raw <= 5.0)) throw DomainError("slider value " + std::to_string(raw) + " outside [-5,5]");
  return std::clamp((raw + 5.0) / 10.0, 1e-6, 1.0 - 1e-6);
}

// ---------------------------------------------------------------------------
// Hard-assignment EM with moment matching

struct EmConfig {
  std::size_t max_iters = 200;
  std::size_t restarts = 8;
  /// Variance floor per component. The default is the variance of a uniform
  /// error over one slider step (0.1 on the belief scale), so repeated slider
  /// values do not collapse into a spike.
  double min_variance = 0.01 / 12.0;
};

struct MixtureFit {
  BetaMixture mixture;
  std::vector<std::size_t> assignment;  // component per sample
  double log_likelihood = -std::numeric_limits<double>::infinity();  // completed data
  std::size_t iterations = 0;
  std::vector<double> trace;  // completed-data log-likelihood after each accepted iteration
};

namespace detail {

/// Moment estimate that never fails: the variance is clamped into the
/// feasible range when the assigned samples are degenerate.
inline BetaComponent guarded_moments(std::span<const double> samples, double min_variance) {
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= static_cast<double>(samples.size());
  mean = std::clamp(mean, 1e-6, 1.0 - 1e-6);
  double var = 0.0;
  for (double x : samples) var += (x - mean) * (x - mean);
  var /= static_cast<double>(samples.size());
  const double bound = mean * (1.0 - mean);
  var = std::clamp(std::max(var, min_variance), bound * 1e-6, bound * (1.0 - 1e-6));
  const double common = bound / var - 1.0;
  return BetaComponent(mean * common, (1.0 - mean) * common);
}

inline double completed_log_likelihood(std::span<const double> xs,
                                       const std::vector<std::size_t>& z,
                                       const std::vector<BetaComponent>& comps,
                                       const std::vector<double>& weights) {
  double ll = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    ll += std::log(weights[z[i]]) + beta_log_pdf(comps[z[i]], xs[i]);
  return ll;
}

struct EmState {
  std::vector<std::size_t> z;
  std::vector<BetaComponent> comps;
  std::vector<double> weights;
  double ll = 0.0;
};

/// Fits parameters to an assignment, re-seeding components with fewer than
/// two samples from the worst-fitting pair of samples.
inline EmState maximize(std::span<const double> xs, std::vector<std::size_t> z, std::size_t k,
                        const std::vector<BetaComponent>* previous, double min_variance) {
  const std::size_t n = xs.size();
  for (std::size_t round = 0; round < k + 1; ++round) {
    std::vector<std::size_t> counts(k, 0);
    for (auto c : z) ++counts[c];
    auto starving = std::find_if(counts.begin(), counts.end(), [](std::size_t c) { return c < 2; });
    if (starving == counts.end()) break;
    const std::size_t target = static_cast<std::size_t>(starving - counts.begin());
    // Score each sample by its density under the component it currently sits in.
    std::vector<std::pair<double, std::size_t>> fit;
    for (std::size_t i = 0; i < n; ++i) {
      if (counts[z[i]] <= 2 && z[i] != target) continue;  // don't starve another component
      double score = previous ? beta_log_pdf((*previous)[z[i]], xs[i]) : 0.0;
      fit.emplace_back(score, i);
    }
    std::sort(fit.begin(), fit.end());
    std::size_t moved = 0;
    for (const auto& [score, i] : fit) {
      if (counts[target] + moved >= 2) break;
      if (z[i] == target) continue;
      z[i] = target;
      ++moved;
    }
    if (moved == 0) break;
  }
  EmState s;
  s.z = std::move(z);
  s.comps.resize(k);
  s.weights.assign(k, 0.0);
  std::vector<std::vector<double>> groups(k);
  for (std::size_t i = 0; i < n; ++i) groups[s.z[i]].push_back(xs[i]);
  for (std::size_t c = 0; c < k; ++c) {
    s.weights[c] = static_cast<double>(groups[c].size()) / static_cast<double>(n);
    if (groups[c].empty()) {
      s.comps[c] = BetaComponent(1.0, 1.0);
      continue;
    }
    try {
      s.comps[c] = moments_estimate(groups[c]);
    } catch (const EstimationError&) {
      s.comps[c] = guarded_moments(groups[c], min_variance);
    }
  }
  s.ll = completed_log_likelihood(xs, s.z, s.comps, s.weights);
  return s;
}

}  // namespace detail

/// Hard-assignment EM: moment-matched parameters per component, samples
/// reassigned to the component of highest density, weights from assignment
/// fractions. Restart 0 starts from a quantile partition, later restarts from
/// random assignments; the best completed-data log-likelihood wins. An
/// iteration that would lower the log-likelihood is rejected and ends the run.
inline MixtureFit fit_mixture_em(std::span<const double> samples, std::size_t components, Rng& rng,
                                 const EmConfig& config = {}) {
  const std::size_t n = samples.size();
  const std::size_t k = components;
  if (k == 0) throw DomainError("component count must be positive");
  if (n < 2 * k) throw EstimationError("need at least two samples per component");
  for (double x : samples)
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("sample outside [0,1]");
  std::vector<double> xs(samples.begin(), samples.end());
  for (double& x : xs) x = std::clamp(x, 1e-6, 1.0 - 1e-6);

  MixtureFit best;
  const std::size_t restarts = k == 1 ? 1 : std::max<std::size_t>(1, config.restarts);
  for (std::size_t r = 0; r < restarts; ++r) {
    std::vector<std::size_t> z(n);
    if (r == 0) {
      std::vector<std::size_t> order(n);
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return xs[a] < xs[b]; });
      for (std::size_t pos = 0; pos < n; ++pos) z[order[pos]] = pos * k / n;
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, k - 1);
      for (auto& c : z) c = pick(rng);
    }
    auto state = detail::maximize(xs, std::move(z), k, nullptr, config.min_variance);
    std::vector<double> trace{state.ll};
    std::size_t iter = 0;
    for (; iter < config.max_iters; ++iter) {
      std::vector<std::size_t> next(n);
      for (std::size_t i = 0; i < n; ++i) {
        std::size_t arg = 0;
        double top = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c) {
          if (state.weights[c] == 0.0) continue;
          double v = beta_log_pdf(state.comps[c], xs[i]);
          if (v > top) {
            top = v;
            arg = c;
          }
        }
        next[i] = arg;
      }
      if (next == state.z) break;
      auto candidate = detail::maximize(xs, std::move(next), k, &state.comps, config.min_variance);
      if (candidate.z == state.z || candidate.ll < state.ll) break;
      state = std::move(candidate);
      trace.push_back(state.ll);
    }
    if (state.ll > best.log_likelihood) {
      best.mixture = BetaMixture(state.comps, state.weights);
      best.assignment = state.z;
      best.log_likelihood = state.ll;
      best.iterations = iter;
      best.trace = std::move(trace);
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Normalized entropy criterion

struct NecTerms {
  double entropy = 0.0;         // E(C) = -sum t ln t  (>= 0)
  double classification = 0.0;  // C(C) = sum t ln(pi B)
  double log_likelihood = 0.0;  // L(C) = C(C) + E(C)
};

/// Soft responsibilities t_ic and the NEC terms for a fitted mixture. The
/// entropy is taken with the sign that makes L the observed log-likelihood.
inline NecTerms nec_terms(const BetaMixture& m, std::span<const double> samples) {
  NecTerms out;
  const std::size_t k = m.size();
  std::vector<double> logp(k);
  for (double raw : samples) {
    const double x = std::clamp(raw, 1e-6, 1.0 - 1e-6);
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      logp[c] = m.weights()[c] > 0.0
                    ? std::log(m.weights()[c]) + beta_log_pdf(m.components()[c], x)
                    : -std::numeric_limits<double>::infinity();
      top = std::max(top, logp[c]);
    }
    double sum = 0.0;
    for (std::size_t c = 0; c < k; ++c) sum += std::exp(logp[c] - top);
    const double log_norm = top + std::log(sum);
    for (std::size_t c = 0; c < k; ++c) {
      if (!std::isfinite(logp[c])) continue;
      const double log_t = logp[c] - log_norm;
      const double t = std::exp(log_t);
      out.classification += t * logp[c];
      out.entropy -= t * log_t;
    }
  }
  if (k == 1) out.entropy = 0.0;
  out.log_likelihood = out.classification + out.entropy;
  return out;
}

/// NEC(C) = E(C) / (L(C) - L(1)); NEC(1) = 1. Returns +inf when the mixture
/// does not improve on the one-component likelihood (undefined ratio).
inline double nec_score(const BetaMixture& m, std::span<const double> samples,
                        double one_component_log_likelihood) {
  if (m.size() == 1) return 1.0;
  const auto terms = nec_terms(m, samples);
  const double gain = terms.log_likelihood - one_component_log_likelihood;
  if (!(gain > 0.0)) return std::numeric_limits<double>::infinity();
  return terms.entropy / gain;
}

struct ComponentSelection {
  std::size_t count = 1;
  std::vector<std::size_t> candidates;
  std::vector<double> nec;           // per candidate
  std::vector<MixtureFit> fits;      // per candidate
  const MixtureFit& chosen() const {
    for (std::size_t i = 0; i < candidates.size(); ++i)
      if (candidates[i] == count) return fits[i];
    throw Error("selected count missing");
  }
};

/// Fits every candidate count and returns the argmin of NEC (ties go to the
/// smaller count).
inline ComponentSelection select_component_count(std::span<const double> samples,
                                                 std::vector<std::size_t> candidates, Rng& rng,
                                                 const EmConfig& config = {}) {
  if (candidates.empty()) throw DomainError("no candidate component counts");
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  ComponentSelection sel;
  const auto one = fit_mixture_em(samples, 1, rng, config);
  const double l1 = nec_terms(one.mixture, samples).log_likelihood;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t c : candidates) {
    if (samples.size() < 2 * c) continue;
    auto fit = c == 1 ? one : fit_mixture_em(samples, c, rng, config);
    const double score = nec_score(fit.mixture, samples, l1);
    sel.candidates.push_back(c);
    sel.nec.push_back(score);
    sel.fits.push_back(std::move(fit));
    if (score < best) {
      best = score;
      sel.count = c;
    }
  }
  if (sel.candidates.empty()) throw EstimationError("too few samples for every candidate count");
  if (!std::isfinite(best)) sel.count = sel.candidates.front();
  return sel;
}

}  // namespace aps
