#include "sublln/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <numeric>

#include "sublln/error.hpp"
#include "sublln/parallel.hpp"

namespace sublln {
namespace {

constexpr std::size_t kMaxStates = 1'000'000;
constexpr std::size_t kMaxTableEntries = 1u << 20;
constexpr std::size_t kMaxStrategyNodes = 10'000'000;

double root(double n, double r) { return r == 1.0 ? n : std::pow(n, 1.0 / r); }

void require_positive_eps(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw InvalidArgument("path event: epsilon must be > 0");
}

// Reachable partial sums per step; the plain left-to-right sums along every
// history land exactly on these values.
std::vector<std::vector<double>> reachable_sums(const AmbiguitySet& theta, std::size_t n) {
  std::vector<double> steps;
  for (const auto& m : theta.members()) {
    for (const auto& a : m.atoms()) {
      if (a.prob > 0.0) steps.push_back(a.value);
    }
  }
  std::sort(steps.begin(), steps.end());
  steps.erase(std::unique(steps.begin(), steps.end()), steps.end());

  std::vector<std::vector<double>> levels(n + 1);
  levels[0] = {0.0};
  std::size_t total = 1;
  for (std::size_t j = 1; j <= n; ++j) {
    auto& cur = levels[j];
    cur.reserve(levels[j - 1].size() * steps.size());
    for (double s : levels[j - 1]) {
      for (double x : steps) cur.push_back(s + x);
    }
    std::sort(cur.begin(), cur.end());
    cur.erase(std::unique(cur.begin(), cur.end()), cur.end());
    total += cur.size();
    if (total > kMaxStates) {
      throw BudgetExceeded("exact capacity: more than " + std::to_string(kMaxStates) +
                           " (step, sum) states by step " + std::to_string(j));
    }
  }
  return levels;
}

std::size_t index_of(const std::vector<double>& level, double s) {
  const auto it = std::lower_bound(level.begin(), level.end(), s);
  return static_cast<std::size_t>(it - level.begin());
}

CapacityEstimate exact_extreme(const AmbiguitySet& theta, std::size_t n, const PathEvent& event,
                               bool maximize) {
  if (n < 1) throw InvalidArgument("exact capacity: horizon must be >= 1");
  if (!theta.all_discrete()) {
    throw UnsupportedExact("exact capacity: every member must be discrete");
  }
  const auto levels = reachable_sums(theta, n);
  std::vector<std::vector<double>> value(n + 1);
  std::vector<std::vector<std::size_t>> choice(n);
  value[n].resize(levels[n].size());
  for (std::size_t i = 0; i < levels[n].size(); ++i) {
    value[n][i] = event.contains(n, levels[n][i]) ? 1.0 : 0.0;
  }
  for (std::size_t j = n; j-- > 0;) {
    const auto& next_level = levels[j + 1];
    const auto& next_value = value[j + 1];
    value[j].resize(levels[j].size());
    choice[j].resize(levels[j].size());
    for (std::size_t i = 0; i < levels[j].size(); ++i) {
      const double s = levels[j][i];
      double best = 0.0;
      std::size_t arg = 0;
      for (std::size_t k = 0; k < theta.size(); ++k) {
        double v = 0.0;
        for (const auto& a : theta[k].atoms()) {
          if (a.prob > 0.0) v += a.prob * next_value[index_of(next_level, s + a.value)];
        }
        if (k == 0 || (maximize ? v > best : v < best)) {
          best = v;
          arg = k;
        }
      }
      value[j][i] = best;
      choice[j][i] = arg;
    }
  }

  CapacityEstimate est;
  est.value = std::clamp(value[0][0], 0.0, 1.0);
  est.method = CapacityMethod::exact_dp;
  est.horizon = n;
  est.model = describe(theta);
  est.event = event;

  // Tabulate the optimal choice at every history the optimal strategy reaches.
  std::map<std::vector<double>, std::size_t> entries;
  std::vector<double> history;
  bool overflow = false;
  const std::function<void(std::size_t, double)> tabulate = [&](std::size_t j, double s) {
    if (overflow) return;
    if (entries.size() >= kMaxTableEntries) {
      overflow = true;
      return;
    }
    const std::size_t k = choice[j][index_of(levels[j], s)];
    entries.emplace(history, k);
    if (j + 1 >= n) return;
    for (const auto& a : theta[k].atoms()) {
      if (a.prob <= 0.0) continue;
      history.push_back(a.value);
      tabulate(j + 1, s + a.value);
      history.pop_back();
    }
  };
  tabulate(0, 0.0);
  if (!overflow) est.best_strategy = Strategy::table(n, std::move(entries), 0);
  return est;
}

}  // namespace

PathEvent PathEvent::lower_dev(double eps, double r, double center_lo) {
  require_positive_eps(eps);
  return PathEvent(Kind::lower_dev, eps, r, 0.0, center_lo, 0.0);
}

PathEvent PathEvent::upper_dev(double eps, double r, double center_hi) {
  require_positive_eps(eps);
  return PathEvent(Kind::upper_dev, eps, r, center_hi, 0.0, 0.0);
}

PathEvent PathEvent::union_dev(double eps, double r, double center_hi, double center_lo) {
  require_positive_eps(eps);
  return PathEvent(Kind::union_dev, eps, r, center_hi, center_lo, 0.0);
}

PathEvent PathEvent::band(double mu_lo, double mu_hi, double eps) {
  require_positive_eps(eps);
  if (!(mu_lo <= mu_hi)) throw InvalidArgument("band event: need mu_lo <= mu_hi");
  return PathEvent(Kind::band, eps, 1.0, mu_hi, mu_lo, 0.0);
}

PathEvent PathEvent::custom_threshold(double t) {
  return PathEvent(Kind::custom_threshold, 0.0, 1.0, 0.0, 0.0, t);
}

bool PathEvent::contains(std::size_t n, double s_n) const {
  const double nd = static_cast<double>(n);
  bool in = false;
  switch (kind_) {
    case Kind::lower_dev:
      in = (s_n - nd * lo_) / root(nd, r_) <= -eps_;
      break;
    case Kind::upper_dev:
      in = (s_n - nd * hi_) / root(nd, r_) >= eps_;
      break;
    case Kind::union_dev:
      in = (s_n - nd * lo_) / root(nd, r_) <= -eps_ || (s_n - nd * hi_) / root(nd, r_) >= eps_;
      break;
    case Kind::band: {
      const double avg = s_n / nd;
      in = lo_ - eps_ < avg && avg < hi_ + eps_;
      break;
    }
    case Kind::custom_threshold:
      in = s_n >= t_;
      break;
  }
  return in != negated_;
}

PathEvent PathEvent::complement() const {
  PathEvent out = *this;
  out.negated_ = !negated_;
  return out;
}

std::string PathEvent::name() const {
  std::string base;
  switch (kind_) {
    case Kind::lower_dev: base = "lower_dev"; break;
    case Kind::upper_dev: base = "upper_dev"; break;
    case Kind::union_dev: base = "union_dev"; break;
    case Kind::band: base = "band"; break;
    case Kind::custom_threshold: base = "custom_threshold"; break;
  }
  return negated_ ? "not(" + base + ")" : base;
}

const char* to_string(CapacityMethod m) noexcept {
  return m == CapacityMethod::exact_dp ? "exact_dp" : "strategy_search";
}

CapacityEstimate exact_upper_prob(const AmbiguitySet& theta, std::size_t n,
                                  const PathEvent& event) {
  return exact_extreme(theta, n, event, true);
}

CapacityEstimate exact_lower_prob(const AmbiguitySet& theta, std::size_t n,
                                  const PathEvent& event) {
  return exact_extreme(theta, n, event, false);
}

double exact_strategy_prob(const AmbiguitySet& theta, const Strategy& strategy, std::size_t n,
                           const PathEvent& event) {
  if (n < 1) throw InvalidArgument("strategy probability: horizon must be >= 1");
  if (!theta.all_discrete()) {
    throw UnsupportedExact("strategy probability: every member must be discrete");
  }
  strategy.validate(theta.size());
  std::vector<double> history;
  std::size_t nodes = 0;
  const std::function<double(double)> visit = [&](double s) -> double {
    if (++nodes > kMaxStrategyNodes) {
      throw BudgetExceeded("strategy probability: history tree exceeds " +
                           std::to_string(kMaxStrategyNodes) + " nodes");
    }
    const std::size_t j = history.size();
    if (j == n) return event.contains(n, s) ? 1.0 : 0.0;
    const std::size_t k = strategy.choose(history, s, j + 1, theta.size());
    double v = 0.0;
    for (const auto& a : theta[k].atoms()) {
      if (a.prob <= 0.0) continue;
      history.push_back(a.value);
      v += a.prob * visit(s + a.value);
      history.pop_back();
    }
    return v;
  };
  return visit(0.0);
}

std::vector<Strategy> strategy_family(const AmbiguitySet& theta,
                                      const StrategySearchConfig& config) {
  const std::size_t K = theta.size();
  if (K == 1) return {Strategy::constant(0)};

  std::vector<double> means(K, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t k = 0; k < K; ++k) {
    if (theta[k].tail_index() > 1.0) means[k] = mean(theta[k]);
  }
  std::size_t lo = 0;
  std::size_t hi = K - 1;
  if (std::all_of(means.begin(), means.end(), [](double m) { return std::isfinite(m); })) {
    lo = static_cast<std::size_t>(std::min_element(means.begin(), means.end()) - means.begin());
    hi = static_cast<std::size_t>(std::max_element(means.begin(), means.end()) - means.begin());
  }

  std::vector<Strategy> out;
  if (config.constants) {
    for (std::size_t k = 0; k < K; ++k) out.push_back(Strategy::constant(k));
  }
  if (config.round_robin) out.push_back(Strategy::round_robin());
  std::vector<double> levels = config.threshold_levels;
  if (levels.empty()) {
    levels.push_back(0.0);
    for (double m : means) {
      if (std::isfinite(m)) levels.push_back(m);
    }
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  }
  if (lo != hi) {
    for (double level : levels) {
      out.push_back(Strategy::threshold(lo, hi, level));
      out.push_back(Strategy::threshold(hi, lo, level));
    }
    if (config.last_sign) {
      out.push_back(Strategy::last_sign(lo, hi));
      out.push_back(Strategy::last_sign(hi, lo));
    }
  }
  for (std::size_t g = 0; g < config.random_genomes; ++g) {
    std::vector<std::size_t> genome(std::max<std::size_t>(1, config.genome_length));
    for (std::size_t i = 0; i < genome.size(); ++i) {
      genome[i] = static_cast<std::size_t>(random_words(config.genome_seed, g, i).first % K);
    }
    out.push_back(Strategy::randomized(std::move(genome)));
  }
  return out;
}

std::vector<std::vector<std::uint64_t>> count_hits(const AmbiguitySet& theta,
                                                   const std::vector<Strategy>& strategies,
                                                   const std::vector<std::size_t>& horizons,
                                                   const PathEvent& event,
                                                   std::size_t replications, std::uint64_t seed,
                                                   std::size_t threads) {
  if (horizons.empty()) throw InvalidArgument("search: no horizons");
  std::vector<std::size_t> order(horizons.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return horizons[a] < horizons[b]; });
  if (horizons[order.front()] < 1) throw InvalidArgument("search: horizons must be >= 1");
  const std::size_t n_max = horizons[order.back()];

  std::vector<std::vector<std::uint64_t>> counts(strategies.size(),
                                                 std::vector<std::uint64_t>(horizons.size(), 0));
  for (std::size_t si = 0; si < strategies.size(); ++si) {
    const Strategy& strategy = strategies[si];
    strategy.validate(theta.size());
    std::mutex merge;
    parallel_for(replications, threads, [&](std::size_t begin, std::size_t end) {
      std::vector<std::uint64_t> local(horizons.size(), 0);
      std::vector<double> scratch;
      for (std::size_t rep = begin; rep < end; ++rep) {
        std::size_t next = 0;
        walk_path(theta, strategy, n_max, seed, rep, scratch,
                  [&](std::size_t j, double, double s, std::size_t) {
                    while (next < order.size() && horizons[order[next]] == j) {
                      if (event.contains(j, s)) ++local[order[next]];
                      ++next;
                    }
                    return true;
                  });
      }
      // Integer counts: the merge order cannot change the result.
      const std::lock_guard lock(merge);
      for (std::size_t h = 0; h < local.size(); ++h) counts[si][h] += local[h];
    });
  }
  return counts;
}

std::vector<CapacityEstimate> search_upper_prob_grid(const AmbiguitySet& theta,
                                                     const std::vector<std::size_t>& horizons,
                                                     const PathEvent& event,
                                                     const StrategySearchConfig& family,
                                                     std::size_t replications, std::uint64_t seed,
                                                     std::size_t threads) {
  if (replications < 100) throw InvalidArgument("search: need at least 100 replications");
  const auto strategies = strategy_family(theta, family);
  const auto counts = count_hits(theta, strategies, horizons, event, replications, seed, threads);
  const double reps = static_cast<double>(replications);
  std::vector<CapacityEstimate> out;
  for (std::size_t h = 0; h < horizons.size(); ++h) {
    std::size_t best = 0;
    for (std::size_t si = 1; si < strategies.size(); ++si) {
      if (counts[si][h] > counts[best][h]) best = si;
    }
    CapacityEstimate est;
    est.value = static_cast<double>(counts[best][h]) / reps;
    est.method = CapacityMethod::strategy_search;
    est.best_strategy = strategies[best];
    est.mc_stderr = std::sqrt(est.value * (1.0 - est.value) / reps);
    est.strategies_searched = strategies.size();
    est.horizon = horizons[h];
    est.model = describe(theta);
    est.event = event;
    out.push_back(std::move(est));
  }
  return out;
}

CapacityEstimate search_upper_prob(const AmbiguitySet& theta, std::size_t n,
                                   const PathEvent& event, const StrategySearchConfig& family,
                                   std::size_t replications, std::uint64_t seed,
                                   std::size_t threads) {
  return search_upper_prob_grid(theta, {n}, event, family, replications, seed, threads).front();
}

double conjugate_lower(const CapacityEstimate& est, const CapacityEstimate& est_c) {
  if (est.model != est_c.model || est.horizon != est_c.horizon) {
    throw InvalidArgument("conjugate_lower: estimates come from different models");
  }
  if (!(est_c.event == est.event.complement())) {
    throw InvalidArgument("conjugate_lower: second estimate is not for the complement event");
  }
  return 1.0 - est_c.value;
}

}  // namespace sublln
