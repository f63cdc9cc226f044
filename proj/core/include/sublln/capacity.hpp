#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sublln/ambiguity.hpp"
#include "sublln/sequences.hpp"

namespace sublln {

/// Event on a path that depends only on (n, S_n).
class PathEvent {
 public:
  enum class Kind { lower_dev, upper_dev, union_dev, band, custom_threshold };

  /// (S_n - n * center_lo) / n^(1/r) <= -eps
  static PathEvent lower_dev(double eps, double r, double center_lo);
  /// (S_n - n * center_hi) / n^(1/r) >= eps
  static PathEvent upper_dev(double eps, double r, double center_hi);
  static PathEvent union_dev(double eps, double r, double center_hi, double center_lo);
  /// mu_lo - eps < S_n / n < mu_hi + eps
  static PathEvent band(double mu_lo, double mu_hi, double eps);
  /// S_n >= t
  static PathEvent custom_threshold(double t);

  [[nodiscard]] bool contains(std::size_t n, double s_n) const;
  [[nodiscard]] PathEvent complement() const;

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] bool negated() const noexcept { return negated_; }
  [[nodiscard]] double epsilon() const noexcept { return eps_; }
  [[nodiscard]] double order() const noexcept { return r_; }
  [[nodiscard]] double center_hi() const noexcept { return hi_; }
  [[nodiscard]] double center_lo() const noexcept { return lo_; }
  [[nodiscard]] double threshold() const noexcept { return t_; }
  // "union_dev", "band", "not(band)", ...
  [[nodiscard]] std::string name() const;

  friend bool operator==(const PathEvent&, const PathEvent&) = default;

 private:
  PathEvent(Kind kind, double eps, double r, double hi, double lo, double t)
      : kind_(kind), eps_(eps), r_(r), hi_(hi), lo_(lo), t_(t) {}

  Kind kind_;
  double eps_ = 0.0;
  double r_ = 1.0;
  double hi_ = 0.0;
  double lo_ = 0.0;
  double t_ = 0.0;
  bool negated_ = false;
};

enum class CapacityMethod { exact_dp, strategy_search };

[[nodiscard]] const char* to_string(CapacityMethod m) noexcept;

struct CapacityEstimate {
  double value = 0.0;
  CapacityMethod method = CapacityMethod::exact_dp;
  // Exact: a maximizing (or minimizing) table; search: the best family member.
  // Empty when the exact history tree is too large to tabulate.
  std::optional<Strategy> best_strategy;
  double mc_stderr = 0.0;
  std::size_t strategies_searched = 0;
  std::size_t horizon = 0;
  std::string model;  // describe(theta)
  PathEvent event = PathEvent::custom_threshold(0.0);
  // Search values are lower bounds on the upper probability, never the value itself.
  [[nodiscard]] bool is_lower_bound() const noexcept {
    return method == CapacityMethod::strategy_search;
  }
};

/// Upper probability sup over adaptive strategies by backward induction on
/// (step, S). Needs discrete members; throws BudgetExceeded past ~1e6 states.
[[nodiscard]] CapacityEstimate exact_upper_prob(const AmbiguitySet& theta, std::size_t n,
                                                const PathEvent& event);

/// Lower probability inf over adaptive strategies, by the same induction with min.
[[nodiscard]] CapacityEstimate exact_lower_prob(const AmbiguitySet& theta, std::size_t n,
                                                const PathEvent& event);

/// P(event) under one fixed strategy, by enumerating its history tree.
[[nodiscard]] double exact_strategy_prob(const AmbiguitySet& theta, const Strategy& strategy,
                                         std::size_t n, const PathEvent& event);

struct StrategySearchConfig {
  bool constants = true;
  bool round_robin = true;
  // Empty means {0} plus every finite member mean.
  std::vector<double> threshold_levels;
  bool last_sign = true;
  std::size_t random_genomes = 8;
  std::size_t genome_length = 16;
  std::uint64_t genome_seed = 0x5eed;
};

/// The searched family. A singleton set collapses to constant(0).
[[nodiscard]] std::vector<Strategy> strategy_family(const AmbiguitySet& theta,
                                                    const StrategySearchConfig& config);

/// Monte Carlo P(event) for each family member on common random numbers; the
/// maximum is a lower bound on the upper probability. replications >= 100.
[[nodiscard]] CapacityEstimate search_upper_prob(const AmbiguitySet& theta, std::size_t n,
                                                 const PathEvent& event,
                                                 const StrategySearchConfig& family,
                                                 std::size_t replications, std::uint64_t seed,
                                                 std::size_t threads = 1);

/// Same search evaluated at several horizons from one set of paths (walked to
/// the largest horizon). One estimate per horizon, in input order.
[[nodiscard]] std::vector<CapacityEstimate> search_upper_prob_grid(
    const AmbiguitySet& theta, const std::vector<std::size_t>& horizons, const PathEvent& event,
    const StrategySearchConfig& family, std::size_t replications, std::uint64_t seed,
    std::size_t threads = 1);

/// Hit counts[strategy][horizon] of `event` for explicit strategies.
[[nodiscard]] std::vector<std::vector<std::uint64_t>> count_hits(
    const AmbiguitySet& theta, const std::vector<Strategy>& strategies,
    const std::vector<std::size_t>& horizons, const PathEvent& event, std::size_t replications,
    std::uint64_t seed, std::size_t threads = 1);

/// nu(A) = 1 - V(A^c). est_c must be for the complement of est's event on the same model.
[[nodiscard]] double conjugate_lower(const CapacityEstimate& est, const CapacityEstimate& est_c);

}  // namespace sublln
