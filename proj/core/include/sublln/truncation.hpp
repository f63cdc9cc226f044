#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sublln/ambiguity.hpp"
#include "sublln/sequences.hpp"

namespace sublln {

/// Marcinkiewicz order r in [1, 2) and the step-dependent clamp level j^(1/r).
class TruncationScheme {
 public:
  explicit TruncationScheme(double r);

  [[nodiscard]] double order() const noexcept { return r_; }
  [[nodiscard]] double level(std::size_t j) const;
  /// Y_j = (-j^(1/r)) v x ^ j^(1/r).
  [[nodiscard]] double truncate(double x, std::size_t j) const;

 private:
  double r_;
};

enum class Center { upper, lower };

/// The three terms bounding n^(-1/r) sum (X_j - E[X_j]):
///   t1 = n^(-1/r) sum |X_j - Y_j|
///   t2 = n^(-1/r) sum (Y_j - c_j), c_j the upper (or lower) expectation of Y_j
///   t3 = n^(-1/r) sum |c_j - E[X_j]|
/// The conditional-centering variant of t2 is strategy dependent, so only the
/// interval it must lie in is reported.
struct DecompositionTerms {
  double t1 = 0.0;
  double t2 = 0.0;
  double t3 = 0.0;
  double t2_conditional_lo = 0.0;
  double t2_conditional_hi = 0.0;
  // n^(-1/r) sum E[(|X_j| - j^(1/r))^+], which dominates t3 by sub-additivity.
  double t3_bound = 0.0;
  // The centered sum itself; t1 + t2 + t3 >= statistic for the upper center.
  double statistic = 0.0;
};

[[nodiscard]] DecompositionTerms decomposition_terms(const SamplePath& path,
                                                     const AmbiguitySet& theta,
                                                     const TruncationScheme& scheme,
                                                     Center center = Center::upper);

/// Partial sums of one proof series together with its closed-form bound.
struct SeriesReport {
  std::vector<double> terms;         // summand j = 1..N
  std::vector<double> partial_sums;  // indexed by N - 1
  std::vector<double> remainders;    // bound on the unsummed tail after N terms
  std::vector<double> term_bounds;   // per-term bounds, when the route is termwise
  double closed_form_bound = 0.0;
  bool converged = false;
};

/// Truncation-error series. For r > 1: sum_j E[(|X_j| - j^(1/r))^+] / j^(1/r) with bound
/// 2C/(r-1) C_V(|X|^r). For r = 1 the per-j terms E[(|X_j| - j)^+] and their
/// Cesaro averages (stored as partial_sums), each bounded by
/// C (V(|X| >= j) + int_j^inf V(|X| >= t) dt).
[[nodiscard]] SeriesReport step1_series(const AmbiguitySet& theta, const TruncationScheme& scheme,
                                        const DominationCondition& domination, std::size_t n_terms);

/// Second-moment series sum_j E[Y_j^2] / j^(2/r) with bound
/// (1 + 4C) zeta(2/r) + 8rC/(2-r) C_V(|X|^r).
[[nodiscard]] SeriesReport step2_series(const AmbiguitySet& theta, const TruncationScheme& scheme,
                                        const DominationCondition& domination, std::size_t n_terms);

/// Indicator-sum bound on E[Y_j^2]: 1 + 4C sum_{i<=j} i^(2/r-1) V(|X| >= i^(1/r)).
[[nodiscard]] double second_moment_indicator_bound(const TruncationScheme& scheme,
                                                   const DominationCondition& domination,
                                                   std::size_t j);

/// Slack of sum_{j<i} j^(-1/r) <= r/(r-1) i^(1-1/r), for r > 1 and i >= 2.
[[nodiscard]] double step1_comparison_slack(double r, std::size_t i);
/// Slack of sum_{j>=i} j^(-2/r) <= r/(2-r) (i-1)^(1-2/r), for i >= 2.
[[nodiscard]] double step2_comparison_slack(double r, std::size_t i);

struct ClampActivity {
  std::vector<std::uint64_t> counts;  // per replication: #{j : |X_j| >= j^(1/r)}
  double mean_count = 0.0;
  // Poisson-binomial moments from max_theta P(|X| >= j^(1/r)); exact when all
  // members share one magnitude law.
  double expected_count = 0.0;
  double count_variance = 0.0;
};

struct BorelCantelliReport {
  SeriesReport series;  // terms V(|X_j| >= j^(1/r)), bound C C_V(|X|^r)
  ClampActivity activity;
};

/// Series sum_j V(|X_j| >= j^(1/r)) against C C_V(|X|^r).
[[nodiscard]] SeriesReport borel_cantelli_series(const AmbiguitySet& theta,
                                                 const TruncationScheme& scheme,
                                                 const DominationCondition& domination,
                                                 std::size_t n_terms);

/// Monte Carlo count of clamp-active steps along simulated paths.
[[nodiscard]] ClampActivity clamp_activity(const PathModel& model, std::uint64_t seed,
                                           std::size_t replications, std::size_t threads = 1);

[[nodiscard]] BorelCantelliReport borel_cantelli_budget(const PathModel& model,
                                                        const DominationCondition& domination,
                                                        std::size_t n_terms, std::uint64_t seed,
                                                        std::size_t replications,
                                                        std::size_t threads = 1);

struct KroneckerReport {
  std::vector<double> weighted_partial_sums;  // sum_{n<=N} x_n / b_n
  std::vector<double> normalized_sums;        // b_N^(-1) sum_{k<=N} x_k
  bool series_converged = false;
  bool normalized_to_zero = false;
  bool consistent = false;  // series_converged implies normalized_to_zero
};

/// Numeric illustration of Kronecker's lemma. b must be positive and strictly increasing.
[[nodiscard]] KroneckerReport kronecker_check(std::span<const double> x, std::span<const double> b,
                                              double tolerance = 1e-3);

}  // namespace sublln
