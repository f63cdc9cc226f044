#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "sublln/ambiguity.hpp"
#include "sublln/distributions.hpp"
#include "sublln/rng.hpp"
#include "sublln/summation.hpp"

namespace sublln {

/// Rule choosing the next step's member of the ambiguity set from the
/// observed history. History-free rules (constant, round robin) generate
/// Peng-independent sequences; the others generate sequences that are only
/// pseudo-independent.
class Strategy {
 public:
  struct Constant {
    std::size_t index;
  };
  struct RoundRobin {};
  // hi when S_{j-1} - level * (j-1) < 0, else lo.
  struct Threshold {
    std::size_t lo;
    std::size_t hi;
    double level;
  };
  // hi when X_{j-1} < 0, else lo (X_0 = 0).
  struct LastSign {
    std::size_t lo;
    std::size_t hi;
  };
  // Keyed by the last min(depth, j-1) observed values; unmatched keys use fallback.
  struct Table {
    std::size_t depth;
    std::map<std::vector<double>, std::size_t> entries;
    std::size_t fallback;
  };
  // Step j uses genome[(j-1) % genome.size()].
  struct Randomized {
    std::vector<std::size_t> genome;
  };
  using Kind = std::variant<Constant, RoundRobin, Threshold, LastSign, Table, Randomized>;

  static Strategy constant(std::size_t index) { return Strategy(Constant{index}); }
  static Strategy round_robin() { return Strategy(RoundRobin{}); }
  static Strategy threshold(std::size_t lo, std::size_t hi, double level = 0.0) {
    return Strategy(Threshold{lo, hi, level});
  }
  static Strategy last_sign(std::size_t lo, std::size_t hi) { return Strategy(LastSign{lo, hi}); }
  static Strategy table(std::size_t depth, std::map<std::vector<double>, std::size_t> entries,
                        std::size_t fallback);
  static Strategy randomized(std::vector<std::size_t> genome);

  /// Member index for step `step` (1-based) given X_1..X_{step-1}.
  [[nodiscard]] std::size_t choose(std::span<const double> history, double running_sum,
                                   std::size_t step, std::size_t members) const;

  [[nodiscard]] bool reads_history() const noexcept;
  // Only tables need the full history buffer; the rest use S_{j-1} and X_{j-1}.
  [[nodiscard]] bool needs_history_buffer() const noexcept;
  [[nodiscard]] const Kind& kind() const noexcept { return kind_; }
  [[nodiscard]] std::string describe() const;

  /// Throws InvalidArgument when some reachable index falls outside [0, members).
  void validate(std::size_t members) const;

 private:
  explicit Strategy(Kind kind) : kind_(std::move(kind)) {}
  Kind kind_;
};

struct PathModel {
  AmbiguitySet theta;
  Strategy strategy;
  std::size_t horizon;
  double truncation_r = 1.0;

  /// Throws InvalidArgument on horizon 0, r outside [1, 2) or out-of-range indices.
  void validate() const;
};

struct SamplePath {
  std::vector<double> values;
  std::vector<std::size_t> chosen_indices;
  std::vector<double> partial_sums;
};

/// Streams one path step by step without materializing it:
/// on_step(step, x, running_sum_after, index) is called for step = 1..n and
/// returns false to stop early. `history` is scratch space reused across calls.
template <class OnStep>
void walk_path(const AmbiguitySet& theta, const Strategy& strategy, std::size_t n,
               std::uint64_t seed, std::uint64_t replication, std::vector<double>& history,
               OnStep&& on_step) {
  history.clear();
  const bool keep = strategy.needs_history_buffer();
  double last = 0.0;
  NeumaierSum sum;
  for (std::size_t j = 1; j <= n; ++j) {
    const std::span<const double> past =
        keep ? std::span<const double>(history) : std::span<const double>(&last, j > 1 ? 1 : 0);
    const std::size_t idx = strategy.choose(past, sum.value(), j, theta.size());
    const double x = theta[idx].draw(random_words(seed, replication, j));
    sum.add(x);
    if (keep) history.push_back(x);
    last = x;
    if (!on_step(j, x, sum.value(), idx)) return;
  }
}

/// Path of length model.horizon; a pure function of (model, seed, replication).
[[nodiscard]] SamplePath simulate(const PathModel& model, std::uint64_t seed,
                                  std::uint64_t replication);

struct AuditReport {
  double max_violation = 0.0;
  bool passed = true;
  std::vector<double> worst_history;
  std::size_t worst_function = 0;
  std::size_t nodes_checked = 0;
};

/// Conditional one-step law at a history node; used to audit arbitrary kernels.
using Kernel = std::function<Distribution(std::span<const double> history, std::size_t step)>;

/// Enumerates every reachable history up to `depth` and measures how far the
/// conditional expectation E[phi(X_j) | history] leaves the interval
/// [lower_expectation(theta, phi), upper_expectation(theta, phi)].
/// Requires discrete kernels (UnsupportedExact otherwise) and depth <= 12.
[[nodiscard]] AuditReport audit_kernel(const AmbiguitySet& theta, const Kernel& kernel,
                                       std::span<const TestFunction> phis, std::size_t depth,
                                       double tolerance);

/// Audit of the strategy-driven kernel of a path model.
[[nodiscard]] AuditReport pseudo_independence_audit(const PathModel& model,
                                                    std::span<const TestFunction> phis,
                                                    std::size_t depth, double tolerance);

/// Test functions probing every support point of a discrete ambiguity set.
[[nodiscard]] std::vector<TestFunction> default_audit_catalog(const AmbiguitySet& theta);

}  // namespace sublln
