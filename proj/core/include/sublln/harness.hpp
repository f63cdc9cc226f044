#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sublln/capacity.hpp"
#include "sublln/config.hpp"
#include "sublln/sequences.hpp"

namespace sublln {

struct RunOptions {
  std::size_t threads = 1;
  bool timing = false;  // wall_ms stays 0 otherwise, keeping reports byte-stable
};

struct ExperimentRow {
  std::string scenario;
  std::size_t n = 0;
  std::string event;
  CapacityMethod method = CapacityMethod::exact_dp;
  double value = 0.0;
  double mc_stderr = 0.0;
  double center_hi = 0.0;
  double center_lo = 0.0;
  double wall_ms = 0.0;
};

/// Throws DominationViolation unless every member obeys the scenario's
/// domination bound on the check grid.
void check_domination(const ScenarioConfig& cfg);

/// Strategies a scenario searches: its fixed strategy if given, else the family.
[[nodiscard]] std::vector<Strategy> scenario_strategies(const ScenarioConfig& cfg);

struct WllnReport {
  std::vector<ExperimentRow> rows;
  // Non-increasing (within two standard errors) over horizons >= burn-in, and
  // the last such value is <= the first.
  bool monotone = false;
};

/// Upper probability of the deviation event per horizon: exact for discrete
/// sets at n <= 12, strategy search (a lower bound) beyond.
[[nodiscard]] WllnReport run_wlln(const ScenarioConfig& cfg, const RunOptions& opts = {});

struct SllnCheckpoint {
  std::size_t n0 = 0;
  double frac_upper = 0.0;   // sup_{n0<=n<=N} (S_n - n mu_hi) / n^(1/r) > delta
  double frac_lower = 0.0;   // inf_{n0<=n<=N} (S_n - n mu_lo) / n^(1/r) < -delta
  double frac_either = 0.0;
};

struct SllnStrategyResult {
  std::string strategy;
  std::vector<SllnCheckpoint> checkpoints;
  bool non_increasing = false;  // frac_upper and frac_lower over increasing n0
};

struct SllnReport {
  std::string scenario;
  std::size_t N = 0;
  double delta = 0.0;
  double r = 1.0;
  double center_hi = 0.0;
  double center_lo = 0.0;
  std::vector<SllnStrategyResult> strategies;
  bool passed = false;
};

/// Per-path tail extremes of the centered, normalized sums for each start n0.
struct PathExtremes {
  std::vector<double> sup_upper;  // one per checkpoint
  std::vector<double> inf_lower;
};

/// checkpoints must be increasing and <= N.
[[nodiscard]] PathExtremes path_extremes(const AmbiguitySet& theta, const Strategy& strategy,
                                         std::size_t N, const std::vector<std::size_t>& checkpoints,
                                         double r, double center_hi, double center_lo,
                                         std::uint64_t seed, std::uint64_t replication);

[[nodiscard]] SllnReport run_slln(const ScenarioConfig& cfg, const RunOptions& opts = {});

/// Lower probability of the band (mu_lo - eps, mu_hi + eps) at each horizon,
/// as 1 minus the upper probability of its complement.
struct KolmogorovReport {
  std::vector<ExperimentRow> rows;
  bool passed = false;  // last value >= first value (within noise)
};

[[nodiscard]] KolmogorovReport run_kolmogorov(const ScenarioConfig& cfg,
                                              const RunOptions& opts = {});

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Least squares of log(statistic) on log(n). Needs >= 4 horizons spanning
/// >= 2 decades and positive statistics; throws InvalidArgument otherwise.
[[nodiscard]] RateFit fit_rate(const std::vector<std::size_t>& horizons,
                               const std::vector<double>& statistics);

struct RateReport {
  std::string strategy;  // the worst case among those searched
  std::vector<std::size_t> horizons;
  std::vector<double> statistics;  // mean |S_n - n mu_hi| / n
  RateFit fit;
  double target_slope = 0.0;  // -(1 - 1/r)
  bool pass = false;
};

[[nodiscard]] RateReport run_rate(const ScenarioConfig& cfg, const RunOptions& opts = {});

struct AuditRow {
  std::string strategy;
  double max_violation = 0.0;
  std::size_t nodes = 0;
  bool passed = false;
};

[[nodiscard]] std::vector<AuditRow> run_audit(const ScenarioConfig& cfg, double tolerance = 1e-12);

}  // namespace sublln
