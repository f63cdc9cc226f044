#include "sublln/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <string>

#include "format.hpp"
#include "sublln/error.hpp"
#include "sublln/parallel.hpp"
#include "sublln/summation.hpp"

namespace sublln {
namespace {

constexpr std::size_t kDominationGrid = 512;
constexpr std::size_t kExactHorizon = 12;

double root(double n, double r) { return r == 1.0 ? n : std::pow(n, 1.0 / r); }

class Stopwatch {
 public:
  explicit Stopwatch(bool on) : on_(on), start_(std::chrono::steady_clock::now()) {}
  [[nodiscard]] double ms() const {
    if (!on_) return 0.0;
    const auto d = std::chrono::steady_clock::now() - start_;
    return std::chrono::duration<double, std::milli>(d).count();
  }

 private:
  bool on_;
  std::chrono::steady_clock::time_point start_;
};

std::vector<std::size_t> require_horizons(const ScenarioConfig& cfg) {
  if (cfg.horizons.empty()) throw ConfigError(cfg.name + ": \"horizons\" is required");
  return cfg.horizons;
}

// Upper probabilities of `event` at each horizon: exact when the set is
// discrete and the horizon small, otherwise a search over paths walked once.
std::vector<CapacityEstimate> estimate_upper(const ScenarioConfig& cfg, const AmbiguitySet& theta,
                                             const std::vector<std::size_t>& horizons,
                                             const PathEvent& event, const RunOptions& opts,
                                             std::vector<double>& wall_ms) {
  std::vector<CapacityEstimate> out(horizons.size());
  std::vector<std::size_t> searched;
  wall_ms.assign(horizons.size(), 0.0);
  for (std::size_t h = 0; h < horizons.size(); ++h) {
    if (theta.all_discrete() && horizons[h] <= kExactHorizon) {
      const Stopwatch sw(opts.timing);
      try {
        out[h] = exact_upper_prob(theta, horizons[h], event);
        wall_ms[h] = sw.ms();
        continue;
      } catch (const BudgetExceeded&) {
      }
    }
    searched.push_back(h);
  }
  if (searched.empty()) return out;

  std::vector<std::size_t> grid;
  for (std::size_t h : searched) grid.push_back(horizons[h]);
  const Stopwatch sw(opts.timing);
  std::vector<CapacityEstimate> found;
  if (cfg.strategy) {
    if (cfg.replications < 100) throw ConfigError(cfg.name + ": replications must be >= 100");
    const auto counts = count_hits(theta, {*cfg.strategy}, grid, event, cfg.replications, cfg.seed,
                                   opts.threads);
    const double reps = static_cast<double>(cfg.replications);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      CapacityEstimate est;
      est.value = static_cast<double>(counts[0][g]) / reps;
      est.method = CapacityMethod::strategy_search;
      est.best_strategy = *cfg.strategy;
      est.mc_stderr = std::sqrt(est.value * (1.0 - est.value) / reps);
      est.strategies_searched = 1;
      est.horizon = grid[g];
      est.model = describe(theta);
      est.event = event;
      found.push_back(std::move(est));
    }
  } else {
    found = search_upper_prob_grid(theta, grid, event, cfg.family, cfg.replications, cfg.seed,
                                   opts.threads);
  }
  const double per = sw.ms();
  for (std::size_t g = 0; g < searched.size(); ++g) {
    out[searched[g]] = std::move(found[g]);
    wall_ms[searched[g]] = per;
  }
  return out;
}

bool within_noise_leq(double a, double sa, double b, double sb) {
  return a <= b + 2.0 * std::sqrt(sa * sa + sb * sb);
}

}  // namespace

void check_domination(const ScenarioConfig& cfg) {
  const AmbiguitySet theta = cfg.theta();
  const DominationCondition dom = cfg.domination_or_default();
  const double excess = verify_domination(dom, theta, kDominationGrid);
  if (excess > 1e-12) {
    throw DominationViolation(cfg.name + ": domination fails, max_theta V(|X| >= t) exceeds C V(|X| >= t) by " +
                              detail::fmt(excess));
  }
}

std::vector<Strategy> scenario_strategies(const ScenarioConfig& cfg) {
  if (cfg.strategy) return {*cfg.strategy};
  return strategy_family(cfg.theta(), cfg.family);
}

WllnReport run_wlln(const ScenarioConfig& cfg, const RunOptions& opts) {
  check_domination(cfg);
  const AmbiguitySet theta = cfg.theta();
  const auto horizons = require_horizons(cfg);
  EventSpec spec;
  if (cfg.event) spec = *cfg.event;
  const PathEvent event = resolve_event(spec, theta, cfg.r, cfg.epsilon);
  const double hi = upper_mean(theta);
  const double lo = lower_mean(theta);

  std::vector<double> wall;
  const auto est = estimate_upper(cfg, theta, horizons, event, opts, wall);
  WllnReport rep;
  for (std::size_t h = 0; h < horizons.size(); ++h) {
    rep.rows.push_back({cfg.name, horizons[h], event.name(), est[h].method, est[h].value,
                        est[h].mc_stderr, hi, lo, wall[h]});
  }

  std::vector<const ExperimentRow*> late;
  for (const auto& row : rep.rows) {
    if (row.n >= cfg.burn_in) late.push_back(&row);
  }
  rep.monotone = true;
  for (std::size_t i = 1; i < late.size(); ++i) {
    rep.monotone = rep.monotone && within_noise_leq(late[i]->value, late[i]->mc_stderr,
                                                    late[i - 1]->value, late[i - 1]->mc_stderr);
  }
  if (!late.empty()) rep.monotone = rep.monotone && late.back()->value <= late.front()->value;
  return rep;
}

PathExtremes path_extremes(const AmbiguitySet& theta, const Strategy& strategy, std::size_t N,
                           const std::vector<std::size_t>& checkpoints, double r, double center_hi,
                           double center_lo, std::uint64_t seed, std::uint64_t replication) {
  const std::size_t K = checkpoints.size();
  if (K == 0) throw InvalidArgument("path extremes: no checkpoints");
  for (std::size_t k = 0; k < K; ++k) {
    if (checkpoints[k] < 1 || checkpoints[k] > N || (k > 0 && checkpoints[k] <= checkpoints[k - 1])) {
      throw InvalidArgument("path extremes: checkpoints must be increasing within [1, N]");
    }
  }
  const double inf = std::numeric_limits<double>::infinity();
  // Extremes over each segment [c_k, c_{k+1}), then suffix-combined.
  std::vector<double> seg_max(K, -inf);
  std::vector<double> seg_min(K, inf);
  std::size_t seg = 0;
  std::vector<double> scratch;
  walk_path(theta, strategy, N, seed, replication, scratch,
            [&](std::size_t j, double, double s, std::size_t) {
              if (j < checkpoints[0]) return true;
              while (seg + 1 < K && j >= checkpoints[seg + 1]) ++seg;
              const double nd = static_cast<double>(j);
              const double norm = root(nd, r);
              seg_max[seg] = std::max(seg_max[seg], (s - nd * center_hi) / norm);
              seg_min[seg] = std::min(seg_min[seg], (s - nd * center_lo) / norm);
              return true;
            });
  PathExtremes out;
  out.sup_upper.assign(K, -inf);
  out.inf_lower.assign(K, inf);
  double run_max = -inf;
  double run_min = inf;
  for (std::size_t k = K; k-- > 0;) {
    run_max = std::max(run_max, seg_max[k]);
    run_min = std::min(run_min, seg_min[k]);
    out.sup_upper[k] = run_max;
    out.inf_lower[k] = run_min;
  }
  return out;
}

SllnReport run_slln(const ScenarioConfig& cfg, const RunOptions& opts) {
  check_domination(cfg);
  const AmbiguitySet theta = cfg.theta();
  SllnReport rep;
  rep.scenario = cfg.name;
  rep.N = cfg.N ? cfg.N : (cfg.horizons.empty() ? 0 : cfg.horizons.back());
  if (rep.N == 0) throw ConfigError(cfg.name + ": slln needs \"N\" or \"horizons\"");
  std::vector<std::size_t> cps = cfg.checkpoints;
  if (cps.empty()) throw ConfigError(cfg.name + ": slln needs \"checkpoints\"");
  for (std::size_t k = 0; k < cps.size(); ++k) {
    if (cps[k] < 1 || cps[k] > rep.N || (k > 0 && cps[k] <= cps[k - 1])) {
      throw ConfigError(cfg.name + ": checkpoints must be increasing and <= N");
    }
  }
  if (cfg.replications < 1) throw ConfigError(cfg.name + ": replications must be >= 1");
  rep.delta = cfg.delta;
  rep.r = cfg.r;
  rep.center_hi = upper_mean(theta);
  rep.center_lo = lower_mean(theta);

  const double reps = static_cast<double>(cfg.replications);
  rep.passed = true;
  for (const Strategy& strategy : scenario_strategies(cfg)) {
    std::vector<std::uint64_t> up(cps.size(), 0), down(cps.size(), 0), either(cps.size(), 0);
    std::mutex merge;
    parallel_for(cfg.replications, opts.threads, [&](std::size_t begin, std::size_t end) {
      std::vector<std::uint64_t> lu(cps.size(), 0), ld(cps.size(), 0), le(cps.size(), 0);
      for (std::size_t r = begin; r < end; ++r) {
        const PathExtremes ex = path_extremes(theta, strategy, rep.N, cps, cfg.r, rep.center_hi,
                                              rep.center_lo, cfg.seed, r);
        for (std::size_t k = 0; k < cps.size(); ++k) {
          const bool u = ex.sup_upper[k] > cfg.delta;
          const bool d = ex.inf_lower[k] < -cfg.delta;
          lu[k] += u;
          ld[k] += d;
          le[k] += (u || d);
        }
      }
      const std::lock_guard lock(merge);
      for (std::size_t k = 0; k < cps.size(); ++k) {
        up[k] += lu[k];
        down[k] += ld[k];
        either[k] += le[k];
      }
    });
    SllnStrategyResult res;
    res.strategy = strategy.describe();
    res.non_increasing = true;
    for (std::size_t k = 0; k < cps.size(); ++k) {
      res.checkpoints.push_back({cps[k], static_cast<double>(up[k]) / reps,
                                 static_cast<double>(down[k]) / reps,
                                 static_cast<double>(either[k]) / reps});
      if (k > 0) {
        res.non_increasing = res.non_increasing && up[k] <= up[k - 1] && down[k] <= down[k - 1];
      }
    }
    rep.passed = rep.passed && res.non_increasing;
    rep.strategies.push_back(std::move(res));
  }
  return rep;
}

KolmogorovReport run_kolmogorov(const ScenarioConfig& cfg, const RunOptions& opts) {
  ScenarioConfig c = cfg;
  c.r = 1.0;
  const AmbiguitySet theta = c.theta();
  if (!(theta.min_tail_index() > 1.0)) {
    throw ConfigError(cfg.name + ": the band needs a finite first moment (tail index > 1)");
  }
  check_domination(c);
  const auto horizons = require_horizons(c);
  const double hi = upper_mean(theta);
  const double lo = lower_mean(theta);
  const double eps = c.event && c.event->epsilon ? *c.event->epsilon : c.epsilon;
  const PathEvent band = PathEvent::band(lo, hi, eps);

  std::vector<double> wall;
  const auto est = estimate_upper(c, theta, horizons, band.complement(), opts, wall);
  KolmogorovReport rep;
  for (std::size_t h = 0; h < horizons.size(); ++h) {
    // nu(band) = 1 - V(band^c)
    rep.rows.push_back({c.name, horizons[h], band.name(), est[h].method, 1.0 - est[h].value,
                        est[h].mc_stderr, hi, lo, wall[h]});
  }
  rep.passed = within_noise_leq(rep.rows.front().value, rep.rows.front().mc_stderr,
                                rep.rows.back().value, rep.rows.back().mc_stderr);
  return rep;
}

RateFit fit_rate(const std::vector<std::size_t>& horizons, const std::vector<double>& statistics) {
  if (horizons.size() != statistics.size()) {
    throw InvalidArgument("rate fit: horizons and statistics differ in length");
  }
  if (horizons.size() < 4) throw InvalidArgument("rate fit: need at least 4 horizons");
  const auto [mn, mx] = std::minmax_element(horizons.begin(), horizons.end());
  if (*mn < 1 || static_cast<double>(*mx) < 100.0 * static_cast<double>(*mn)) {
    throw InvalidArgument("rate fit: horizons must span at least two decades");
  }
  for (double s : statistics) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw InvalidArgument("rate fit: statistics must be positive and finite");
    }
  }
  const std::size_t m = horizons.size();
  std::vector<double> x(m), y(m);
  for (std::size_t i = 0; i < m; ++i) {
    x[i] = std::log(static_cast<double>(horizons[i]));
    y[i] = std::log(statistics[i]);
  }
  const double mx_ = pairwise_sum(x) / static_cast<double>(m);
  const double my = pairwise_sum(y) / static_cast<double>(m);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (x[i] - mx_) * (x[i] - mx_);
    sxy += (x[i] - mx_) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx_;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

RateReport run_rate(const ScenarioConfig& cfg, const RunOptions& opts) {
  check_domination(cfg);
  const AmbiguitySet theta = cfg.theta();
  const auto horizons = require_horizons(cfg);
  if (cfg.replications < 1) throw ConfigError(cfg.name + ": replications must be >= 1");
  const double center = upper_mean(theta);
  const std::size_t H = horizons.size();
  const std::size_t reps = cfg.replications;

  RateReport best;
  bool have = false;
  for (const Strategy& strategy : scenario_strategies(cfg)) {
    // One slot per (replication, horizon), reduced in a fixed order afterwards.
    std::vector<double> slots(reps * H, 0.0);
    parallel_for(reps, opts.threads, [&](std::size_t begin, std::size_t end) {
      std::vector<double> scratch;
      for (std::size_t r = begin; r < end; ++r) {
        std::size_t next = 0;
        walk_path(theta, strategy, horizons.back(), cfg.seed, r, scratch,
                  [&](std::size_t j, double, double s, std::size_t) {
                    if (j == horizons[next]) {
                      const double nd = static_cast<double>(j);
                      slots[r * H + next] = std::abs(s - nd * center) / nd;
                      ++next;
                    }
                    return next < H;
                  });
      }
    });
    std::vector<double> stats(H);
    std::vector<double> column(reps);
    for (std::size_t h = 0; h < H; ++h) {
      for (std::size_t r = 0; r < reps; ++r) column[r] = slots[r * H + h];
      stats[h] = pairwise_sum(column) / static_cast<double>(reps);
    }
    if (!have || stats.back() > best.statistics.back()) {
      best.strategy = strategy.describe();
      best.statistics = std::move(stats);
      have = true;
    }
  }
  best.horizons = horizons;
  best.fit = fit_rate(best.horizons, best.statistics);
  best.target_slope = -(1.0 - 1.0 / cfg.r);
  const bool slope_ok = cfg.r == 1.0 ? best.fit.slope <= best.target_slope + 0.15
                                     : std::abs(best.fit.slope - best.target_slope) <= 0.15;
  best.pass = slope_ok && best.fit.r_squared >= 0.9;
  return best;
}

std::vector<AuditRow> run_audit(const ScenarioConfig& cfg, double tolerance) {
  const AmbiguitySet theta = cfg.theta();
  const auto phis = default_audit_catalog(theta);
  std::vector<AuditRow> out;
  for (const Strategy& strategy : scenario_strategies(cfg)) {
    const PathModel model{theta, strategy, std::max<std::size_t>(cfg.depth, 1), 1.0};
    const AuditReport rep = pseudo_independence_audit(model, phis, cfg.depth, tolerance);
    out.push_back({strategy.describe(), rep.max_violation, rep.nodes_checked, rep.passed});
  }
  return out;
}

}  // namespace sublln
