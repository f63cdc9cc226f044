// sublln: scenario-driven experiments for laws of large numbers under
// sublinear expectations.
//
// Exit codes: 0 pass, 1 a checked property failed, 2 bad usage or config.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "sublln/ambiguity.hpp"
#include "sublln/capacity.hpp"
#include "sublln/config.hpp"
#include "sublln/error.hpp"
#include "sublln/harness.hpp"
#include "sublln/report.hpp"
#include "sublln/truncation.hpp"

namespace {

using namespace sublln;

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> reps;
  std::string out;
  std::string format = "csv";
  std::size_t threads = 1;
  bool timing = false;
};

ScenarioConfig load(const Common& c) {
  ScenarioConfig cfg = load_scenario(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (c.reps) cfg.replications = *c.reps;
  return cfg;
}

// Writes the report to --out, else the scenario's "output", else stdout.
void emit(const Common& c, const ScenarioConfig& cfg, const std::string& body) {
  const std::string path = !c.out.empty() ? c.out : cfg.output;
  if (path.empty() || path == "-") {
    std::cout << body;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError(path + ": cannot open output file");
  f << body;
}

int verdict(bool ok, const std::string& what) {
  std::cerr << (ok ? "PASS " : "FAIL ") << what << '\n';
  return ok ? kPass : kFail;
}

std::string fixed12(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

int cmd_choquet(const Common& c) {
  const ScenarioConfig cfg = load(c);
  const AmbiguitySet theta = cfg.theta();
  double up = INFINITY, lo = INFINITY;
  bool finite = true;
  try {
    up = choquet_upper(theta, cfg.transform);
    lo = choquet_lower(theta, cfg.transform);
  } catch (const NonIntegrable& e) {
    std::cerr << e.what() << '\n';
    finite = false;
  }
  const std::string name = cfg.transform.kind == ChoquetTransform::Kind::identity
                               ? "identity"
                               : "abs_power(" + fixed12(cfg.transform.r) + ")";
  std::ostringstream os;
  if (parse_format(c.format) == Format::csv) {
    os << "transform,choquet_upper,choquet_lower\n"
       << name << ',' << fixed12(up) << ',' << fixed12(lo) << '\n';
  } else {
    os << "{\"transform\": \"" << name << "\", \"choquet_upper\": "
       << (finite ? fixed12(up) : "\"inf\"") << ", \"choquet_lower\": "
       << (finite ? fixed12(lo) : "\"inf\"") << "}\n";
  }
  emit(c, cfg, os.str());
  return verdict(finite, "choquet integral finite");
}

int cmd_series(const Common& c, const std::string& kind, std::size_t terms) {
  const ScenarioConfig cfg = load(c);
  const AmbiguitySet theta = cfg.theta();
  const std::size_t N = terms ? terms : (cfg.N ? cfg.N : 10000);
  const Format fmt = parse_format(c.format);
  const auto at = report_points(N);
  std::ostringstream os;

  if (kind == "kronecker") {
    const Strategy strategy = cfg.strategy ? *cfg.strategy : Strategy::constant(0);
    const SamplePath path = simulate(PathModel{theta, strategy, N, cfg.r}, cfg.seed, 0);
    const TruncationScheme scheme(cfg.r);
    const double center = upper_mean(theta);
    std::vector<double> x(N), b(N);
    for (std::size_t j = 1; j <= N; ++j) {
      x[j - 1] = path.values[j - 1] - center;
      b[j - 1] = scheme.level(j);
    }
    const KroneckerReport rep = kronecker_check(x, b);
    write_kronecker(os, rep, at, fmt);
    emit(c, cfg, os.str());
    return verdict(rep.consistent, "kronecker consistency");
  }

  check_domination(cfg);
  const DominationCondition dom = cfg.domination_or_default();
  const TruncationScheme scheme(cfg.r);
  SeriesReport rep;
  if (kind == "step1") {
    rep = step1_series(theta, scheme, dom, N);
  } else if (kind == "step2") {
    rep = step2_series(theta, scheme, dom, N);
  } else {
    rep = borel_cantelli_series(theta, scheme, dom, N);
  }
  write_series(os, rep, at, fmt);
  emit(c, cfg, os.str());
  return verdict(rep.converged && rep.partial_sums.back() <= rep.closed_form_bound,
                 kind + " partial sum within bound");
}

std::vector<ExperimentRow> capacity_rows(const ScenarioConfig& cfg, const CapacityEstimate& est,
                                         const AmbiguitySet& theta) {
  double hi = NAN, lo = NAN;
  if (theta.min_tail_index() > 1.0) {
    hi = upper_mean(theta);
    lo = lower_mean(theta);
  }
  return {{cfg.name, est.horizon, est.event.name(), est.method, est.value, est.mc_stderr, hi, lo,
           0.0}};
}

int cmd_capacity(const Common& c, const std::string& mode) {
  const ScenarioConfig cfg = load(c);
  const AmbiguitySet theta = cfg.theta();
  if (!cfg.event) throw ConfigError(c.config + ": capacity needs an \"event\"");
  const std::size_t n = cfg.n ? cfg.n : (cfg.horizons.empty() ? 0 : cfg.horizons.front());
  if (n == 0) throw ConfigError(c.config + ": capacity needs \"n\" or \"horizons\"");
  const PathEvent event = resolve_event(*cfg.event, theta, cfg.r, cfg.epsilon);
  const CapacityEstimate est =
      mode == "exact"
          ? exact_upper_prob(theta, n, event)
          : search_upper_prob(theta, n, event, cfg.family, cfg.replications, cfg.seed, c.threads);
  std::ostringstream os;
  write_rows(os, capacity_rows(cfg, est, theta), parse_format(c.format));
  emit(c, cfg, os.str());
  return kPass;
}

int cmd_wlln(const Common& c) {
  const ScenarioConfig cfg = load(c);
  const WllnReport rep = run_wlln(cfg, {c.threads, c.timing});
  std::ostringstream os;
  write_rows(os, rep.rows, parse_format(c.format));
  emit(c, cfg, os.str());
  return verdict(rep.monotone, "upper probability non-increasing beyond burn-in");
}

int cmd_slln(const Common& c) {
  const ScenarioConfig cfg = load(c);
  const SllnReport rep = run_slln(cfg, {c.threads, c.timing});
  std::ostringstream os;
  write_slln(os, rep, parse_format(c.format));
  emit(c, cfg, os.str());
  return verdict(rep.passed, "exceedance fraction non-increasing in n0");
}

int cmd_kolmogorov(const Common& c) {
  const ScenarioConfig cfg = load(c);
  const KolmogorovReport rep = run_kolmogorov(cfg, {c.threads, c.timing});
  std::ostringstream os;
  write_rows(os, rep.rows, parse_format(c.format));
  emit(c, cfg, os.str());
  return verdict(rep.passed, "band lower probability does not decrease");
}

int cmd_rate(const Common& c) {
  const ScenarioConfig cfg = load(c);
  RateReport rep;
  try {
    rep = run_rate(cfg, {c.threads, c.timing});
  } catch (const InvalidArgument& e) {
    std::cerr << "rate fit refused: " << e.what() << '\n';
    return kFail;
  }
  std::ostringstream os;
  write_rate(os, rep, parse_format(c.format));
  emit(c, cfg, os.str());
  return verdict(rep.pass, "rate slope within tolerance of -(1 - 1/r)");
}

int cmd_audit(const Common& c) {
  const ScenarioConfig cfg = load(c);
  const auto rows = run_audit(cfg);
  std::ostringstream os;
  write_audit(os, rows, parse_format(c.format));
  emit(c, cfg, os.str());
  bool ok = true;
  for (const auto& r : rows) ok = ok && r.passed;
  return verdict(ok, "pseudo-independence audit");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Laws of large numbers under sublinear expectations"};
  app.require_subcommand(1);
  app.fallthrough();

  Common common;
  app.add_option("--config", common.config, "Scenario JSON file")->required();
  app.add_option("--seed", common.seed, "Override the scenario seed");
  app.add_option("--reps", common.reps, "Override the replication count");
  app.add_option("--out", common.out, "Output path (default: scenario output or stdout)");
  app.add_option("--format", common.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--threads", common.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--timing", common.timing, "Record wall_ms (otherwise 0 for stable output)");

  auto* choquet = app.add_subcommand("choquet", "Choquet integrals of the configured transform");
  std::string series_kind;
  std::size_t terms = 0;
  auto* series = app.add_subcommand("series", "Proof series against their closed-form bounds");
  series->add_option("kind", series_kind)
      ->required()
      ->check(CLI::IsMember({"step1", "step2", "borel-cantelli", "kronecker"}));
  series->add_option("--terms", terms, "Number of terms N");
  std::string capacity_mode;
  auto* capacity = app.add_subcommand("capacity", "Upper probability of the configured event");
  capacity->add_option("mode", capacity_mode)->required()->check(CLI::IsMember({"exact", "search"}));
  auto* wlln = app.add_subcommand("wlln", "Weak law: deviation upper probabilities by horizon");
  auto* slln = app.add_subcommand("slln", "Strong law: exceedance fractions by start index");
  auto* kolmogorov = app.add_subcommand("kolmogorov", "Lower probability of the mean band");
  auto* rate = app.add_subcommand("rate", "Convergence rate fit");
  auto* audit = app.add_subcommand("audit", "Pseudo-independence audit of the strategy family");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    if (*choquet) return cmd_choquet(common);
    if (*series) return cmd_series(common, series_kind, terms);
    if (*capacity) return cmd_capacity(common, capacity_mode);
    if (*wlln) return cmd_wlln(common);
    if (*slln) return cmd_slln(common);
    if (*kolmogorov) return cmd_kolmogorov(common);
    if (*rate) return cmd_rate(common);
    if (*audit) return cmd_audit(common);
  } catch (const sublln::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
