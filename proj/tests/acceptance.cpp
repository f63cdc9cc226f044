// Acceptance gate. Usage: acceptance <criterion 1-10> <sublln binary> <scenario dir>
// Prints one "PASS criterion k: ..." or "FAIL criterion k: ..." line and
// exits 0 or 1 accordingly.

#include <algorithm>
#include <array>
#include <cfloat>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "oracles.hpp"
#include "sublln/ambiguity.hpp"
#include "sublln/capacity.hpp"
#include "sublln/config.hpp"
#include "sublln/harness.hpp"
#include "sublln/sequences.hpp"
#include "sublln/summation.hpp"
#include "sublln/truncation.hpp"

using namespace sublln;
namespace fs = std::filesystem;

namespace {

std::string g_cli;
fs::path g_scenarios;

class Clock {
 public:
  [[nodiscard]] double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string num(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

int verdict(int k, bool ok, const std::string& detail) {
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << k << ": " << detail << std::endl;
  return ok ? 0 : 1;
}

bool in_time(const Clock& c, double limit, std::string& detail) {
  const double s = c.seconds();
  detail += " [" + num(s) + " s, limit " + num(limit) + " s]";
  return s <= limit;
}

Distribution random_law(std::mt19937_64& g, const std::vector<double>& support) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Atom> atoms;
  double used = 0.0;
  std::vector<double> w(support.size());
  double total = 0.0;
  for (auto& x : w) total += (x = u(g) + 0.01);
  for (std::size_t i = 0; i < support.size(); ++i) {
    const double p = i + 1 == support.size() ? 1.0 - used : w[i] / total;
    used += p;
    atoms.push_back({support[i], p});
  }
  return Distribution::discrete(std::move(atoms));
}

PathEvent random_event(std::mt19937_64& g, const AmbiguitySet& theta) {
  std::uniform_real_distribution<double> eps(0.05, 1.0), t(-3.0, 3.0), r(1.0, 1.9);
  const double hi = upper_mean(theta);
  const double lo = lower_mean(theta);
  switch (g() % 5) {
    case 0: return PathEvent::upper_dev(eps(g), r(g), hi);
    case 1: return PathEvent::lower_dev(eps(g), r(g), lo);
    case 2: return PathEvent::union_dev(eps(g), r(g), hi, lo);
    case 3: return PathEvent::band(lo, hi, eps(g));
    default: return PathEvent::custom_threshold(t(g));
  }
}

int criterion1() {
  const Clock c;
  const double v =
      choquet_upper(AmbiguitySet({Distribution::symmetric_pareto(1.9, 1.0)}), ChoquetTransform::abs_power(1.5));
  const double err = std::abs(v - 1.9 / (1.9 - 1.5));
  std::string d = "choquet_upper = " + num(v) + ", |error| = " + num(err) + " (tol 1e-6)";
  const bool t = in_time(c, 1.0, d);
  return verdict(1, err <= 1e-6 && t, d);
}

int criterion2() {
  const Clock c;
  std::mt19937_64 g(2);
  std::uniform_int_distribution<int> k(1, 3), atoms(1, 4), n(1, 10);
  std::uniform_real_distribution<double> v(-2.0, 2.0);
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<Distribution> members;
    const int K = k(g);
    for (int i = 0; i < K; ++i) {
      std::vector<double> sup;
      const int A = atoms(g);
      for (int a = 0; a < A; ++a) sup.push_back(std::round(v(g) * 4.0) / 4.0);
      std::sort(sup.begin(), sup.end());
      sup.erase(std::unique(sup.begin(), sup.end()), sup.end());
      members.push_back(random_law(g, sup));
    }
    const AmbiguitySet theta(std::move(members));
    const PathEvent ev = random_event(g, theta);
    const std::size_t h = static_cast<std::size_t>(n(g));
    const double up = exact_upper_prob(theta, h, ev).value;
    const double low_c = exact_lower_prob(theta, h, ev.complement()).value;
    worst = std::max(worst, std::abs(up + low_c - 1.0));
  }
  std::string d = "max |V(A) + nu(A^c) - 1| over 500 cases = " + num(worst) +
                  " (rounding tol 64 eps = " + num(64 * DBL_EPSILON) + ")";
  const bool t = in_time(c, 10.0, d);
  return verdict(2, worst <= 64 * DBL_EPSILON && t, d);
}

int criterion3() {
  const Clock c;
  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> v(-2.0, 2.0);
  std::uniform_int_distribution<int> n(1, 3);
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 200; ++trial) {
    double a = std::round(v(g) * 4.0) / 4.0;
    double b = std::round(v(g) * 4.0) / 4.0;
    if (a == b) b += 0.5;
    if (a > b) std::swap(a, b);
    const AmbiguitySet theta({random_law(g, {a, b}), random_law(g, {a, b})});
    const PathEvent ev = random_event(g, theta);
    const std::size_t h = static_cast<std::size_t>(n(g));
    std::vector<oracle::Law> laws;
    for (const auto& m : theta.members()) laws.push_back(oracle::law_of(m));
    const oracle::StrategyEnumerator brute(laws, h, ev);
    if (exact_upper_prob(theta, h, ev).value != brute.extreme(true)) ++mismatches;
    if (exact_lower_prob(theta, h, ev).value != brute.extreme(false)) ++mismatches;
  }
  std::string d = std::to_string(mismatches) + " mismatches over 200 cases (upper and lower)";
  const bool t = in_time(c, 30.0, d);
  return verdict(3, mismatches == 0 && t, d);
}

int criterion4() {
  const Clock c;
  const ScenarioConfig cfg = load_scenario(g_scenarios / "pareto19.json");
  const AmbiguitySet theta = cfg.theta();
  const DominationCondition dom = cfg.domination_or_default();
  const TruncationScheme scheme(cfg.r);
  constexpr std::size_t N = 10000;
  const auto s1 = step1_series(theta, scheme, dom, N);
  const auto s2 = step2_series(theta, scheme, dom, N);
  const auto bc = borel_cantelli_series(theta, scheme, dom, N);
  const double b1 = 9.5;
  const double b2 = 5.0 * std::riemann_zeta(4.0 / 3.0) + 24.0 * 4.75;
  const double b3 = 4.75;
  const double p1 = s1.partial_sums.back();
  const double p2 = s2.partial_sums.back();
  const double p3 = bc.partial_sums.back();
  bool ok = p1 < b1 && p2 < b2 && p3 < b3;
  ok = ok && p1 < s1.closed_form_bound && p2 < s2.closed_form_bound && p3 < bc.closed_form_bound;
  std::size_t cmp_fail = 0;
  for (std::size_t i = 2; i <= 50; ++i) {
    if (!(step1_comparison_slack(cfg.r, i) >= 0.0)) ++cmp_fail;
    if (!(step2_comparison_slack(cfg.r, i) >= 0.0)) ++cmp_fail;
  }
  ok = ok && cmp_fail == 0;
  std::string d = "step1 " + num(p1) + " < " + num(b1) + " (implemented bound " +
                  num(s1.closed_form_bound) + "), step2 " + num(p2) + " < " + num(b2) +
                  ", borel-cantelli " + num(p3) + " < " + num(b3) + ", comparison failures " +
                  std::to_string(cmp_fail) + "/98";
  const bool t = in_time(c, 60.0, d);
  return verdict(4, ok && t, d);
}

int criterion5() {
  const Clock c;
  const ScenarioConfig a = load_scenario(g_scenarios / "bern_pair.json");
  const auto ra = run_wlln(a);
  bool strict = ra.rows.size() == 3;
  for (std::size_t i = 1; i < ra.rows.size(); ++i) {
    strict = strict && ra.rows[i].value < ra.rows[i - 1].value &&
             ra.rows[i].method == CapacityMethod::exact_dp;
  }
  std::string d = "(a) exact V at n=4,8,12: ";
  for (const auto& row : ra.rows) d += num(row.value) + " ";
  d += strict ? "(strictly decreasing)" : "(NOT strictly decreasing)";

  const ScenarioConfig cc = load_scenario(g_scenarios / "pareto19.json");
  const auto rc = run_wlln(cc);
  const double first = rc.rows.front().value;
  const double last = rc.rows.back().value;
  const bool small = rc.rows.back().n == 100000 && rc.rows.front().n == 1000 && last <= 0.05 &&
                     last <= 0.5 * first;
  d += "; (c) search V at n=1e3,1e4,1e5: ";
  for (const auto& row : rc.rows) d += num(row.value) + " ";
  d += "(need <= 0.05 and <= half of n=1e3 value)";
  const bool t = in_time(c, 300.0, d);
  return verdict(5, strict && small && t, d);
}

int criterion6() {
  const Clock c;
  ScenarioConfig cfg = load_scenario(g_scenarios / "pareto19.json");
  cfg.N = 100000;
  cfg.checkpoints = {1000, 10000};
  cfg.delta = 0.1;
  cfg.replications = 200;
  const auto rep = run_slln(cfg);
  bool ok = !rep.strategies.empty();
  std::string d;
  for (const auto& s : rep.strategies) {
    const auto& c0 = s.checkpoints[0];
    const auto& c1 = s.checkpoints[1];
    const bool dec = c1.frac_upper <= c0.frac_upper && c1.frac_lower <= c0.frac_lower;
    const bool low = c1.frac_upper <= 0.02 && c1.frac_lower <= 0.02;
    ok = ok && dec && low;
    d += s.strategy + ": upper " + num(c0.frac_upper) + " -> " + num(c1.frac_upper) + ", lower " +
         num(c0.frac_lower) + " -> " + num(c1.frac_lower) + " ";
  }
  d += "(need decreasing and <= 0.02 at n0=1e4)";
  const bool t = in_time(c, 300.0, d);
  return verdict(6, ok && t, d);
}

int criterion7() {
  const Clock c;
  const ScenarioConfig cfg = load_scenario(g_scenarios / "pareto19_rate.json");
  const auto rep = run_rate(cfg);
  const bool ok = std::abs(rep.fit.slope - (-1.0 / 3.0)) <= 0.15 && rep.fit.r_squared >= 0.9;
  std::string d = "slope " + num(rep.fit.slope) + " (target -1/3 +- 0.15), r^2 " +
                  num(rep.fit.r_squared) + " (>= 0.9), strategy " + rep.strategy;
  const bool t = in_time(c, 600.0, d);
  return verdict(7, ok && t, d);
}

int criterion8() {
  const Clock c;
  const ScenarioConfig cfg = load_scenario(g_scenarios / "bern_pair.json");
  const auto rows = run_audit(cfg, 1e-12);
  double worst = -INFINITY;
  bool all = !rows.empty();
  for (const auto& row : rows) {
    worst = std::max(worst, row.max_violation);
    all = all && row.passed;
  }
  const AmbiguitySet theta = cfg.theta();
  const auto phis = default_audit_catalog(theta);
  // Follows the set until step 4, then emits a point mass at 3.
  const Kernel injected = [&theta](std::span<const double> h, std::size_t step) {
    return step == 4 ? Distribution::point_mass(3.0) : theta[h.size() % 2];
  };
  const auto bad = audit_kernel(theta, injected, phis, cfg.depth, 1e-12);
  const bool detected = !bad.passed && bad.max_violation >= 0.5;
  std::string d = std::to_string(rows.size()) + " family strategies, max violation " + num(worst) +
                  " (<= 1e-12); injected kernel violation " + num(bad.max_violation) + " (>= 0.5)";
  const bool t = in_time(c, 30.0, d);
  return verdict(8, all && worst <= 1e-12 && detected && t, d);
}

// Classical reference: plain i.i.d. draws of the single law, summed in order.
struct ReferencePath {
  std::vector<double> sup_upper, inf_lower;
  std::vector<bool> hits;  // per horizon
  double final_abs = 0.0;
};

ReferencePath reference_path(const Distribution& law, std::size_t N, const std::vector<std::size_t>& cps,
                             double r, double mu, double eps, const std::vector<std::size_t>& horizons,
                             std::uint64_t seed, std::uint64_t rep) {
  ReferencePath out;
  out.sup_upper.assign(cps.size(), -INFINITY);
  out.inf_lower.assign(cps.size(), INFINITY);
  const PathEvent ev = PathEvent::union_dev(eps, r, mu, mu);
  NeumaierSum s;
  for (std::size_t j = 1; j <= N; ++j) {
    s.add(sample(law, seed, rep, j));
    const double nd = static_cast<double>(j);
    const double norm = r == 1.0 ? nd : std::pow(nd, 1.0 / r);
    for (std::size_t k = 0; k < cps.size(); ++k) {
      if (j >= cps[k]) {
        out.sup_upper[k] = std::max(out.sup_upper[k], (s.value() - nd * mu) / norm);
        out.inf_lower[k] = std::min(out.inf_lower[k], (s.value() - nd * mu) / norm);
      }
    }
    for (std::size_t h : horizons) {
      if (h == j) out.hits.push_back(ev.contains(j, s.value()));
    }
  }
  return out;
}

int criterion9() {
  const Clock c;
  std::size_t compared = 0;
  std::size_t differ = 0;
  std::string d;
  for (const char* name : {"uniform_pm1.json", "pareto19.json"}) {
    ScenarioConfig cfg = load_scenario(g_scenarios / name);
    cfg.replications = 100;
    cfg.N = 10000;
    cfg.checkpoints = {100, 1000};
    cfg.horizons = {1000, 10000};
    const AmbiguitySet theta = cfg.theta();
    const double mu = upper_mean(theta);
    const auto strategies = scenario_strategies(cfg);
    const PathEvent ev = PathEvent::union_dev(cfg.epsilon, cfg.r, mu, lower_mean(theta));
    const auto counts =
        count_hits(theta, strategies, cfg.horizons, ev, cfg.replications, cfg.seed, 1);
    std::vector<std::uint64_t> ref_counts(cfg.horizons.size(), 0);
    std::vector<std::uint64_t> ref_up(cfg.checkpoints.size(), 0);
    for (std::size_t rep = 0; rep < cfg.replications; ++rep) {
      const auto ex = path_extremes(theta, strategies[0], cfg.N, cfg.checkpoints, cfg.r, mu, mu,
                                    cfg.seed, rep);
      const auto ref = reference_path(theta[0], cfg.N, cfg.checkpoints, cfg.r, mu, cfg.epsilon,
                                      cfg.horizons, cfg.seed, rep);
      for (std::size_t k = 0; k < cfg.checkpoints.size(); ++k) {
        ++compared;
        if (ex.sup_upper[k] != ref.sup_upper[k] || ex.inf_lower[k] != ref.inf_lower[k]) ++differ;
        ref_up[k] += ref.sup_upper[k] > cfg.delta;
      }
      for (std::size_t h = 0; h < cfg.horizons.size(); ++h) ref_counts[h] += ref.hits[h];
    }
    const bool same_counts =
        strategies.size() == 1 && std::equal(ref_counts.begin(), ref_counts.end(), counts[0].begin());
    if (!same_counts) ++differ;
    const auto slln = run_slln(cfg);
    for (std::size_t k = 0; k < cfg.checkpoints.size(); ++k) {
      if (slln.strategies[0].checkpoints[k].frac_upper !=
          static_cast<double>(ref_up[k]) / static_cast<double>(cfg.replications)) {
        ++differ;
      }
    }
    d += std::string(name) + (same_counts ? " hit counts equal; " : " hit counts differ; ");
  }
  d += std::to_string(differ) + " differences over " + std::to_string(compared) +
       " path statistics plus verdict fractions";
  const bool t = in_time(c, 60.0, d);
  return verdict(9, differ == 0 && t, d);
}

std::string run_capture(const std::string& cmd, int& status) {
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) {
    status = -1;
    return out;
  }
  std::array<char, 4096> buf{};
  std::size_t got;
  while ((got = std::fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), got);
  status = pclose(p);
  return out;
}

int criterion10() {
  const Clock c;
  const std::string s = g_scenarios.string() + "/";
  const std::vector<std::string> jobs = {
      "wlln --config " + s + "pareto_pair.json",
      "slln --config " + s + "pareto_pair.json",
      "kolmogorov --config " + s + "bern_band.json --reps 2000",
      "capacity search --config " + s + "bern_pair.json --reps 4000",
      "rate --config " + s + "pareto19_rate.json --reps 20",
  };
  bool ok = true;
  std::string d;
  for (const auto& job : jobs) {
    std::string first;
    bool same = true;
    for (int threads : {1, 4, 8}) {
      int status = 0;
      const std::string out =
          run_capture(g_cli + " " + job + " --threads " + std::to_string(threads) + " 2>/dev/null", status);
      if (out.empty() || WEXITSTATUS(status) == 2) same = false;
      if (threads == 1) {
        first = out;
      } else if (out != first) {
        same = false;
      }
    }
    ok = ok && same;
    d += job.substr(0, job.find(' ')) + (same ? " identical; " : " DIFFERS; ");
  }
  d += "threads {1,4,8}";
  return verdict(10, ok, d);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 4) {
    std::cerr << "usage: acceptance <criterion> <sublln binary> <scenario dir>\n";
    return 2;
  }
  const int k = std::atoi(argv[1]);
  g_cli = argv[2];
  g_scenarios = argv[3];
  try {
    switch (k) {
      case 1: return criterion1();
      case 2: return criterion2();
      case 3: return criterion3();
      case 4: return criterion4();
      case 5: return criterion5();
      case 6: return criterion6();
      case 7: return criterion7();
      case 8: return criterion8();
      case 9: return criterion9();
      case 10: return criterion10();
      default: break;
    }
  } catch (const std::exception& e) {
    return verdict(k, false, std::string("error: ") + e.what());
  }
  std::cerr << "unknown criterion " << k << "\n";
  return 2;
}
