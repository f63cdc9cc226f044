#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "sublln/config.hpp"
#include "sublln/error.hpp"
#include "sublln/harness.hpp"
#include "sublln/report.hpp"
#include "sublln/summation.hpp"

using namespace sublln;

namespace {

const std::filesystem::path kScenarios = SUBLLN_SCENARIO_DIR;

ScenarioConfig scenario(const std::string& json) { return parse_scenario(json, "inline.json"); }

const char* kUniform = R"({"name": "u", "theta": [{"kind": "discrete", "support": [[-1, 0.5], [1, 0.5]]}],
  "r": 1, "epsilon": 0.5, "horizons": [1000], "replications": 1000, "seed": 4})";

}  // namespace

TEST(Wlln, PointMassAtZeroNeverDeviates) {
  const auto cfg = scenario(R"({"theta": [{"kind": "point", "value": 0}], "epsilon": 0.01,
                                "horizons": [5, 200, 1000], "replications": 100})");
  const auto rep = run_wlln(cfg);
  ASSERT_EQ(rep.rows.size(), 3u);
  for (const auto& row : rep.rows) EXPECT_EQ(row.value, 0.0);
  EXPECT_EQ(rep.rows[0].method, CapacityMethod::exact_dp);
  EXPECT_EQ(rep.rows[2].method, CapacityMethod::strategy_search);
  EXPECT_TRUE(rep.monotone);
}

TEST(Wlln, UniformSignsConcentrate) {
  const auto rep = run_wlln(scenario(kUniform));
  EXPECT_LE(rep.rows[0].value, 0.01);
  EXPECT_EQ(rep.rows[0].center_hi, 0.0);
}

TEST(Wlln, BernoulliPairExactAtTwelve) {
  auto cfg = load_scenario(kScenarios / "bern_pair.json");
  const auto rep = run_wlln(cfg);
  ASSERT_EQ(rep.rows.size(), 3u);
  const auto direct = exact_upper_prob(cfg.theta(), 12, PathEvent::union_dev(0.2, 1.0, 0.7, 0.3));
  EXPECT_EQ(rep.rows[2].value, direct.value);
  EXPECT_EQ(rep.rows[2].method, CapacityMethod::exact_dp);
}

TEST(Wlln, RefusesUndominatedScenario) {
  const auto cfg = scenario(R"({"theta": [{"kind": "point", "value": 3}, {"kind": "bernoulli", "p": 0.5}],
    "domination": {"C": 1, "dominating": {"kind": "bernoulli", "p": 0.5}}, "horizons": [5]})");
  EXPECT_THROW((void)run_wlln(cfg), DominationViolation);
}

TEST(Slln, PointMassHasZeroStatistic) {
  const auto cfg = scenario(R"({"theta": [{"kind": "point", "value": 2.5}], "r": 1.5, "N": 1000,
                                "checkpoints": [10, 100], "replications": 20})");
  const auto rep = run_slln(cfg);
  ASSERT_EQ(rep.strategies.size(), 1u);
  for (const auto& cp : rep.strategies[0].checkpoints) {
    EXPECT_EQ(cp.frac_upper, 0.0);
    EXPECT_EQ(cp.frac_lower, 0.0);
  }
  EXPECT_TRUE(rep.passed);
  const auto ex = path_extremes(cfg.theta(), Strategy::constant(0), 1000, {10, 100}, 1.5, 2.5, 2.5, 0, 0);
  EXPECT_EQ(ex.sup_upper[0], 0.0);
  EXPECT_EQ(ex.inf_lower[1], 0.0);
}

TEST(Slln, ExtremesMatchClassicalReference) {
  const AmbiguitySet theta({Distribution::discrete({{-1.0, 0.5}, {1.0, 0.5}})});
  const std::vector<std::size_t> cps = {50, 400, 1500};
  for (std::uint64_t rep = 0; rep < 5; ++rep) {
    const auto ex = path_extremes(theta, Strategy::constant(0), 2000, cps, 1.5, 0.0, 0.0, 8, rep);
    // Independent draws through the public sampler, accumulated the same way.
    NeumaierSum s;
    std::vector<double> sup(cps.size(), -INFINITY), inf(cps.size(), INFINITY);
    for (std::size_t j = 1; j <= 2000; ++j) {
      s.add(sample(theta[0], 8, rep, j));
      const double v = s.value() / std::pow(static_cast<double>(j), 1.0 / 1.5);
      for (std::size_t k = 0; k < cps.size(); ++k) {
        if (j >= cps[k]) {
          sup[k] = std::max(sup[k], v);
          inf[k] = std::min(inf[k], v);
        }
      }
    }
    for (std::size_t k = 0; k < cps.size(); ++k) {
      EXPECT_EQ(ex.sup_upper[k], sup[k]);
      EXPECT_EQ(ex.inf_lower[k], inf[k]);
    }
  }
}

TEST(Slln, RejectsBadCheckpoints) {
  const auto cfg = scenario(R"({"theta": [{"kind": "point", "value": 0}], "N": 100,
                                "checkpoints": [50, 200]})");
  EXPECT_THROW((void)run_slln(cfg), ConfigError);
}

TEST(Kolmogorov, BernoulliBandLowerProbabilityGrows) {
  const auto rep = run_kolmogorov(load_scenario(kScenarios / "bern_band.json"));
  ASSERT_EQ(rep.rows.size(), 2u);
  EXPECT_GE(rep.rows[1].value, rep.rows[0].value);
  EXPECT_TRUE(rep.passed);
}

TEST(Kolmogorov, SingletonReducesToClassicalWlln) {
  const auto cfg = scenario(R"({"theta": [{"kind": "discrete", "support": [[-1, 0.5], [1, 0.5]]}],
    "epsilon": 0.1, "horizons": [10000], "replications": 500, "seed": 3})");
  EXPECT_GE(run_kolmogorov(cfg).rows[0].value, 0.99);
}

TEST(Kolmogorov, EnormousBandIsCertain) {
  const auto cfg = scenario(R"({"theta": [{"kind": "bernoulli", "p": 0.3}, {"kind": "bernoulli", "p": 0.7}],
    "domination": {"C": 1, "dominating": {"kind": "bernoulli", "p": 0.7}},
    "epsilon": 5, "horizons": [3, 10, 300], "replications": 100})");
  for (const auto& row : run_kolmogorov(cfg).rows) EXPECT_EQ(row.value, 1.0);
}

TEST(Kolmogorov, RefusesInfiniteMean) {
  const auto cfg = scenario(R"({"theta": [{"kind": "pareto", "alpha": 0.9}], "horizons": [10]})");
  EXPECT_THROW((void)run_kolmogorov(cfg), ConfigError);
}

TEST(FitRate, ExactPowerLaw) {
  const std::vector<std::size_t> hs = {10, 100, 1000, 10000};
  std::vector<double> st;
  for (std::size_t h : hs) st.push_back(3.0 * std::pow(static_cast<double>(h), -0.4));
  const auto fit = fit_rate(hs, st);
  EXPECT_NEAR(fit.slope, -0.4, 1e-12);
  EXPECT_NEAR(fit.intercept, std::log(3.0), 1e-12);
  EXPECT_NEAR(fit.r_squared, 1.0, 1e-12);
}

TEST(FitRate, Refusals) {
  EXPECT_THROW((void)fit_rate({10, 100, 1000}, {1, 1, 1}), InvalidArgument);
  EXPECT_THROW((void)fit_rate({10, 20, 50, 99}, {1, 1, 1, 1}), InvalidArgument);
  EXPECT_THROW((void)fit_rate({10, 100, 1000, 10000}, {1, 0, 1, 1}), InvalidArgument);
  const auto cfg = scenario(R"({"theta": [{"kind": "point", "value": 1}],
                                "horizons": [10, 100, 1000, 10000], "replications": 10})");
  EXPECT_THROW((void)run_rate(cfg), InvalidArgument);
}

TEST(Rate, BoundedSingletonAtUnitOrder) {
  const auto cfg = scenario(R"({"theta": [{"kind": "discrete", "support": [[-1, 0.5], [1, 0.5]]}],
    "horizons": [100, 1000, 10000, 100000], "replications": 100, "seed": 5})");
  const auto rep = run_rate(cfg);
  EXPECT_NEAR(rep.fit.slope, -0.5, 0.1);
  EXPECT_EQ(rep.target_slope, 0.0);
  EXPECT_TRUE(rep.pass);
}

TEST(Audit, FamilyOnBernoulliPair) {
  const auto rows = run_audit(load_scenario(kScenarios / "bern_pair.json"));
  ASSERT_FALSE(rows.empty());
  for (const auto& row : rows) {
    EXPECT_TRUE(row.passed) << row.strategy;
    EXPECT_EQ(row.nodes, 255u);
  }
}

TEST(Determinism, ReportsIgnoreThreadCount) {
  auto cfg = load_scenario(kScenarios / "pareto_pair.json");
  cfg.horizons = {100, 1000};
  cfg.replications = 200;
  cfg.N = 1000;
  cfg.checkpoints = {100, 500};
  std::string first_w, first_s;
  for (std::size_t threads : {1u, 3u, 8u}) {
    std::ostringstream w, s;
    write_rows(w, run_wlln(cfg, {threads, false}).rows, Format::csv);
    write_slln(s, run_slln(cfg, {threads, false}), Format::csv);
    if (threads == 1) {
      first_w = w.str();
      first_s = s.str();
    } else {
      EXPECT_EQ(w.str(), first_w);
      EXPECT_EQ(s.str(), first_s);
    }
  }
  std::ostringstream rate1, rate4;
  auto rcfg = scenario(kUniform);
  rcfg.horizons = {10, 100, 1000, 5000};
  rcfg.replications = 50;
  write_rate(rate1, run_rate(rcfg, {1, false}), Format::json);
  write_rate(rate4, run_rate(rcfg, {4, false}), Format::json);
  EXPECT_EQ(rate1.str(), rate4.str());
}

TEST(Report, PointsAndHeaders) {
  EXPECT_EQ(report_points(120), (std::vector<std::size_t>{1, 2, 5, 10, 20, 50, 100, 120}));
  EXPECT_EQ(report_points(100), (std::vector<std::size_t>{1, 2, 5, 10, 20, 50, 100}));
  std::ostringstream os;
  write_rows(os, {}, Format::csv);
  EXPECT_EQ(os.str(), "scenario,n,event,method,value,stderr,center_hi,center_lo,wall_ms\n");
  EXPECT_THROW((void)parse_format("xml"), InvalidArgument);
}
