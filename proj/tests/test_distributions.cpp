#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "sublln/distributions.hpp"
#include "sublln/error.hpp"

using namespace sublln;

namespace {

const Distribution kPareto19 = Distribution::symmetric_pareto(1.9, 1.0);

}  // namespace

TEST(DistributionValidation, RejectsBadDiscrete) {
  EXPECT_THROW(Distribution::discrete({}), InvalidArgument);
  EXPECT_THROW(Distribution::discrete({{0.0, 0.5}, {1.0, 0.4}}), InvalidArgument);
  EXPECT_THROW(Distribution::discrete({{1.0, 0.5}, {0.0, 0.5}}), InvalidArgument);
  EXPECT_THROW(Distribution::discrete({{0.0, -0.1}, {1.0, 1.1}}), InvalidArgument);
  EXPECT_THROW(Distribution::discrete({{NAN, 1.0}}), InvalidArgument);
  EXPECT_NO_THROW(Distribution::discrete({{0.0, 0.3}, {1.0, 0.7}}));
}

TEST(DistributionValidation, RejectsBadPareto) {
  EXPECT_THROW(Distribution::symmetric_pareto(0.0, 1.0), InvalidArgument);
  EXPECT_THROW(Distribution::symmetric_pareto(1.9, 0.0), InvalidArgument);
  EXPECT_THROW(Distribution::symmetric_pareto(1.9, -1.0), InvalidArgument);
  EXPECT_THROW(Distribution::bernoulli(1.5), InvalidArgument);
}

TEST(ParetoTail, ClosedForm) {
  EXPECT_DOUBLE_EQ(tail_prob(kPareto19, 2.0), 0.5 * std::pow(2.0, -1.9));
  EXPECT_DOUBLE_EQ(tail_prob(kPareto19, 0.5), 0.5);
  EXPECT_DOUBLE_EQ(tail_prob(kPareto19, -3.0), 1.0 - 0.5 * std::pow(3.0, -1.9));
  EXPECT_DOUBLE_EQ(lower_tail_prob(kPareto19, -2.0), 0.5 * std::pow(2.0, -1.9));
  EXPECT_DOUBLE_EQ(abs_tail_prob(kPareto19, 4.0), std::pow(4.0, -1.9));
  EXPECT_DOUBLE_EQ(abs_tail_prob(kPareto19, 0.5), 1.0);
  EXPECT_DOUBLE_EQ(abs_tail_prob(kPareto19, 0.0), 1.0);
}

TEST(ParetoTail, TailsAreComplementary) {
  const Distribution d = Distribution::shifted(Distribution::scaled(kPareto19, 1.5), -0.7);
  for (double t : {-10.0, -2.3, -0.7, 0.0, 0.8, 3.0, 25.0}) {
    EXPECT_NEAR(tail_prob(d, t) + lower_tail_prob(d, t), 1.0, 1e-15) << t;
  }
}

TEST(Canonical, WrappersFold) {
  const Distribution d = Distribution::shifted(Distribution::scaled(kPareto19, -2.0), 0.5);
  ASSERT_FALSE(d.is_discrete());
  EXPECT_DOUBLE_EQ(d.pareto().scale, 2.0);
  EXPECT_DOUBLE_EQ(d.pareto().offset, 0.5);
  EXPECT_DOUBLE_EQ(d.tail_index(), 1.9);
  const Distribution zero = Distribution::scaled(kPareto19, 0.0);
  EXPECT_TRUE(zero.is_discrete());
  EXPECT_EQ(zero.atoms().size(), 1u);
  const Distribution b = Distribution::scaled(Distribution::bernoulli(0.25), 4.0);
  ASSERT_EQ(b.atoms().size(), 2u);
  EXPECT_EQ(b.atoms()[1].value, 4.0);
  EXPECT_EQ(b.atoms()[1].prob, 0.25);
}

TEST(Expectation, DiscreteExact) {
  const Distribution d = Distribution::discrete({{-1.0, 0.25}, {0.5, 0.5}, {3.0, 0.25}});
  EXPECT_DOUBLE_EQ(expect(d, TestFunction::clamp(-0.5, 2.0)), 0.25 * -0.5 + 0.5 * 0.5 + 0.25 * 2.0);
  EXPECT_DOUBLE_EQ(mean(d), 0.25 * -1.0 + 0.25 + 0.75);
  EXPECT_DOUBLE_EQ(abs_excess(d, 1.0), 0.25 * 2.0);
  EXPECT_DOUBLE_EQ(clamped_second_moment(d, 2.0), 0.25 * 1.0 + 0.5 * 0.25 + 0.25 * 4.0);
}

// Frozen values below come from the inverse-cdf oracle and were cross-checked
// with 30-digit adaptive quadrature.
TEST(Expectation, SmoothedIndicatorOnShiftedPareto) {
  const Distribution d = Distribution::shifted(kPareto19, 0.3);
  const TestFunction f = TestFunction::indicator_smoothed(1.5, 1.0);
  constexpr double kFrozen = 0.198239427555017234;
  const double ref = oracle::pareto_expect(1.9, 1.0, 0.3, [&](double x) { return f(x); });
  EXPECT_NEAR(ref, kFrozen, 1e-6);
  EXPECT_NEAR(expect(d, f), kFrozen, 1e-9);
}

TEST(Expectation, ClampOnScaledShiftedPareto) {
  const Distribution d =
      Distribution::shifted(Distribution::scaled(Distribution::symmetric_pareto(2.5, 1.0), 2.0), -0.5);
  const TestFunction f = TestFunction::clamp(-2.0, 3.0);
  constexpr double kFrozen = 0.128693734850112589;
  const double ref = oracle::pareto_expect(2.5, 2.0, -0.5, [&](double x) { return f(x); });
  EXPECT_NEAR(ref, kFrozen, 1e-6);
  EXPECT_NEAR(expect(d, f), kFrozen, 1e-9);
}

TEST(Expectation, AbsExcessOnShiftedPareto) {
  const Distribution d = Distribution::shifted(kPareto19, 0.3);
  constexpr double kFrozen = 0.798808501800788592;
  const double ref = oracle::pareto_expect(
      1.9, 1.0, 0.3, [](double x) { return std::max(std::abs(x) - 1.5, 0.0); }, 4'000'000);
  EXPECT_NEAR(ref, kFrozen, 1e-5);
  EXPECT_NEAR(abs_excess(d, 1.5), kFrozen, 1e-9);
}

TEST(Expectation, ClampedPowerOnPareto) {
  const TestFunction f = TestFunction::power_clamped(1.5, 1e6);
  // 1 + (B^(1 - a/p) - 1) / (1 - a/p) with B = 1e6, a = 1.9, p = 1.5.
  const double k = 1.0 - 1.9 / 1.5;
  const double closed = 1.0 + (std::pow(1e6, k) - 1.0) / k;
  const double ref = oracle::pareto_expect(1.9, 1.0, 0.0, [&](double x) { return f(x); });
  EXPECT_NEAR(ref, closed, 1e-6);
  EXPECT_NEAR(expect(kPareto19, f), ref, 1e-6);
}

TEST(Expectation, CenteredParetoClosedForms) {
  // E[(|X| - c)^+] = s^a c^(1-a) / (a - 1) for c >= s.
  EXPECT_NEAR(abs_excess(kPareto19, 2.0), 0.595429701409051758, 1e-13);
  // E[min(X^2, c^2)] = s^2 + s^a (c^(2-a) - s^(2-a)) / (1 - a/2).
  EXPECT_NEAR(clamped_second_moment(kPareto19, 3.0), 3.32246348067808869, 1e-9);
  EXPECT_NEAR(clamped_mean(kPareto19, 7.0), 0.0, 1e-12);
  EXPECT_NEAR(mean(Distribution::shifted(kPareto19, 0.25)), 0.25, 1e-12);
}

TEST(Expectation, HeavyTailsAreNotIntegrable) {
  const Distribution d = Distribution::symmetric_pareto(0.9, 1.0);
  EXPECT_THROW((void)mean(d), NonIntegrable);
  EXPECT_THROW((void)abs_excess(d, 1.0), NonIntegrable);
  EXPECT_NO_THROW((void)expect(d, TestFunction::clamp(-1.0, 1.0)));
}

TEST(Sampling, ScaledDrawIsExactMultiple) {
  const Distribution base = Distribution::symmetric_pareto(1.9, 1.0);
  const Distribution d = Distribution::scaled(base, 0.5);
  for (std::uint64_t step = 1; step < 200; ++step) {
    const auto w = random_words(9, 3, step);
    EXPECT_EQ(d.draw(w), 0.5 * base.draw(w));
  }
}

TEST(Sampling, ParetoKolmogorovSmirnov) {
  constexpr std::size_t n = 20000;
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = sample(kPareto19, 123, 0, i + 1);
  std::sort(xs.begin(), xs.end());
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double cdf = lower_tail_prob(kPareto19, xs[i]);
    d = std::max({d, std::abs(cdf - static_cast<double>(i + 1) / n),
                  std::abs(cdf - static_cast<double>(i) / n)});
  }
  // 1% critical value 1.63 / sqrt(n).
  EXPECT_LT(d, 1.63 / std::sqrt(static_cast<double>(n)));
}

TEST(Sampling, DiscreteFrequencies) {
  const Distribution d = Distribution::discrete({{-1.0, 0.2}, {0.0, 0.3}, {2.0, 0.5}});
  constexpr std::size_t n = 50000;
  double counts[3] = {0, 0, 0};
  for (std::size_t i = 0; i < n; ++i) {
    const double x = sample(d, 5, 1, i);
    counts[x < 0 ? 0 : (x == 0 ? 1 : 2)] += 1;
  }
  const double probs[3] = {0.2, 0.3, 0.5};
  double chi2 = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double e = probs[k] * n;
    chi2 += (counts[k] - e) * (counts[k] - e) / e;
  }
  EXPECT_LT(chi2, 9.21);  // 1% critical value, 2 degrees of freedom
}

TEST(Sampling, ZeroProbabilityAtomsNeverDrawn) {
  const Distribution d = Distribution::discrete({{0.0, 0.0}, {1.0, 1.0}, {2.0, 0.0}});
  for (std::uint64_t i = 0; i < 1000; ++i) EXPECT_EQ(sample(d, 1, 0, i), 1.0);
}

TEST(TestFunctions, SmoothedIndicatorSandwich) {
  const TestFunction f = TestFunction::indicator_smoothed(0.5, 0.25);
  for (double x = -1.0; x <= 2.0; x += 0.01) {
    const double lo = x >= 0.75 ? 1.0 : 0.0;
    const double hi = x >= 0.5 ? 1.0 : 0.0;
    EXPECT_LE(lo, f(x));
    EXPECT_LE(f(x), hi);
  }
  EXPECT_DOUBLE_EQ(f.lipschitz_constant(), 4.0);
}

TEST(TestFunctions, CombinationLimitsAndBounds) {
  const TestFunction f = 2.0 * TestFunction::clamp(-1.0, 1.0) + TestFunction::power_clamped(2.0, 4.0);
  EXPECT_DOUBLE_EQ(f(10.0), 2.0 + 4.0);
  EXPECT_DOUBLE_EQ(f.limit_at_pos_inf(), 6.0);
  EXPECT_DOUBLE_EQ(f.limit_at_neg_inf(), 2.0);
  EXPECT_DOUBLE_EQ(f.sup_bound(), 6.0);
  for (double x = -5.0; x < 5.0; x += 0.37) {
    EXPECT_LE(std::abs(f(x + 0.01) - f(x)), f.lipschitz_constant() * 0.01 + 1e-12);
  }
}

TEST(Describe, Strings) {
  EXPECT_EQ(describe(kPareto19), "pareto(1.9,1)");
  EXPECT_EQ(describe(Distribution::bernoulli(0.3)), "discrete[0:0.7;1:0.3]");
  EXPECT_EQ(describe(Distribution::scaled(kPareto19, 0.5)), "scale(pareto(1.9,1),0.5)");
  EXPECT_EQ(describe(Distribution::shifted(kPareto19, -1)), "shift(pareto(1.9,1),-1)");
}

TEST(JumpPoints, ParetoAndDiscrete) {
  const auto j = jump_points(Distribution::shifted(kPareto19, 1.0));
  ASSERT_EQ(j.size(), 2u);
  EXPECT_EQ(j[0], 0.0);
  EXPECT_EQ(j[1], 2.0);
  EXPECT_EQ(jump_points(Distribution::bernoulli(0.5)).size(), 2u);
}
