#include "sublln/truncation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/special_functions/zeta.hpp>

#include "sublln/error.hpp"
#include "sublln/parallel.hpp"
#include "sublln/summation.hpp"

namespace sublln {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Exact finite sums of remaining nonzero terms are only attempted up to this many terms.
constexpr std::size_t kMaxExactTail = 10'000'000;

template <class F>
double max_over(const AmbiguitySet& theta, F&& f) {
  double best = f(theta[0]);
  for (std::size_t i = 1; i < theta.size(); ++i) best = std::max(best, f(theta[i]));
  return best;
}

double moment_or_inf(const DominationCondition& dom, double r) {
  try {
    return choquet_upper(AmbiguitySet({dom.dominating()}), ChoquetTransform::abs_power(r));
  } catch (const NonIntegrable&) {
    return kInf;
  }
}

// sum_{j > n} j^(-beta) <= int_n^inf x^(-beta) dx, for beta > 1 and n >= 1.
double power_tail_sum(double beta, std::size_t n) {
  return std::pow(static_cast<double>(n), 1.0 - beta) / (beta - 1.0);
}

double max_abs_atom(const Distribution& d) {
  double m = 0.0;
  for (const auto& a : d.atoms()) {
    if (a.prob > 0.0) m = std::max(m, std::abs(a.value));
  }
  return m;
}

// Bound on sum_{j > n} term(j) when the dominating law is discrete: terms
// vanish once the clamp level passes the support, so sum the rest exactly.
template <class Term>
double discrete_tail(const TruncationScheme& scheme, const Distribution& dom, std::size_t n,
                     Term&& term) {
  const double reach = max_abs_atom(dom);
  NeumaierSum s;
  for (std::size_t j = n + 1;; ++j) {
    if (scheme.level(j) > reach) break;
    if (j - n > kMaxExactTail) return kInf;
    s.add(term(j));
  }
  return s.value();
}

bool centered_pareto(const Distribution& d) { return !d.is_discrete() && d.pareto().offset == 0.0; }

void fill_partial_sums(SeriesReport& rep) {
  NeumaierSum s;
  rep.partial_sums.reserve(rep.terms.size());
  for (double t : rep.terms) {
    s.add(t);
    rep.partial_sums.push_back(s.value());
  }
}

}  // namespace

TruncationScheme::TruncationScheme(double r) : r_(r) {
  if (!(r >= 1.0 && r < 2.0)) {
    throw InvalidArgument("truncation order r must lie in [1, 2), got " + std::to_string(r));
  }
}

double TruncationScheme::level(std::size_t j) const {
  if (j < 1) throw InvalidArgument("truncation step must be >= 1");
  return r_ == 1.0 ? static_cast<double>(j) : std::pow(static_cast<double>(j), 1.0 / r_);
}

double TruncationScheme::truncate(double x, std::size_t j) const {
  const double c = level(j);
  return std::clamp(x, -c, c);
}

DecompositionTerms decomposition_terms(const SamplePath& path, const AmbiguitySet& theta,
                                       const TruncationScheme& scheme, Center center) {
  const std::size_t n = path.values.size();
  if (n == 0) throw InvalidArgument("decomposition: empty path");
  const double mean_hi = upper_mean(theta);
  const double mean_lo = lower_mean(theta);
  const double mean_x = center == Center::upper ? mean_hi : mean_lo;

  NeumaierSum t1, t2, t3, t2_lo, t2_hi, t3_bound, stat;
  for (std::size_t j = 1; j <= n; ++j) {
    const double x = path.values[j - 1];
    const double c = scheme.level(j);
    const double y = std::clamp(x, -c, c);
    double cy_hi = clamped_mean(theta[0], c);
    double cy_lo = cy_hi;
    double excess = abs_excess(theta[0], c);
    for (std::size_t k = 1; k < theta.size(); ++k) {
      const double m = clamped_mean(theta[k], c);
      cy_hi = std::max(cy_hi, m);
      cy_lo = std::min(cy_lo, m);
      excess = std::max(excess, abs_excess(theta[k], c));
    }
    const double cj = center == Center::upper ? cy_hi : cy_lo;
    t1.add(std::abs(x - y));
    t2.add(y - cj);
    t2_lo.add(y - cy_hi);
    t2_hi.add(y - cy_lo);
    t3.add(std::abs(cj - mean_x));
    t3_bound.add(excess);
    stat.add(x - mean_x);
  }
  const double norm = 1.0 / scheme.level(n);
  DecompositionTerms out;
  out.t1 = norm * t1.value();
  out.t2 = norm * t2.value();
  out.t3 = norm * t3.value();
  out.t2_conditional_lo = norm * t2_lo.value();
  out.t2_conditional_hi = norm * t2_hi.value();
  out.t3_bound = norm * t3_bound.value();
  out.statistic = norm * stat.value();
  return out;
}

SeriesReport step1_series(const AmbiguitySet& theta, const TruncationScheme& scheme,
                          const DominationCondition& domination, std::size_t n_terms) {
  if (n_terms < 1) throw InvalidArgument("series: need at least one term");
  const double r = scheme.order();
  const double C = domination.constant();
  const Distribution& dom = domination.dominating();
  SeriesReport rep;
  rep.terms.reserve(n_terms);

  const auto excess_at = [&](std::size_t j) {
    const double c = scheme.level(j);
    try {
      return max_over(theta, [c](const Distribution& d) { return abs_excess(d, c); });
    } catch (const NonIntegrable&) {
      return kInf;
    }
  };

  if (r == 1.0) {
    // Cesaro route: E[(|X_j| - j)^+] -> 0 and so do its running averages.
    const auto term_bound = [&](std::size_t j) {
      const double t = static_cast<double>(j);
      try {
        return C * (abs_tail_prob(dom, t) + abs_excess(dom, t));
      } catch (const NonIntegrable&) {
        return kInf;
      }
    };
    NeumaierSum s;
    for (std::size_t j = 1; j <= n_terms; ++j) {
      rep.terms.push_back(excess_at(j));
      rep.term_bounds.push_back(term_bound(j));
      s.add(rep.terms.back());
      rep.partial_sums.push_back(s.value() / static_cast<double>(j));
      rep.remainders.push_back(term_bound(j + 1));
    }
    rep.closed_form_bound = rep.term_bounds.front();
    rep.converged = std::isfinite(rep.closed_form_bound);
    return rep;
  }

  for (std::size_t j = 1; j <= n_terms; ++j) rep.terms.push_back(excess_at(j) / scheme.level(j));
  fill_partial_sums(rep);
  const double moment = moment_or_inf(domination, r);
  rep.closed_form_bound = 2.0 * C / (r - 1.0) * moment;
  rep.converged = std::isfinite(rep.closed_form_bound);

  const double beta = dom.tail_index() / r;
  for (std::size_t n = 1; n <= n_terms; ++n) {
    double rem = kInf;
    if (dom.is_discrete()) {
      rem = discrete_tail(scheme, dom, n, [&](std::size_t j) {
        const double c = scheme.level(j);
        return C * abs_excess(dom, c) / c;
      });
    } else if (centered_pareto(dom) && scheme.level(n + 1) >= dom.pareto().scale) {
      const ParetoLaw& law = dom.pareto();
      rem = C * std::pow(law.scale, law.alpha) / (law.alpha - 1.0) * power_tail_sum(beta, n);
    }
    rep.remainders.push_back(rem);
  }
  return rep;
}

SeriesReport step2_series(const AmbiguitySet& theta, const TruncationScheme& scheme,
                          const DominationCondition& domination, std::size_t n_terms) {
  if (n_terms < 1) throw InvalidArgument("series: need at least one term");
  const double r = scheme.order();
  const double C = domination.constant();
  const Distribution& dom = domination.dominating();
  SeriesReport rep;
  rep.terms.reserve(n_terms);
  for (std::size_t j = 1; j <= n_terms; ++j) {
    const double c = scheme.level(j);
    const double m2 =
        max_over(theta, [c](const Distribution& d) { return clamped_second_moment(d, c); });
    rep.terms.push_back(m2 / (c * c));
  }
  fill_partial_sums(rep);

  const double s = 2.0 / r;
  rep.closed_form_bound =
      (1.0 + 4.0 * C) * boost::math::zeta(s) + 8.0 * r * C / (2.0 - r) * moment_or_inf(domination, r);
  rep.converged = std::isfinite(rep.closed_form_bound);

  for (std::size_t n = 1; n <= n_terms; ++n) {
    double rem = kInf;
    if (dom.is_discrete()) {
      double m2 = 0.0;
      for (const auto& a : dom.atoms()) m2 += a.prob * a.value * a.value;
      rem = C * m2 * power_tail_sum(s, n);
    } else if (centered_pareto(dom)) {
      const ParetoLaw& law = dom.pareto();
      const double a = law.alpha;
      const double sc = law.scale;
      if (a > 2.0) {
        rem = C * a * sc * sc / (a - 2.0) * power_tail_sum(s, n);
      } else if (a < 2.0) {
        // E[min(X^2, c^2)] <= s^2 + s^a c^(2-a) / (1 - a/2)
        rem = C * (sc * sc * power_tail_sum(s, n) +
                   std::pow(sc, a) / (1.0 - a / 2.0) * power_tail_sum(a / r, n));
      }
    }
    rep.remainders.push_back(rem);
  }
  return rep;
}

double second_moment_indicator_bound(const TruncationScheme& scheme,
                                     const DominationCondition& domination, std::size_t j) {
  const double r = scheme.order();
  NeumaierSum s;
  for (std::size_t i = 1; i <= j; ++i) {
    const double di = static_cast<double>(i);
    s.add(std::pow(di, 2.0 / r - 1.0) * abs_tail_prob(domination.dominating(), scheme.level(i)));
  }
  return 1.0 + 4.0 * domination.constant() * s.value();
}

double step1_comparison_slack(double r, std::size_t i) {
  if (!(r > 1.0) || i < 2) throw InvalidArgument("step1 comparison needs r > 1 and i >= 2");
  double lhs = 0.0;
  for (std::size_t j = 1; j < i; ++j) lhs += std::pow(static_cast<double>(j), -1.0 / r);
  const double rhs = r / (r - 1.0) * std::pow(static_cast<double>(i), 1.0 - 1.0 / r);
  return rhs - lhs;
}

double step2_comparison_slack(double r, std::size_t i) {
  if (!(r >= 1.0 && r < 2.0) || i < 2) {
    throw InvalidArgument("step2 comparison needs r in [1, 2) and i >= 2");
  }
  const double s = 2.0 / r;
  double head = 0.0;
  for (std::size_t j = 1; j < i; ++j) head += std::pow(static_cast<double>(j), -s);
  const double lhs = boost::math::zeta(s) - head;
  const double rhs = r / (2.0 - r) * std::pow(static_cast<double>(i - 1), 1.0 - s);
  return rhs - lhs;
}

SeriesReport borel_cantelli_series(const AmbiguitySet& theta, const TruncationScheme& scheme,
                                   const DominationCondition& domination, std::size_t n_terms) {
  if (n_terms < 1) throw InvalidArgument("series: need at least one term");
  const double r = scheme.order();
  const double C = domination.constant();
  const Distribution& dom = domination.dominating();
  SeriesReport rep;
  rep.terms.reserve(n_terms);
  for (std::size_t j = 1; j <= n_terms; ++j) {
    const double c = scheme.level(j);
    rep.terms.push_back(max_over(theta, [c](const Distribution& d) { return abs_tail_prob(d, c); }));
  }
  fill_partial_sums(rep);
  rep.closed_form_bound = C * moment_or_inf(domination, r);
  rep.converged = std::isfinite(rep.closed_form_bound);

  for (std::size_t n = 1; n <= n_terms; ++n) {
    double rem = kInf;
    if (dom.is_discrete()) {
      rem = discrete_tail(scheme, dom, n,
                          [&](std::size_t j) { return C * abs_tail_prob(dom, scheme.level(j)); });
    } else if (centered_pareto(dom) && scheme.level(n + 1) >= dom.pareto().scale) {
      const ParetoLaw& law = dom.pareto();
      rem = C * std::pow(law.scale, law.alpha) * power_tail_sum(law.alpha / r, n);
    }
    rep.remainders.push_back(rem);
  }
  return rep;
}

ClampActivity clamp_activity(const PathModel& model, std::uint64_t seed, std::size_t replications,
                             std::size_t threads) {
  model.validate();
  const TruncationScheme scheme(model.truncation_r);
  const std::size_t n = model.horizon;
  std::vector<double> levels(n);
  for (std::size_t j = 1; j <= n; ++j) levels[j - 1] = scheme.level(j);

  ClampActivity out;
  out.counts.assign(replications, 0);
  parallel_for(replications, threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> scratch;
    for (std::size_t rep = begin; rep < end; ++rep) {
      std::uint64_t count = 0;
      walk_path(model.theta, model.strategy, n, seed, rep, scratch,
                [&](std::size_t j, double x, double, std::size_t) {
                  if (std::abs(x) >= levels[j - 1]) ++count;
                  return true;
                });
      out.counts[rep] = count;
    }
  });

  std::uint64_t total = 0;
  for (auto c : out.counts) total += c;
  out.mean_count = replications ? static_cast<double>(total) / static_cast<double>(replications) : 0.0;

  NeumaierSum mean, var;
  for (std::size_t j = 1; j <= n; ++j) {
    const double c = levels[j - 1];
    const double p = max_over(model.theta, [c](const Distribution& d) { return abs_tail_prob(d, c); });
    mean.add(p);
    var.add(p * (1.0 - p));
  }
  out.expected_count = mean.value();
  out.count_variance = var.value();
  return out;
}

BorelCantelliReport borel_cantelli_budget(const PathModel& model,
                                          const DominationCondition& domination,
                                          std::size_t n_terms, std::uint64_t seed,
                                          std::size_t replications, std::size_t threads) {
  BorelCantelliReport out;
  out.series = borel_cantelli_series(model.theta, TruncationScheme(model.truncation_r), domination,
                                     n_terms);
  out.activity = clamp_activity(model, seed, replications, threads);
  return out;
}

KroneckerReport kronecker_check(std::span<const double> x, std::span<const double> b,
                                double tolerance) {
  if (x.size() != b.size() || x.empty()) {
    throw InvalidArgument("kronecker: x and b must be nonempty and of equal length");
  }
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (!(b[i] > 0.0) || (i > 0 && !(b[i] > b[i - 1]))) {
      throw InvalidArgument("kronecker: b must be positive and strictly increasing");
    }
  }
  KroneckerReport rep;
  NeumaierSum weighted, plain;
  for (std::size_t i = 0; i < x.size(); ++i) {
    weighted.add(x[i] / b[i]);
    plain.add(x[i]);
    rep.weighted_partial_sums.push_back(weighted.value());
    rep.normalized_sums.push_back(plain.value() / b[i]);
  }
  const std::size_t n = x.size();
  const std::size_t half = (n + 1) / 2;
  const std::size_t tenth = (n + 9) / 10;
  rep.series_converged =
      std::abs(rep.weighted_partial_sums[n - 1] - rep.weighted_partial_sums[half - 1]) <= tolerance;
  const double last = std::abs(rep.normalized_sums[n - 1]);
  rep.normalized_to_zero = last <= tolerance && last <= std::abs(rep.normalized_sums[tenth - 1]);
  rep.consistent = !rep.series_converged || rep.normalized_to_zero;
  return rep;
}

}  // namespace sublln
