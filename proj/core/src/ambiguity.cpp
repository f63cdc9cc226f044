#include "sublln/ambiguity.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "quadrature.hpp"
#include "sublln/error.hpp"

namespace sublln {
namespace {

enum class Envelope { upper, lower };

double pick(Envelope env, double a, double b) {
  return env == Envelope::upper ? std::max(a, b) : std::min(a, b);
}

Envelope opposite(Envelope env) {
  return env == Envelope::upper ? Envelope::lower : Envelope::upper;
}

template <class F>
double envelope_over(const AmbiguitySet& theta, Envelope env, F&& per_member) {
  double acc = per_member(theta[0]);
  for (std::size_t i = 1; i < theta.size(); ++i) acc = pick(env, acc, per_member(theta[i]));
  return acc;
}

void sort_unique(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

// P(|X|^r >= t) for a discrete law, comparing the transformed values directly.
double discrete_power_tail(const Distribution& d, double r, double t) {
  double p = 0.0;
  for (const auto& a : d.atoms()) {
    if (std::pow(std::abs(a.value), r) >= t) p += a.prob;
  }
  return p;
}

double choquet_discrete(const AmbiguitySet& theta, const ChoquetTransform& tr, Envelope env) {
  std::vector<double> values;
  for (const auto& m : theta.members()) {
    for (const auto& a : m.atoms()) {
      values.push_back(tr.kind == ChoquetTransform::Kind::identity
                           ? a.value
                           : std::pow(std::abs(a.value), tr.r));
    }
  }
  sort_unique(values);

  double positive = 0.0;
  double prev = 0.0;
  for (double v : values) {
    if (v <= 0.0) continue;
    const double level =
        tr.kind == ChoquetTransform::Kind::identity
            ? envelope_over(theta, env, [v](const Distribution& d) { return tail_prob(d, v); })
            : envelope_over(theta, env,
                            [&](const Distribution& d) { return discrete_power_tail(d, tr.r, v); });
    positive += (v - prev) * level;
    prev = v;
  }
  if (tr.kind == ChoquetTransform::Kind::abs_power) return positive;

  // On (r_{i-1}, r_i] below zero, V(X >= t) - 1 = -env'(P(X < r_i)).
  double negative = 0.0;
  std::vector<double> grid;
  for (double v : values) {
    if (v < 0.0) grid.push_back(v);
  }
  grid.push_back(0.0);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double r = grid[i];
    const double below = envelope_over(theta, opposite(env),
                                       [r](const Distribution& d) { return lower_tail_prob(d, r); });
    negative -= (grid[i] - grid[i - 1]) * below;
  }
  return positive + negative;
}

double choquet_numeric(const AmbiguitySet& theta, const ChoquetTransform& tr, Envelope env) {
  const double beta = theta.min_tail_index() / tr.r;
  if (!(beta > 1.0)) {
    throw NonIntegrable("Choquet integral diverges: tail index " +
                        std::to_string(theta.min_tail_index()) + " <= order " +
                        std::to_string(tr.r));
  }
  std::vector<double> pos_splits;
  std::vector<double> neg_splits;
  for (const auto& m : theta.members()) {
    for (double x : jump_points(m)) {
      if (tr.kind == ChoquetTransform::Kind::identity) {
        if (x > 0.0) pos_splits.push_back(x);
        if (x < 0.0) neg_splits.push_back(-x);
      } else {
        pos_splits.push_back(std::pow(std::abs(x), tr.r));
      }
    }
  }
  sort_unique(pos_splits);
  sort_unique(neg_splits);

  if (tr.kind == ChoquetTransform::Kind::abs_power) {
    const double inv_r = 1.0 / tr.r;
    const detail::Integrand tail = [&](double t) {
      const double x = std::pow(t, inv_r);
      return envelope_over(theta, env, [x](const Distribution& d) { return abs_tail_prob(d, x); });
    };
    return detail::integrate_to_infinity(tail, 0.0, beta, pos_splits);
  }

  const detail::Integrand upper_tail = [&](double t) {
    return envelope_over(theta, env, [t](const Distribution& d) { return tail_prob(d, t); });
  };
  const detail::Integrand lower_tail = [&](double t) {
    return envelope_over(theta, opposite(env),
                         [t](const Distribution& d) { return lower_tail_prob(d, -t); });
  };
  return detail::integrate_to_infinity(upper_tail, 0.0, beta, pos_splits) -
         detail::integrate_to_infinity(lower_tail, 0.0, beta, neg_splits);
}

double choquet(const AmbiguitySet& theta, const ChoquetTransform& tr, Envelope env) {
  if (theta.all_discrete()) return choquet_discrete(theta, tr, env);
  return choquet_numeric(theta, tr, env);
}

// Discontinuities of t -> V(X >= t): every atom of a discrete member.
std::vector<double> tail_jumps(const AmbiguitySet& theta) {
  std::vector<double> out;
  for (const auto& m : theta.members()) {
    if (!m.is_discrete()) continue;
    for (const auto& a : m.atoms()) {
      if (a.prob > 0.0) out.push_back(a.value);
    }
  }
  sort_unique(out);
  return out;
}

}  // namespace

AmbiguitySet::AmbiguitySet(std::vector<Distribution> members) : members_(std::move(members)) {
  if (members_.empty()) throw InvalidArgument("ambiguity set must have at least one member");
}

bool AmbiguitySet::all_discrete() const noexcept {
  return std::all_of(members_.begin(), members_.end(),
                     [](const Distribution& d) { return d.is_discrete(); });
}

double AmbiguitySet::min_tail_index() const noexcept {
  double a = std::numeric_limits<double>::infinity();
  for (const auto& m : members_) a = std::min(a, m.tail_index());
  return a;
}

std::string describe(const AmbiguitySet& theta) {
  std::string out = "{";
  for (std::size_t i = 0; i < theta.size(); ++i) {
    if (i) out += '|';
    out += describe(theta[i]);
  }
  return out + '}';
}

double upper_expectation(const AmbiguitySet& theta, const TestFunction& f) {
  return envelope_over(theta, Envelope::upper, [&f](const Distribution& d) { return expect(d, f); });
}

double lower_expectation(const AmbiguitySet& theta, const TestFunction& f) {
  return envelope_over(theta, Envelope::lower, [&f](const Distribution& d) { return expect(d, f); });
}

double upper_mean(const AmbiguitySet& theta) {
  return envelope_over(theta, Envelope::upper, [](const Distribution& d) { return mean(d); });
}

double lower_mean(const AmbiguitySet& theta) {
  return envelope_over(theta, Envelope::lower, [](const Distribution& d) { return mean(d); });
}

double probability(const Distribution& dist, const HalfLineEvent& event) {
  if (event.variable == HalfLineEvent::Variable::value) {
    return event.complement ? lower_tail_prob(dist, event.threshold)
                            : tail_prob(dist, event.threshold);
  }
  const double p = abs_tail_prob(dist, event.threshold);
  return event.complement ? 1.0 - p : p;
}

CapacityPair marginal_capacity(const AmbiguitySet& theta, const HalfLineEvent& event) {
  const auto prob = [&event](const Distribution& d) { return probability(d, event); };
  return {envelope_over(theta, Envelope::upper, prob), envelope_over(theta, Envelope::lower, prob)};
}

ChoquetTransform ChoquetTransform::abs_power(double r) {
  if (!(std::isfinite(r) && r > 0.0)) throw InvalidArgument("abs_power: r must be > 0");
  return {Kind::abs_power, r};
}

double choquet_upper(const AmbiguitySet& theta, const ChoquetTransform& transform) {
  return choquet(theta, transform, Envelope::upper);
}

double choquet_lower(const AmbiguitySet& theta, const ChoquetTransform& transform) {
  return choquet(theta, transform, Envelope::lower);
}

AgreementReport capacity_agreement(const AmbiguitySet& x_family, const AmbiguitySet& y_family,
                                   std::span<const double> grid) {
  AgreementReport report;
  auto jumps = tail_jumps(x_family);
  const auto more = tail_jumps(y_family);
  jumps.insert(jumps.end(), more.begin(), more.end());
  sort_unique(jumps);

  bool ok = true;
  for (double x : grid) {
    AgreementPoint pt{};
    pt.x = x;
    pt.upper_x = marginal_capacity(x_family, HalfLineEvent::at_least(x)).upper;
    pt.upper_y = marginal_capacity(y_family, HalfLineEvent::at_least(x)).upper;
    pt.equal = pt.upper_x == pt.upper_y;
    pt.at_jump = std::binary_search(jumps.begin(), jumps.end(), x);
    if (!pt.equal && !pt.at_jump) ok = false;
    report.points.push_back(pt);
  }
  try {
    report.choquet_x = choquet_upper(x_family, ChoquetTransform::identity());
    report.choquet_y = choquet_upper(y_family, ChoquetTransform::identity());
    if (std::abs(*report.choquet_x - *report.choquet_y) > 1e-9) ok = false;
  } catch (const NonIntegrable&) {
    report.choquet_x.reset();
    report.choquet_y.reset();
  }
  report.passed = ok;
  return report;
}

DominationCondition::DominationCondition(double constant, Distribution dominating, double order_r)
    : constant_(constant), dominating_(std::move(dominating)), order_(order_r), moment_(0.0) {
  if (!(std::isfinite(constant_) && constant_ >= 1.0)) {
    throw InvalidArgument("domination: constant C must be >= 1");
  }
  if (!(order_ >= 1.0 && order_ < 2.0)) {
    throw InvalidArgument("domination: order r must lie in [1, 2)");
  }
  if (!(dominating_.tail_index() > order_)) {
    throw NonIntegrable("domination: C_V(|X|^r) is infinite (tail index " +
                        std::to_string(dominating_.tail_index()) + " <= r)");
  }
  moment_ = choquet_upper(AmbiguitySet({dominating_}), ChoquetTransform::abs_power(order_));
}

double verify_domination(const DominationCondition& cond, const AmbiguitySet& theta,
                         std::size_t grid_size) {
  if (grid_size < 2) throw InvalidArgument("verify_domination: grid_size must be >= 2");

  std::vector<double> marks;
  const auto add_marks = [&marks](const Distribution& d) {
    for (double x : jump_points(d)) {
      if (x != 0.0) marks.push_back(std::abs(x));
    }
  };
  for (const auto& m : theta.members()) add_marks(m);
  add_marks(cond.dominating());
  sort_unique(marks);

  const double smallest = marks.empty() ? 1.0 : std::min(1.0, marks.front());
  const double largest = marks.empty() ? 1.0 : std::max(1.0, marks.back());
  const double lo = std::log(1e-3 * smallest);
  const double hi = std::log(1e6 * largest);

  std::vector<double> grid{0.0};
  for (std::size_t i = 0; i < grid_size; ++i) {
    grid.push_back(std::exp(lo + (hi - lo) * static_cast<double>(i) /
                                     static_cast<double>(grid_size - 1)));
  }
  // Tails are left-continuous; the gap can peak at a jump or just past it.
  for (double m : marks) {
    grid.push_back(m);
    grid.push_back(std::nextafter(m, std::numeric_limits<double>::infinity()));
  }

  double worst = -std::numeric_limits<double>::infinity();
  for (double t : grid) {
    const double upper = marginal_capacity(theta, HalfLineEvent::magnitude_at_least(t)).upper;
    worst = std::max(worst, upper - cond.constant() * abs_tail_prob(cond.dominating(), t));
  }
  return worst;
}

}  // namespace sublln
