#include "sublln/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "format.hpp"
#include "quadrature.hpp"
#include "sublln/error.hpp"

namespace sublln {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgument(what);
}

bool finite(double x) { return std::isfinite(x); }

void sort_unique(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

// Merge atoms whose values coincide (possible after shift/scale rounding).
std::vector<Atom> normalized(std::vector<Atom> atoms) {
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.value < b.value; });
  std::vector<Atom> out;
  for (const auto& a : atoms) {
    if (!out.empty() && out.back().value == a.value) {
      out.back().prob += a.prob;
    } else {
      out.push_back(a);
    }
  }
  return out;
}

// E[h(b + s W)] for W symmetric Pareto(alpha, 1), where beyond |x - b| > window
// the caller supplies the closed-form contribution `outer`.
//
// The bounded part is integrated in y = log|x - b|, where the density
// alpha (s/x)^alpha dx/x becomes the smooth weight alpha (s e^-y)^alpha dy.
double pareto_window_integral(const ParetoLaw& law, const std::function<double(double)>& h,
                              std::span<const double> breakpoints, double window) {
  const double lo = std::log(law.scale);
  const double hi = std::log(window);
  if (!(hi > lo)) return 0.0;
  std::vector<double> splits;
  for (double x : breakpoints) {
    const double d = std::abs(x - law.offset);
    if (d > law.scale && d < window) splits.push_back(std::log(d));
  }
  const detail::Integrand f = [&](double y) {
    const double x = std::exp(y);
    const double w = law.alpha * std::exp(law.alpha * (lo - y));
    return 0.5 * (h(law.offset + x) + h(law.offset - x)) * w;
  };
  return detail::integrate(f, lo, hi, splits);
}

double window_for(const ParetoLaw& law, std::span<const double> breakpoints) {
  double window = law.scale;
  for (double x : breakpoints) window = std::max(window, std::abs(x - law.offset));
  return window;
}

double suffix_prob(std::span<const Atom> atoms, std::size_t first) {
  double p = 0.0;
  for (std::size_t i = first; i < atoms.size(); ++i) p += atoms[i].prob;
  return p;
}

}  // namespace

// ---------------------------------------------------------------------------
// TestFunction

TestFunction TestFunction::clamp(double lo, double hi) {
  require(finite(lo) && finite(hi) && lo <= hi, "clamp: need finite lo <= hi");
  return {Clamp{lo, hi}, lo < hi ? 1.0 : 0.0, std::max(std::abs(lo), std::abs(hi))};
}

TestFunction TestFunction::indicator_smoothed(double x0, double eps) {
  require(finite(x0) && finite(eps) && eps > 0.0, "indicator_smoothed: need eps > 0");
  return {IndicatorSmoothed{x0, eps}, 1.0 / eps, 1.0};
}

TestFunction TestFunction::affine_clamped(double slope, double intercept, double bound) {
  require(finite(slope) && finite(intercept) && finite(bound) && bound >= 0.0,
          "affine_clamped: need finite slope/intercept and bound >= 0");
  return {AffineClamped{slope, intercept, bound}, bound > 0.0 ? std::abs(slope) : 0.0, bound};
}

TestFunction TestFunction::power_clamped(double p, double bound) {
  require(finite(p) && p >= 1.0, "power_clamped: need p >= 1");
  require(finite(bound) && bound >= 0.0, "power_clamped: need bound >= 0");
  const double lip = bound > 0.0 ? p * std::pow(bound, (p - 1.0) / p) : 0.0;
  return {PowerClamped{p, bound}, lip, bound};
}

TestFunction TestFunction::combination(std::vector<Term> terms) {
  double lip = 0.0;
  double sup = 0.0;
  for (const auto& t : terms) {
    require(finite(t.weight), "combination: non-finite weight");
    lip += std::abs(t.weight) * t.f.lipschitz_constant();
    sup += std::abs(t.weight) * t.f.sup_bound();
  }
  return {Combination{std::make_shared<const std::vector<Term>>(std::move(terms))}, lip, sup};
}

double TestFunction::operator()(double x) const {
  return std::visit(
      Overloaded{
          [x](const Clamp& c) { return std::clamp(x, c.lo, c.hi); },
          [x](const IndicatorSmoothed& c) {
            if (x <= c.x0) return 0.0;
            if (x >= c.x0 + c.eps) return 1.0;
            return (x - c.x0) / c.eps;
          },
          [x](const AffineClamped& c) {
            return std::clamp(c.slope * x + c.intercept, -c.bound, c.bound);
          },
          [x](const PowerClamped& c) { return std::min(std::pow(std::abs(x), c.p), c.bound); },
          [x](const Combination& c) {
            double s = 0.0;
            for (const auto& t : *c.terms) s += t.weight * t.f(x);
            return s;
          },
      },
      rule_);
}

std::vector<double> TestFunction::breakpoints() const {
  std::vector<double> out = std::visit(
      Overloaded{
          [](const Clamp& c) { return std::vector<double>{c.lo, c.hi}; },
          [](const IndicatorSmoothed& c) { return std::vector<double>{c.x0, c.x0 + c.eps}; },
          [](const AffineClamped& c) {
            if (c.slope == 0.0) return std::vector<double>{};
            return std::vector<double>{(-c.bound - c.intercept) / c.slope,
                                       (c.bound - c.intercept) / c.slope};
          },
          [](const PowerClamped& c) {
            const double knee = std::pow(c.bound, 1.0 / c.p);
            return std::vector<double>{-knee, 0.0, knee};
          },
          [](const Combination& c) {
            std::vector<double> all;
            for (const auto& t : *c.terms) {
              const auto b = t.f.breakpoints();
              all.insert(all.end(), b.begin(), b.end());
            }
            return all;
          },
      },
      rule_);
  sort_unique(out);
  return out;
}

double TestFunction::limit_at_pos_inf() const {
  return std::visit(
      Overloaded{
          [](const Clamp& c) { return c.hi; },
          [](const IndicatorSmoothed&) { return 1.0; },
          [](const AffineClamped& c) {
            if (c.slope == 0.0) return std::clamp(c.intercept, -c.bound, c.bound);
            return c.slope > 0.0 ? c.bound : -c.bound;
          },
          [](const PowerClamped& c) { return c.bound; },
          [](const Combination& c) {
            double s = 0.0;
            for (const auto& t : *c.terms) s += t.weight * t.f.limit_at_pos_inf();
            return s;
          },
      },
      rule_);
}

double TestFunction::limit_at_neg_inf() const {
  return std::visit(
      Overloaded{
          [](const Clamp& c) { return c.lo; },
          [](const IndicatorSmoothed&) { return 0.0; },
          [](const AffineClamped& c) {
            if (c.slope == 0.0) return std::clamp(c.intercept, -c.bound, c.bound);
            return c.slope > 0.0 ? -c.bound : c.bound;
          },
          [](const PowerClamped& c) { return c.bound; },
          [](const Combination& c) {
            double s = 0.0;
            for (const auto& t : *c.terms) s += t.weight * t.f.limit_at_neg_inf();
            return s;
          },
      },
      rule_);
}

namespace {

std::vector<TestFunction::Term> flatten(double weight, const TestFunction& f) {
  if (const auto* c = std::get_if<TestFunction::Combination>(&f.rule())) {
    std::vector<TestFunction::Term> out;
    for (const auto& t : *c->terms) out.push_back({weight * t.weight, t.f});
    return out;
  }
  return {{weight, f}};
}

}  // namespace

TestFunction operator+(const TestFunction& f, const TestFunction& g) {
  auto terms = flatten(1.0, f);
  auto more = flatten(1.0, g);
  terms.insert(terms.end(), more.begin(), more.end());
  return TestFunction::combination(std::move(terms));
}

TestFunction operator*(double lambda, const TestFunction& f) {
  return TestFunction::combination(flatten(lambda, f));
}

// ---------------------------------------------------------------------------
// Distribution

Distribution::Distribution(Kind kind) : kind_(std::move(kind)) { canonicalize(); }

Distribution Distribution::discrete(std::vector<Atom> atoms) {
  require(!atoms.empty(), "discrete: empty support");
  double total = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    require(finite(atoms[i].value), "discrete: non-finite support value");
    require(finite(atoms[i].prob) && atoms[i].prob >= 0.0, "discrete: probabilities must be >= 0");
    if (i > 0) {
      require(atoms[i].value > atoms[i - 1].value,
              "discrete: support values must be strictly increasing");
    }
    total += atoms[i].prob;
  }
  require(std::abs(total - 1.0) <= 1e-12, "discrete: probabilities must sum to 1");
  return Distribution(Discrete{std::move(atoms)});
}

Distribution Distribution::symmetric_pareto(double alpha, double scale) {
  require(finite(alpha) && alpha > 0.0, "pareto: alpha must be > 0");
  require(finite(scale) && scale > 0.0, "pareto: scale must be > 0");
  return Distribution(SymmetricPareto{alpha, scale});
}

Distribution Distribution::shifted(Distribution base, double offset) {
  require(finite(offset), "shift: offset must be finite");
  return Distribution(Shifted{std::make_shared<const Distribution>(std::move(base)), offset});
}

Distribution Distribution::scaled(Distribution base, double factor) {
  require(finite(factor), "scale: factor must be finite");
  return Distribution(Scaled{std::make_shared<const Distribution>(std::move(base)), factor});
}

Distribution Distribution::bernoulli(double p) {
  require(finite(p) && p >= 0.0 && p <= 1.0, "bernoulli: p must be in [0, 1]");
  return discrete({{0.0, 1.0 - p}, {1.0, p}});
}

void Distribution::canonicalize() {
  std::visit(Overloaded{
                 [this](const Discrete& d) { atoms_ = d.atoms; },
                 [this](const SymmetricPareto& p) { pareto_ = ParetoLaw{p.alpha, p.scale, 0.0}; },
                 [this](const Shifted& s) {
                   if (s.base->is_discrete()) {
                     std::vector<Atom> moved(s.base->atoms().begin(), s.base->atoms().end());
                     for (auto& a : moved) a.value += s.offset;
                     atoms_ = normalized(std::move(moved));
                   } else {
                     ParetoLaw law = s.base->pareto();
                     law.offset += s.offset;
                     pareto_ = law;
                   }
                 },
                 [this](const Scaled& s) {
                   if (s.base->is_discrete()) {
                     std::vector<Atom> moved(s.base->atoms().begin(), s.base->atoms().end());
                     for (auto& a : moved) a.value *= s.factor;
                     atoms_ = normalized(std::move(moved));
                   } else if (s.factor == 0.0) {
                     atoms_ = {{0.0, 1.0}};
                   } else {
                     const ParetoLaw& base = s.base->pareto();
                     pareto_ = ParetoLaw{base.alpha, base.scale * std::abs(s.factor),
                                         base.offset * s.factor};
                   }
                 },
             },
             kind_);
  if (!pareto_) {
    cdf_.resize(atoms_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      acc += atoms_[i].prob;
      cdf_[i] = acc;
    }
  }
}

const ParetoLaw& Distribution::pareto() const {
  if (!pareto_) throw InvalidArgument("distribution is discrete; no Pareto canonical form");
  return *pareto_;
}

double Distribution::tail_index() const noexcept {
  return pareto_ ? pareto_->alpha : std::numeric_limits<double>::infinity();
}

double Distribution::draw(const RandomWords& words) const {
  return std::visit(
      Overloaded{
          [&](const Discrete&) {
            const double u = to_unit_closed_open(words.first);
            auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
            auto i = static_cast<std::size_t>(it - cdf_.begin());
            if (i >= atoms_.size()) {
              // u landed in the rounding gap above the last cumulative sum.
              i = atoms_.size() - 1;
              while (i > 0 && atoms_[i].prob == 0.0) --i;
            }
            return atoms_[i].value;
          },
          [&](const SymmetricPareto& p) {
            const double u = to_unit_open_closed(words.first);
            const double magnitude = p.scale * std::pow(u, -1.0 / p.alpha);
            return (words.second >> 63) != 0 ? -magnitude : magnitude;
          },
          [&](const Shifted& s) { return s.base->draw(words) + s.offset; },
          [&](const Scaled& s) { return s.factor * s.base->draw(words); },
      },
      kind_);
}

// ---------------------------------------------------------------------------
// Exact queries

double expect(const Distribution& dist, const TestFunction& f) {
  if (dist.is_discrete()) {
    double s = 0.0;
    for (const auto& a : dist.atoms()) s += a.prob * f(a.value);
    return s;
  }
  const ParetoLaw& law = dist.pareto();
  const auto bps = f.breakpoints();
  const double window = window_for(law, bps);
  const double inner = pareto_window_integral(
      law, [&f](double x) { return f(x); }, bps, window);
  const double outer_mass = std::pow(law.scale / window, law.alpha);
  return inner + 0.5 * (f.limit_at_pos_inf() + f.limit_at_neg_inf()) * outer_mass;
}

double tail_prob(const Distribution& dist, double t) {
  if (dist.is_discrete()) {
    const auto atoms = dist.atoms();
    const auto it = std::lower_bound(atoms.begin(), atoms.end(), t,
                                     [](const Atom& a, double v) { return a.value < v; });
    return suffix_prob(atoms, static_cast<std::size_t>(it - atoms.begin()));
  }
  const ParetoLaw& law = dist.pareto();
  const double v = (t - law.offset) / law.scale;
  if (v >= 1.0) return 0.5 * std::pow(v, -law.alpha);
  if (v > -1.0) return 0.5;
  return 1.0 - 0.5 * std::pow(-v, -law.alpha);
}

double lower_tail_prob(const Distribution& dist, double t) {
  if (dist.is_discrete()) {
    double p = 0.0;
    for (const auto& a : dist.atoms()) {
      if (!(a.value < t)) break;
      p += a.prob;
    }
    return p;
  }
  const ParetoLaw& law = dist.pareto();
  const double v = (t - law.offset) / law.scale;
  if (v <= -1.0) return 0.5 * std::pow(-v, -law.alpha);
  if (v <= 1.0) return 0.5;
  return 1.0 - 0.5 * std::pow(v, -law.alpha);
}

double abs_tail_prob(const Distribution& dist, double t) {
  if (!(t > 0.0)) return 1.0;
  if (dist.is_discrete()) {
    double p = 0.0;
    for (const auto& a : dist.atoms()) {
      if (std::abs(a.value) >= t) p += a.prob;
    }
    return p;
  }
  // P(X <= -t) equals P(X < -t) for the continuous part.
  return std::min(1.0, tail_prob(dist, t) + lower_tail_prob(dist, -t));
}

double sample(const Distribution& dist, std::uint64_t seed, std::uint64_t replication,
              std::uint64_t step) {
  return dist.draw(random_words(seed, replication, step));
}

double mean(const Distribution& dist) {
  if (dist.is_discrete()) {
    double s = 0.0;
    for (const auto& a : dist.atoms()) s += a.prob * a.value;
    return s;
  }
  const ParetoLaw& law = dist.pareto();
  if (!(law.alpha > 1.0)) {
    throw NonIntegrable("mean: Pareto tail index " + std::to_string(law.alpha) + " <= 1");
  }
  return law.offset;
}

double abs_excess(const Distribution& dist, double c) {
  require(c >= 0.0 && finite(c), "abs_excess: threshold must be finite and >= 0");
  if (dist.is_discrete()) {
    double s = 0.0;
    for (const auto& a : dist.atoms()) s += a.prob * std::max(std::abs(a.value) - c, 0.0);
    return s;
  }
  const ParetoLaw& law = dist.pareto();
  const double a = law.alpha;
  if (!(a > 1.0)) {
    throw NonIntegrable("abs_excess: Pareto tail index " + std::to_string(a) + " <= 1");
  }
  const double s = law.scale;
  if (law.offset == 0.0 && c >= s) return std::pow(s, a) * std::pow(c, 1.0 - a) / (a - 1.0);

  const std::vector<double> bps{-c, 0.0, c};
  const double window = window_for(law, bps);
  const auto g = [c](double x) { return std::max(std::abs(x) - c, 0.0); };
  const double inner = pareto_window_integral(law, g, bps, window);
  // Beyond the window both branches exceed c, so the integrand is x - c.
  const double mass = std::pow(s / window, a);
  const double first_moment = a / (a - 1.0) * window * mass;
  return inner + first_moment - c * mass;
}

double clamped_mean(const Distribution& dist, double c) {
  return expect(dist, TestFunction::clamp(-c, c));
}

double clamped_second_moment(const Distribution& dist, double c) {
  return expect(dist, TestFunction::power_clamped(2.0, c * c));
}

std::vector<double> jump_points(const Distribution& dist) {
  std::vector<double> out;
  if (dist.is_discrete()) {
    for (const auto& a : dist.atoms()) out.push_back(a.value);
  } else {
    const ParetoLaw& law = dist.pareto();
    out = {law.offset - law.scale, law.offset + law.scale};
  }
  sort_unique(out);
  return out;
}

std::string describe(const Distribution& dist) {
  using detail::fmt;
  return std::visit(
      Overloaded{
          [](const Distribution::Discrete& d) {
            std::string out = "discrete[";
            for (std::size_t i = 0; i < d.atoms.size(); ++i) {
              if (i) out += ';';
              out += fmt(d.atoms[i].value) + ':' + fmt(d.atoms[i].prob);
            }
            return out + ']';
          },
          [](const Distribution::SymmetricPareto& p) {
            return "pareto(" + fmt(p.alpha) + ',' + fmt(p.scale) + ')';
          },
          [](const Distribution::Shifted& s) {
            return "shift(" + describe(*s.base) + ',' + fmt(s.offset) + ')';
          },
          [](const Distribution::Scaled& s) {
            return "scale(" + describe(*s.base) + ',' + fmt(s.factor) + ')';
          },
      },
      dist.kind());
}

}  // namespace sublln
