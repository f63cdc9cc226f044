#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sublln/rng.hpp"

namespace sublln {

/// One support point of a discrete law.
struct Atom {
  double value;
  double prob;
};

/// A bounded Lipschitz test function from a fixed catalog.
///
/// Every catalog member saturates to constants as x -> +/-inf, which is what
/// lets expectations against unbounded laws be evaluated exactly outside a
/// finite window. Linear combinations of catalog members are closed under the
/// same guarantee.
class TestFunction {
 public:
  struct Clamp {
    double lo;
    double hi;
  };
  // Piecewise-linear bridge with I[x0+eps, inf) <= phi <= I[x0, inf).
  struct IndicatorSmoothed {
    double x0;
    double eps;
  };
  // clamp(slope * x + intercept, -bound, bound)
  struct AffineClamped {
    double slope;
    double intercept;
    double bound;
  };
  // min(|x|^p, bound), p >= 1
  struct PowerClamped {
    double p;
    double bound;
  };
  struct Term;
  struct Combination {
    std::shared_ptr<const std::vector<Term>> terms;
  };
  using Rule = std::variant<Clamp, IndicatorSmoothed, AffineClamped, PowerClamped, Combination>;

  static TestFunction clamp(double lo, double hi);
  static TestFunction indicator_smoothed(double x0, double eps);
  static TestFunction affine_clamped(double slope, double intercept, double bound);
  static TestFunction power_clamped(double p, double bound);
  static TestFunction constant(double c) { return clamp(c, c); }
  static TestFunction combination(std::vector<Term> terms);

  [[nodiscard]] double operator()(double x) const;
  [[nodiscard]] double lipschitz_constant() const noexcept { return lipschitz_; }
  [[nodiscard]] double sup_bound() const noexcept { return sup_; }

  // Points where the function may fail to be smooth (sorted, unique).
  [[nodiscard]] std::vector<double> breakpoints() const;
  // Constant values beyond every breakpoint.
  [[nodiscard]] double limit_at_pos_inf() const;
  [[nodiscard]] double limit_at_neg_inf() const;

  [[nodiscard]] const Rule& rule() const noexcept { return rule_; }

 private:
  TestFunction(Rule rule, double lipschitz, double sup)
      : rule_(std::move(rule)), lipschitz_(lipschitz), sup_(sup) {}

  Rule rule_;
  double lipschitz_;
  double sup_;
};

struct TestFunction::Term {
  double weight;
  TestFunction f;
};

[[nodiscard]] TestFunction operator+(const TestFunction& f, const TestFunction& g);
[[nodiscard]] TestFunction operator*(double lambda, const TestFunction& f);

/// Symmetric Pareto law with density proportional to |x|^(-alpha-1) on |x| >= scale.
struct ParetoLaw {
  double alpha;
  double scale;
  double offset;  // location after shift/scale wrappers are folded in
};

/// A probability law from the closed catalog: discrete, symmetric Pareto, and
/// shift/scale wrappers around either.
///
/// Wrappers are kept for identity and sampling; exact queries run on a
/// canonical form (discrete atoms or an offset Pareto) computed once at
/// construction. Values are immutable and cheap to copy.
class Distribution {
 public:
  struct Discrete {
    std::vector<Atom> atoms;
  };
  struct SymmetricPareto {
    double alpha;
    double scale;
  };
  struct Shifted {
    std::shared_ptr<const Distribution> base;
    double offset;
  };
  struct Scaled {
    std::shared_ptr<const Distribution> base;
    double factor;
  };
  using Kind = std::variant<Discrete, SymmetricPareto, Shifted, Scaled>;

  /// Atoms must have strictly increasing values, probs >= 0 summing to 1 within 1e-12.
  static Distribution discrete(std::vector<Atom> atoms);
  static Distribution symmetric_pareto(double alpha, double scale);
  static Distribution shifted(Distribution base, double offset);
  static Distribution scaled(Distribution base, double factor);

  static Distribution point_mass(double value) { return discrete({{value, 1.0}}); }
  /// Two-point law on {0, 1} with P(X = 1) = p.
  static Distribution bernoulli(double p);

  [[nodiscard]] const Kind& kind() const noexcept { return kind_; }

  [[nodiscard]] bool is_discrete() const noexcept { return !pareto_.has_value(); }
  // Canonical support for discrete laws (strictly increasing, may include zero-prob atoms).
  [[nodiscard]] std::span<const Atom> atoms() const noexcept { return atoms_; }
  // Canonical form for non-discrete laws.
  [[nodiscard]] const ParetoLaw& pareto() const;
  // +inf for discrete laws.
  [[nodiscard]] double tail_index() const noexcept;

  // Walks the wrapper tree, so draw of scaled(d, a) is exactly a * (draw of d).
  [[nodiscard]] double draw(const RandomWords& words) const;

 private:
  explicit Distribution(Kind kind);
  void canonicalize();

  Kind kind_;
  std::vector<Atom> atoms_;
  std::vector<double> cdf_;  // cumulative probs of atoms_, for sampling
  std::optional<ParetoLaw> pareto_;
};

/// E[f(X)]: exact for discrete laws, adaptive quadrature (abs error <= 1e-9) otherwise.
[[nodiscard]] double expect(const Distribution& dist, const TestFunction& f);

/// P(X >= t).
[[nodiscard]] double tail_prob(const Distribution& dist, double t);
/// P(X < t), computed directly (no 1 - tail cancellation).
[[nodiscard]] double lower_tail_prob(const Distribution& dist, double t);
/// P(|X| >= t).
[[nodiscard]] double abs_tail_prob(const Distribution& dist, double t);

/// Deterministic draw addressed by (seed, replication, step).
[[nodiscard]] double sample(const Distribution& dist, std::uint64_t seed, std::uint64_t replication,
                            std::uint64_t step);

/// E[X]; throws NonIntegrable when the tail index is <= 1.
[[nodiscard]] double mean(const Distribution& dist);
/// E[(|X| - c)^+] for c >= 0; throws NonIntegrable when the tail index is <= 1.
[[nodiscard]] double abs_excess(const Distribution& dist, double c);
/// E[clamp(X, -c, c)].
[[nodiscard]] double clamped_mean(const Distribution& dist, double c);
/// E[min(X^2, c^2)].
[[nodiscard]] double clamped_second_moment(const Distribution& dist, double c);

/// Round-trippable text form, e.g. "pareto(1.9,1)" or "scale(discrete[0:0.5;1:0.5],2)".
[[nodiscard]] std::string describe(const Distribution& dist);

/// Points where the law has an atom or its density has a kink (sorted, unique).
[[nodiscard]] std::vector<double> jump_points(const Distribution& dist);

}  // namespace sublln
