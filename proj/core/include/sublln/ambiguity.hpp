#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sublln/distributions.hpp"

namespace sublln {

/// Finite ordered set of one-step laws. Member order is part of the identity:
/// strategies refer to members by index.
class AmbiguitySet {
 public:
  explicit AmbiguitySet(std::vector<Distribution> members);

  [[nodiscard]] std::size_t size() const noexcept { return members_.size(); }
  [[nodiscard]] const Distribution& operator[](std::size_t i) const { return members_.at(i); }
  [[nodiscard]] std::span<const Distribution> members() const noexcept { return members_; }
  [[nodiscard]] bool all_discrete() const noexcept;
  // Smallest tail index over members (+inf when all are discrete).
  [[nodiscard]] double min_tail_index() const noexcept;

 private:
  std::vector<Distribution> members_;
};

/// Member descriptions joined as "{a|b|...}"; identifies a model in reports.
[[nodiscard]] std::string describe(const AmbiguitySet& theta);

/// max over members of E[f(X)].
[[nodiscard]] double upper_expectation(const AmbiguitySet& theta, const TestFunction& f);
/// min over members of E[f(X)].
[[nodiscard]] double lower_expectation(const AmbiguitySet& theta, const TestFunction& f);

/// Upper and lower one-step means; these are the centers of every LLN statistic.
[[nodiscard]] double upper_mean(const AmbiguitySet& theta);
[[nodiscard]] double lower_mean(const AmbiguitySet& theta);

/// Half-line events {X >= t}, {|X| >= t} and their complements.
struct HalfLineEvent {
  enum class Variable { value, magnitude };
  Variable variable = Variable::value;
  double threshold = 0.0;
  bool complement = false;

  static HalfLineEvent at_least(double t) { return {Variable::value, t, false}; }
  static HalfLineEvent magnitude_at_least(double t) { return {Variable::magnitude, t, false}; }
  [[nodiscard]] HalfLineEvent complemented() const { return {variable, threshold, !complement}; }
};

[[nodiscard]] double probability(const Distribution& dist, const HalfLineEvent& event);

struct CapacityPair {
  double upper;
  double lower;
};

[[nodiscard]] CapacityPair marginal_capacity(const AmbiguitySet& theta, const HalfLineEvent& event);

/// Transform g applied before taking the Choquet integral of g(X).
struct ChoquetTransform {
  enum class Kind { identity, abs_power };
  Kind kind = Kind::identity;
  double r = 1.0;

  static ChoquetTransform identity() { return {Kind::identity, 1.0}; }
  static ChoquetTransform abs_power(double r);
};

/// Choquet integral of g(X) against the upper capacity:
///   int_0^inf V(g(X) >= t) dt + int_-inf^0 [V(g(X) >= t) - 1] dt.
/// Exact for all-discrete sets; adaptive quadrature otherwise. Throws
/// NonIntegrable when a member's tail index rules out a finite value.
[[nodiscard]] double choquet_upper(const AmbiguitySet& theta, const ChoquetTransform& transform);
/// Same integral against the lower capacity.
[[nodiscard]] double choquet_lower(const AmbiguitySet& theta, const ChoquetTransform& transform);

struct AgreementPoint {
  double x;
  double upper_x;  // V(X >= x)
  double upper_y;  // V(Y >= x)
  bool equal;
  bool at_jump;  // x is a discontinuity of either upper tail
};

struct AgreementReport {
  std::vector<AgreementPoint> points;
  std::optional<double> choquet_x;  // absent when not integrable
  std::optional<double> choquet_y;
  bool passed = false;
};

/// Checks that two families share their upper tails off the jump points and
/// share the Choquet integral, as identically distributed variables must.
[[nodiscard]] AgreementReport capacity_agreement(const AmbiguitySet& x_family,
                                                 const AmbiguitySet& y_family,
                                                 std::span<const double> grid);

/// V(|X_n| >= t) <= C V(|X| >= t) for all t >= 0, with C_V(|X|^r) finite.
class DominationCondition {
 public:
  DominationCondition(double constant, Distribution dominating, double order_r);

  [[nodiscard]] double constant() const noexcept { return constant_; }
  [[nodiscard]] const Distribution& dominating() const noexcept { return dominating_; }
  [[nodiscard]] double order() const noexcept { return order_; }
  // C_V(|X|^r) of the dominating law.
  [[nodiscard]] double moment() const noexcept { return moment_; }

 private:
  double constant_;
  Distribution dominating_;
  double order_;
  double moment_;
};

/// Largest max_theta P(|X_1| >= t) - C P_dom(|X| >= t) over a log-spaced grid
/// plus every jump point; a value <= 0 means the hypothesis holds on the grid.
[[nodiscard]] double verify_domination(const DominationCondition& cond, const AmbiguitySet& theta,
                                       std::size_t grid_size);

}  // namespace sublln
