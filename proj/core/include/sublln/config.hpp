#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sublln/ambiguity.hpp"
#include "sublln/capacity.hpp"
#include "sublln/sequences.hpp"

namespace sublln {

/// Event as written in a scenario; centers default to the member-mean extremes.
struct EventSpec {
  PathEvent::Kind kind = PathEvent::Kind::union_dev;
  std::optional<double> epsilon;
  std::optional<double> lo;
  std::optional<double> hi;
  double threshold = 0.0;
  bool negated = false;
};

[[nodiscard]] PathEvent resolve_event(const EventSpec& spec, const AmbiguitySet& theta, double r,
                                      double default_epsilon);

/// One JSON scenario document.
///
///   {"name": "...", "theta": [law, ...],
///    "domination": {"C": 1, "dominating": law, "r": 1.5},
///    "strategy": {"kind": "threshold", "lo": 0, "hi": 1, "level": 0},
///    "family": {"constants": true, "random_genomes": 8, ...},
///    "event": {"kind": "union_dev", "epsilon": 0.25},
///    "horizons": [...], "replications": 10000, "seed": 1, ...}
///
/// Laws: {"kind":"discrete","support":[[v,p],...]}, {"kind":"pareto","alpha":a,"scale":s},
/// {"kind":"bernoulli","p":p}, {"kind":"point","value":v},
/// {"kind":"shift","base":law,"offset":b}, {"kind":"scale","base":law,"factor":a}.
struct ScenarioConfig {
  std::string name = "scenario";
  std::vector<Distribution> members;
  std::optional<Strategy> strategy;
  StrategySearchConfig family;
  std::optional<DominationCondition> domination;
  double r = 1.0;
  double epsilon = 0.25;
  std::vector<std::size_t> horizons;
  std::size_t replications = 10000;
  std::uint64_t seed = 0;
  std::optional<EventSpec> event;
  std::string output;
  std::vector<std::size_t> checkpoints;
  double delta = 0.1;
  std::size_t N = 0;
  ChoquetTransform transform = ChoquetTransform::identity();
  std::size_t n = 0;
  std::size_t depth = 8;
  std::size_t burn_in = 100;

  [[nodiscard]] AmbiguitySet theta() const { return AmbiguitySet(members); }
  // The dominating condition, or the trivial C = 1 self-domination by member 0
  // when the scenario has a single member and omits it.
  [[nodiscard]] DominationCondition domination_or_default() const;
};

/// Throws ConfigError with "<source>:<line>: <path>: <reason>" messages.
[[nodiscard]] ScenarioConfig parse_scenario(std::string_view text,
                                            std::string_view source = "<config>");
[[nodiscard]] ScenarioConfig load_scenario(const std::filesystem::path& path);

}  // namespace sublln
