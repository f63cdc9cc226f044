#include "sublln/config.hpp"

#include <cctype>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "sublln/error.hpp"

namespace sublln {
namespace {

using nlohmann::json;

// Maps JSON pointers ("/theta/1/alpha") to the 1-based line where the value
// starts. Runs on text nlohmann already accepted, so it can be lax.
class LineIndex {
 public:
  explicit LineIndex(std::string_view text) : text_(text) {
    value("");
  }
  [[nodiscard]] int line_of(const std::string& pointer) const {
    std::string p = pointer;
    while (true) {
      const auto it = lines_.find(p);
      if (it != lines_.end()) return it->second;
      if (p.empty()) return 1;
      p.erase(p.rfind('/'));
    }
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      if (text_[pos_] == '\n') ++line_;
      ++pos_;
    }
  }
  std::string string() {
    std::string out;
    ++pos_;  // opening quote
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\') ++pos_;
      if (pos_ < text_.size()) out += text_[pos_++];
    }
    ++pos_;
    return out;
  }
  void value(const std::string& path) {
    skip_ws();
    lines_.emplace(path, line_);
    if (pos_ >= text_.size()) return;
    const char c = text_[pos_];
    if (c == '{') {
      ++pos_;
      skip_ws();
      while (pos_ < text_.size() && text_[pos_] != '}') {
        const int key_line = line_;
        const std::string key = string();
        lines_.emplace(path + "/" + key, key_line);
        skip_ws();
        ++pos_;  // colon
        value(path + "/" + key);
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == ',') ++pos_;
        skip_ws();
      }
      ++pos_;
    } else if (c == '[') {
      ++pos_;
      skip_ws();
      for (std::size_t i = 0; pos_ < text_.size() && text_[pos_] != ']'; ++i) {
        value(path + "/" + std::to_string(i));
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == ',') ++pos_;
        skip_ws();
      }
      ++pos_;
    } else if (c == '"') {
      string();
    } else {
      while (pos_ < text_.size() && !std::strchr(",]} \t\r\n", text_[pos_])) ++pos_;
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  std::map<std::string, int> lines_;
};

class Reader {
 public:
  Reader(std::string_view text, std::string_view source) : source_(source), index_(text) {}

  [[noreturn]] void fail(const std::string& pointer, const std::string& why) const {
    throw ConfigError(source_ + ":" + std::to_string(index_.line_of(pointer)) + ": " +
                      (pointer.empty() ? std::string("/") : pointer) + ": " + why);
  }

  const json& at(const json& obj, const std::string& ptr, const char* key) const {
    if (!obj.is_object() || !obj.contains(key)) fail(ptr, std::string("missing field '") + key + "'");
    return obj.at(key);
  }

  double number(const json& v, const std::string& ptr) const {
    if (!v.is_number()) fail(ptr, "expected a number");
    return v.get<double>();
  }
  double number(const json& obj, const std::string& ptr, const char* key) const {
    return number(at(obj, ptr, key), ptr + "/" + key);
  }
  double number_or(const json& obj, const std::string& ptr, const char* key, double fallback) const {
    return obj.contains(key) ? number(obj, ptr, key) : fallback;
  }

  std::uint64_t unsigned_int(const json& v, const std::string& ptr) const {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return v.get<std::uint64_t>();
    if (v.is_string()) {
      try {
        std::size_t used = 0;
        const auto s = v.get<std::string>();
        const auto x = std::stoull(s, &used, 0);
        if (used == s.size()) return x;
      } catch (const std::exception&) {
      }
    }
    fail(ptr, "expected a non-negative integer");
  }
  std::size_t size(const json& obj, const std::string& ptr, const char* key,
                   std::size_t fallback) const {
    if (!obj.contains(key)) return fallback;
    return static_cast<std::size_t>(unsigned_int(obj.at(key), ptr + "/" + key));
  }

  bool boolean_or(const json& obj, const std::string& ptr, const char* key, bool fallback) const {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_boolean()) fail(ptr + "/" + key, "expected true or false");
    return obj.at(key).get<bool>();
  }

  std::string text(const json& obj, const std::string& ptr, const char* key) const {
    const json& v = at(obj, ptr, key);
    if (!v.is_string()) fail(ptr + "/" + key, "expected a string");
    return v.get<std::string>();
  }

  const json& array(const json& obj, const std::string& ptr, const char* key) const {
    const json& v = at(obj, ptr, key);
    if (!v.is_array()) fail(ptr + "/" + key, "expected an array");
    return v;
  }

  // Runs f, turning library validation errors into anchored config errors.
  template <class F>
  auto guarded(const std::string& ptr, F&& f) const {
    try {
      return f();
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      fail(ptr, e.what());
    }
  }

  Distribution distribution(const json& v, const std::string& ptr) const {
    if (!v.is_object()) fail(ptr, "expected a distribution object");
    const std::string kind = text(v, ptr, "kind");
    return guarded(ptr, [&]() -> Distribution {
      if (kind == "discrete") {
        const json& support = array(v, ptr, "support");
        std::vector<Atom> atoms;
        for (std::size_t i = 0; i < support.size(); ++i) {
          const std::string p = ptr + "/support/" + std::to_string(i);
          const json& pair = support[i];
          if (!pair.is_array() || pair.size() != 2) fail(p, "expected [value, probability]");
          atoms.push_back({number(pair[0], p + "/0"), number(pair[1], p + "/1")});
        }
        return Distribution::discrete(std::move(atoms));
      }
      if (kind == "pareto") {
        return Distribution::symmetric_pareto(number(v, ptr, "alpha"),
                                              number_or(v, ptr, "scale", 1.0));
      }
      if (kind == "bernoulli") return Distribution::bernoulli(number(v, ptr, "p"));
      if (kind == "point") return Distribution::point_mass(number(v, ptr, "value"));
      if (kind == "shift") {
        return Distribution::shifted(distribution(at(v, ptr, "base"), ptr + "/base"),
                                     number(v, ptr, "offset"));
      }
      if (kind == "scale") {
        return Distribution::scaled(distribution(at(v, ptr, "base"), ptr + "/base"),
                                    number(v, ptr, "factor"));
      }
      fail(ptr + "/kind", "unknown distribution kind '" + kind + "'");
    });
  }

  Strategy strategy(const json& v, const std::string& ptr) const {
    if (!v.is_object()) fail(ptr, "expected a strategy object");
    const std::string kind = text(v, ptr, "kind");
    if (kind == "constant") return Strategy::constant(size(v, ptr, "index", 0));
    if (kind == "round_robin") return Strategy::round_robin();
    if (kind == "threshold") {
      return Strategy::threshold(size(v, ptr, "lo", 0), size(v, ptr, "hi", 1),
                                 number_or(v, ptr, "level", 0.0));
    }
    if (kind == "last_sign") return Strategy::last_sign(size(v, ptr, "lo", 0), size(v, ptr, "hi", 1));
    if (kind == "randomized") {
      return guarded(ptr, [&] {
        return Strategy::randomized(sizes(array(v, ptr, "genome"), ptr + "/genome"));
      });
    }
    fail(ptr + "/kind", "unknown strategy kind '" + kind + "'");
  }

  std::vector<std::size_t> sizes(const json& arr, const std::string& ptr) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      out.push_back(static_cast<std::size_t>(unsigned_int(arr[i], ptr + "/" + std::to_string(i))));
    }
    return out;
  }

  StrategySearchConfig family(const json& v, const std::string& ptr) const {
    if (!v.is_object()) fail(ptr, "expected an object");
    StrategySearchConfig f;
    f.constants = boolean_or(v, ptr, "constants", f.constants);
    f.round_robin = boolean_or(v, ptr, "round_robin", f.round_robin);
    f.last_sign = boolean_or(v, ptr, "last_sign", f.last_sign);
    f.random_genomes = size(v, ptr, "random_genomes", f.random_genomes);
    f.genome_length = size(v, ptr, "genome_length", f.genome_length);
    if (v.contains("genome_seed")) f.genome_seed = unsigned_int(v.at("genome_seed"), ptr + "/genome_seed");
    if (v.contains("threshold_levels")) {
      const json& levels = array(v, ptr, "threshold_levels");
      for (std::size_t i = 0; i < levels.size(); ++i) {
        f.threshold_levels.push_back(number(levels[i], ptr + "/threshold_levels/" + std::to_string(i)));
      }
    }
    return f;
  }

  EventSpec event(const json& v, const std::string& ptr) const {
    if (!v.is_object()) fail(ptr, "expected an event object");
    static const std::map<std::string, PathEvent::Kind> kinds = {
        {"lower_dev", PathEvent::Kind::lower_dev},
        {"upper_dev", PathEvent::Kind::upper_dev},
        {"union_dev", PathEvent::Kind::union_dev},
        {"band", PathEvent::Kind::band},
        {"custom_threshold", PathEvent::Kind::custom_threshold},
    };
    const std::string kind = text(v, ptr, "kind");
    const auto it = kinds.find(kind);
    if (it == kinds.end()) fail(ptr + "/kind", "unknown event kind '" + kind + "'");
    EventSpec e;
    e.kind = it->second;
    if (v.contains("epsilon")) {
      e.epsilon = number(v, ptr, "epsilon");
      if (!(*e.epsilon > 0.0)) fail(ptr + "/epsilon", "epsilon must be > 0");
    }
    if (v.contains("lo")) e.lo = number(v, ptr, "lo");
    if (v.contains("hi")) e.hi = number(v, ptr, "hi");
    if (e.kind == PathEvent::Kind::custom_threshold) e.threshold = number(v, ptr, "t");
    e.negated = boolean_or(v, ptr, "negated", false);
    return e;
  }

  ChoquetTransform transform(const json& v, const std::string& ptr) const {
    if (v.is_string() && v.get<std::string>() == "identity") return ChoquetTransform::identity();
    if (!v.is_object()) fail(ptr, "expected \"identity\" or {\"kind\":\"abs_power\",\"r\":r}");
    const std::string kind = text(v, ptr, "kind");
    if (kind == "identity") return ChoquetTransform::identity();
    if (kind == "abs_power") {
      return guarded(ptr, [&] { return ChoquetTransform::abs_power(number(v, ptr, "r")); });
    }
    fail(ptr + "/kind", "unknown transform '" + kind + "'");
  }

 private:
  std::string source_;
  LineIndex index_;
};

}  // namespace

PathEvent resolve_event(const EventSpec& spec, const AmbiguitySet& theta, double r,
                        double default_epsilon) {
  const double eps = spec.epsilon.value_or(default_epsilon);
  const auto hi = [&] { return spec.hi ? *spec.hi : upper_mean(theta); };
  const auto lo = [&] { return spec.lo ? *spec.lo : lower_mean(theta); };
  PathEvent e = PathEvent::custom_threshold(spec.threshold);
  switch (spec.kind) {
    case PathEvent::Kind::lower_dev: e = PathEvent::lower_dev(eps, r, lo()); break;
    case PathEvent::Kind::upper_dev: e = PathEvent::upper_dev(eps, r, hi()); break;
    case PathEvent::Kind::union_dev: e = PathEvent::union_dev(eps, r, hi(), lo()); break;
    case PathEvent::Kind::band: e = PathEvent::band(lo(), hi(), eps); break;
    case PathEvent::Kind::custom_threshold: break;
  }
  return spec.negated ? e.complement() : e;
}

DominationCondition ScenarioConfig::domination_or_default() const {
  if (domination) return *domination;
  if (members.size() == 1) return DominationCondition(1.0, members.front(), r);
  throw ConfigError(name + ": a multi-member scenario needs a \"domination\" block");
}

ScenarioConfig parse_scenario(std::string_view text, std::string_view source) {
  const std::string src(source);
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    int line = 1;
    for (std::size_t i = 0; i < std::min<std::size_t>(e.byte, text.size()); ++i) {
      if (text[i] == '\n') ++line;
    }
    throw ConfigError(src + ":" + std::to_string(line) + ": malformed JSON: " + e.what());
  }
  const Reader rd(text, source);
  if (!root.is_object()) rd.fail("", "expected a JSON object");

  ScenarioConfig cfg;
  if (root.contains("name")) cfg.name = rd.text(root, "", "name");
  const json& theta = rd.array(root, "", "theta");
  if (theta.empty()) rd.fail("/theta", "ambiguity set must have at least one member");
  for (std::size_t i = 0; i < theta.size(); ++i) {
    cfg.members.push_back(rd.distribution(theta[i], "/theta/" + std::to_string(i)));
  }

  cfg.r = rd.number_or(root, "", "r", 1.0);
  if (root.contains("domination")) {
    const json& d = root.at("domination");
    const double C = rd.number(d, "/domination", "C");
    const Distribution dom = rd.distribution(rd.at(d, "/domination", "dominating"),
                                             "/domination/dominating");
    const double r = rd.number_or(d, "/domination", "r", cfg.r);
    if (!root.contains("r")) cfg.r = r;
    cfg.domination = rd.guarded("/domination", [&] { return DominationCondition(C, dom, r); });
  }
  if (!(cfg.r >= 1.0 && cfg.r < 2.0)) rd.fail("/r", "r must lie in [1, 2)");

  if (root.contains("strategy")) cfg.strategy = rd.strategy(root.at("strategy"), "/strategy");
  if (cfg.strategy) {
    const Strategy s = *cfg.strategy;
    rd.guarded("/strategy", [&] {
      s.validate(cfg.members.size());
      return 0;
    });
  }
  if (root.contains("family")) cfg.family = rd.family(root.at("family"), "/family");

  cfg.epsilon = rd.number_or(root, "", "epsilon", cfg.epsilon);
  if (!(cfg.epsilon > 0.0)) rd.fail("/epsilon", "epsilon must be > 0");
  if (root.contains("horizons")) {
    cfg.horizons = rd.sizes(rd.array(root, "", "horizons"), "/horizons");
    for (std::size_t i = 0; i < cfg.horizons.size(); ++i) {
      if (cfg.horizons[i] < 1 || (i > 0 && cfg.horizons[i] <= cfg.horizons[i - 1])) {
        rd.fail("/horizons/" + std::to_string(i), "horizons must be positive and increasing");
      }
    }
  }
  cfg.replications = rd.size(root, "", "replications", cfg.replications);
  if (root.contains("seed")) cfg.seed = rd.unsigned_int(root.at("seed"), "/seed");
  if (root.contains("event")) cfg.event = rd.event(root.at("event"), "/event");
  if (root.contains("output")) cfg.output = rd.text(root, "", "output");
  if (root.contains("checkpoints")) {
    cfg.checkpoints = rd.sizes(rd.array(root, "", "checkpoints"), "/checkpoints");
  }
  cfg.delta = rd.number_or(root, "", "delta", cfg.delta);
  if (!(cfg.delta > 0.0)) rd.fail("/delta", "delta must be > 0");
  cfg.N = rd.size(root, "", "N", cfg.N);
  if (root.contains("transform")) cfg.transform = rd.transform(root.at("transform"), "/transform");
  cfg.n = rd.size(root, "", "n", cfg.n);
  cfg.depth = rd.size(root, "", "depth", cfg.depth);
  cfg.burn_in = rd.size(root, "", "burn_in", cfg.burn_in);
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.string());
}

}  // namespace sublln
