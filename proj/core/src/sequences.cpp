#include "sublln/sequences.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sublln/error.hpp"

namespace sublln {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr std::size_t kMaxAuditDepth = 12;

}  // namespace

Strategy Strategy::table(std::size_t depth, std::map<std::vector<double>, std::size_t> entries,
                         std::size_t fallback) {
  for (const auto& [key, idx] : entries) {
    if (key.size() > depth) throw InvalidArgument("table strategy: key longer than depth");
  }
  return Strategy(Table{depth, std::move(entries), fallback});
}

Strategy Strategy::randomized(std::vector<std::size_t> genome) {
  if (genome.empty()) throw InvalidArgument("randomized strategy: empty genome");
  return Strategy(Randomized{std::move(genome)});
}

std::size_t Strategy::choose(std::span<const double> history, double running_sum,
                             std::size_t step, std::size_t members) const {
  return std::visit(
      Overloaded{
          [](const Constant& c) { return c.index; },
          [&](const RoundRobin&) { return (step - 1) % members; },
          [&](const Threshold& t) {
            const double centered = running_sum - t.level * static_cast<double>(step - 1);
            return centered < 0.0 ? t.hi : t.lo;
          },
          [&](const LastSign& s) {
            return (!history.empty() && history.back() < 0.0) ? s.hi : s.lo;
          },
          [&](const Table& t) {
            const std::size_t len = std::min(t.depth, history.size());
            const std::vector<double> key(history.end() - static_cast<std::ptrdiff_t>(len),
                                          history.end());
            const auto it = t.entries.find(key);
            return it == t.entries.end() ? t.fallback : it->second;
          },
          [&](const Randomized& r) { return r.genome[(step - 1) % r.genome.size()]; },
      },
      kind_);
}

bool Strategy::reads_history() const noexcept {
  return !std::holds_alternative<Constant>(kind_) && !std::holds_alternative<RoundRobin>(kind_) &&
         !std::holds_alternative<Randomized>(kind_);
}

bool Strategy::needs_history_buffer() const noexcept {
  return std::holds_alternative<Table>(kind_);
}

std::string Strategy::describe() const {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const Constant& c) { os << "constant(" << c.index << ")"; },
                 [&](const RoundRobin&) { os << "round_robin"; },
                 [&](const Threshold& t) {
                   os << "threshold(" << t.lo << ";" << t.hi << ";" << t.level << ")";
                 },
                 [&](const LastSign& s) { os << "last_sign(" << s.lo << ";" << s.hi << ")"; },
                 [&](const Table& t) {
                   os << "table(depth=" << t.depth << ";entries=" << t.entries.size() << ")";
                 },
                 [&](const Randomized& r) {
                   os << "randomized(";
                   for (std::size_t i = 0; i < r.genome.size(); ++i) os << r.genome[i];
                   os << ")";
                 },
             },
             kind_);
  return os.str();
}

void Strategy::validate(std::size_t members) const {
  std::vector<std::size_t> used;
  std::visit(Overloaded{
                 [&](const Constant& c) { used = {c.index}; },
                 [&](const RoundRobin&) {},
                 [&](const Threshold& t) { used = {t.lo, t.hi}; },
                 [&](const LastSign& s) { used = {s.lo, s.hi}; },
                 [&](const Table& t) {
                   used.push_back(t.fallback);
                   for (const auto& [key, idx] : t.entries) used.push_back(idx);
                 },
                 [&](const Randomized& r) { used = r.genome; },
             },
             kind_);
  for (std::size_t idx : used) {
    if (idx >= members) {
      throw InvalidArgument("strategy " + describe() + " refers to member " + std::to_string(idx) +
                            " of a set of size " + std::to_string(members));
    }
  }
}

void PathModel::validate() const {
  if (horizon < 1) throw InvalidArgument("path model: horizon must be >= 1");
  if (!(truncation_r >= 1.0 && truncation_r < 2.0)) {
    throw InvalidArgument("path model: truncation order must lie in [1, 2)");
  }
  strategy.validate(theta.size());
}

SamplePath simulate(const PathModel& model, std::uint64_t seed, std::uint64_t replication) {
  model.validate();
  SamplePath path;
  path.values.reserve(model.horizon);
  path.chosen_indices.reserve(model.horizon);
  path.partial_sums.reserve(model.horizon);
  std::vector<double> scratch;
  walk_path(model.theta, model.strategy, model.horizon, seed, replication, scratch,
            [&](std::size_t, double x, double s, std::size_t idx) {
              path.values.push_back(x);
              path.chosen_indices.push_back(idx);
              path.partial_sums.push_back(s);
              return true;
            });
  return path;
}

AuditReport audit_kernel(const AmbiguitySet& theta, const Kernel& kernel,
                         std::span<const TestFunction> phis, std::size_t depth, double tolerance) {
  if (depth > kMaxAuditDepth) {
    throw InvalidArgument("audit: depth must be <= " + std::to_string(kMaxAuditDepth));
  }
  if (!theta.all_discrete()) {
    throw UnsupportedExact("audit: exact conditional expectations need discrete members");
  }
  std::vector<double> upper(phis.size());
  std::vector<double> lower(phis.size());
  for (std::size_t k = 0; k < phis.size(); ++k) {
    upper[k] = upper_expectation(theta, phis[k]);
    lower[k] = lower_expectation(theta, phis[k]);
  }

  AuditReport report;
  report.max_violation = -std::numeric_limits<double>::infinity();
  std::vector<double> history;

  // Depth-first over reachable histories; step = history.size() + 1.
  const std::function<void()> visit = [&]() {
    const std::size_t step = history.size() + 1;
    const Distribution law = kernel(history, step);
    if (!law.is_discrete()) {
      throw UnsupportedExact("audit: kernel produced a non-discrete law");
    }
    ++report.nodes_checked;
    for (std::size_t k = 0; k < phis.size(); ++k) {
      const double cond = expect(law, phis[k]);
      const double excess = std::max(cond - upper[k], lower[k] - cond);
      if (excess > report.max_violation) {
        report.max_violation = excess;
        report.worst_history = history;
        report.worst_function = k;
      }
    }
    if (step >= depth) return;
    for (const auto& atom : law.atoms()) {
      if (atom.prob <= 0.0) continue;
      history.push_back(atom.value);
      visit();
      history.pop_back();
    }
  };
  if (depth > 0 && !phis.empty()) visit();
  if (report.nodes_checked == 0) report.max_violation = 0.0;
  report.passed = report.max_violation <= tolerance;
  return report;
}

AuditReport pseudo_independence_audit(const PathModel& model, std::span<const TestFunction> phis,
                                      std::size_t depth, double tolerance) {
  model.validate();
  const Kernel kernel = [&model](std::span<const double> history, std::size_t step) {
    NeumaierSum sum;
    for (double x : history) sum.add(x);
    return model.theta[model.strategy.choose(history, sum.value(), step, model.theta.size())];
  };
  return audit_kernel(model.theta, kernel, phis, depth, tolerance);
}

std::vector<TestFunction> default_audit_catalog(const AmbiguitySet& theta) {
  std::vector<double> support;
  for (const auto& m : theta.members()) {
    for (double x : jump_points(m)) support.push_back(x);
  }
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  const double lo = support.front();
  const double hi = support.back();
  const double span = std::max(hi - lo, 1.0);
  const double reach = std::max(std::abs(lo), std::abs(hi)) + 1.0;

  std::vector<TestFunction> out;
  out.push_back(TestFunction::clamp(lo, hi));
  out.push_back(TestFunction::affine_clamped(-1.0, 0.0, reach));
  out.push_back(TestFunction::power_clamped(2.0, reach * reach));
  for (double x : support) {
    out.push_back(TestFunction::indicator_smoothed(x - span / 4.0, span / 8.0));
  }
  return out;
}

}  // namespace sublln
