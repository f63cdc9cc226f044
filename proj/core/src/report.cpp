#include "sublln/report.hpp"

#include <cmath>

#include <json.hpp>

#include "format.hpp"
#include "sublln/error.hpp"

namespace sublln {
namespace {

using detail::fmt;
using nlohmann::ordered_json;

// JSON cannot carry inf/nan as numbers; emit them as strings.
ordered_json num(double x) {
  if (std::isfinite(x)) return x;
  return fmt(x);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

void dump(std::ostream& os, const ordered_json& j) { os << j.dump(2) << '\n'; }

}  // namespace

Format parse_format(const std::string& s) {
  if (s == "csv") return Format::csv;
  if (s == "json") return Format::json;
  throw InvalidArgument("unknown format '" + s + "' (expected csv or json)");
}

std::vector<std::size_t> report_points(std::size_t N) {
  std::vector<std::size_t> out;
  for (std::size_t decade = 1; decade <= N; decade *= 10) {
    for (std::size_t m : {1, 2, 5}) {
      if (decade * m < N) out.push_back(decade * m);
    }
    if (decade > N / 10) break;
  }
  if (N > 0) out.push_back(N);
  return out;
}

void write_rows(std::ostream& os, std::span<const ExperimentRow> rows, Format f) {
  if (f == Format::csv) {
    os << "scenario,n,event,method,value,stderr,center_hi,center_lo,wall_ms\n";
    for (const auto& r : rows) {
      os << csv_field(r.scenario) << ',' << r.n << ',' << csv_field(r.event) << ','
         << to_string(r.method) << ',' << fmt(r.value) << ',' << fmt(r.mc_stderr) << ','
         << fmt(r.center_hi) << ',' << fmt(r.center_lo) << ',' << fmt(r.wall_ms) << '\n';
    }
    return;
  }
  ordered_json arr = ordered_json::array();
  for (const auto& r : rows) {
    arr.push_back({{"scenario", r.scenario},
                   {"n", r.n},
                   {"event", r.event},
                   {"method", to_string(r.method)},
                   {"value", num(r.value)},
                   {"stderr", num(r.mc_stderr)},
                   {"center_hi", num(r.center_hi)},
                   {"center_lo", num(r.center_lo)},
                   {"wall_ms", num(r.wall_ms)},
                   {"lower_bound_only", r.method == CapacityMethod::strategy_search}});
  }
  dump(os, arr);
}

void write_rate(std::ostream& os, const RateReport& rep, Format f) {
  if (f == Format::csv) {
    os << "slope,intercept,r_squared,target_slope,pass\n"
       << fmt(rep.fit.slope) << ',' << fmt(rep.fit.intercept) << ',' << fmt(rep.fit.r_squared)
       << ',' << fmt(rep.target_slope) << ',' << (rep.pass ? "true" : "false") << '\n';
    return;
  }
  ordered_json stats = ordered_json::array();
  for (std::size_t i = 0; i < rep.horizons.size(); ++i) {
    stats.push_back({{"n", rep.horizons[i]}, {"statistic", num(rep.statistics[i])}});
  }
  dump(os, {{"slope", num(rep.fit.slope)},
            {"intercept", num(rep.fit.intercept)},
            {"r_squared", num(rep.fit.r_squared)},
            {"target_slope", num(rep.target_slope)},
            {"pass", rep.pass},
            {"strategy", rep.strategy},
            {"points", stats}});
}

void write_series(std::ostream& os, const SeriesReport& rep, std::span<const std::size_t> at,
                  Format f) {
  ordered_json arr = ordered_json::array();
  if (f == Format::csv) os << "N,partial_sum,bound,remainder\n";
  for (std::size_t N : at) {
    if (N < 1 || N > rep.partial_sums.size()) continue;
    const double ps = rep.partial_sums[N - 1];
    const double rem = rep.remainders[N - 1];
    if (f == Format::csv) {
      os << N << ',' << fmt(ps) << ',' << fmt(rep.closed_form_bound) << ',' << fmt(rem) << '\n';
    } else {
      arr.push_back({{"N", N},
                     {"partial_sum", num(ps)},
                     {"bound", num(rep.closed_form_bound)},
                     {"remainder", num(rem)}});
    }
  }
  if (f == Format::json) dump(os, arr);
}

void write_kronecker(std::ostream& os, const KroneckerReport& rep, std::span<const std::size_t> at,
                     Format f) {
  ordered_json arr = ordered_json::array();
  if (f == Format::csv) os << "N,weighted_partial_sum,normalized_sum\n";
  for (std::size_t N : at) {
    if (N < 1 || N > rep.normalized_sums.size()) continue;
    const double w = rep.weighted_partial_sums[N - 1];
    const double a = rep.normalized_sums[N - 1];
    if (f == Format::csv) {
      os << N << ',' << fmt(w) << ',' << fmt(a) << '\n';
    } else {
      arr.push_back({{"N", N}, {"weighted_partial_sum", num(w)}, {"normalized_sum", num(a)}});
    }
  }
  if (f == Format::json) dump(os, arr);
}

void write_slln(std::ostream& os, const SllnReport& rep, Format f) {
  ordered_json arr = ordered_json::array();
  if (f == Format::csv) os << "scenario,strategy,n0,N,delta,frac_upper,frac_lower,frac_either\n";
  for (const auto& s : rep.strategies) {
    for (const auto& c : s.checkpoints) {
      if (f == Format::csv) {
        os << csv_field(rep.scenario) << ',' << csv_field(s.strategy) << ',' << c.n0 << ','
           << rep.N << ',' << fmt(rep.delta) << ',' << fmt(c.frac_upper) << ','
           << fmt(c.frac_lower) << ',' << fmt(c.frac_either) << '\n';
      } else {
        arr.push_back({{"scenario", rep.scenario},
                       {"strategy", s.strategy},
                       {"n0", c.n0},
                       {"N", rep.N},
                       {"delta", num(rep.delta)},
                       {"frac_upper", num(c.frac_upper)},
                       {"frac_lower", num(c.frac_lower)},
                       {"frac_either", num(c.frac_either)}});
      }
    }
  }
  if (f == Format::json) dump(os, arr);
}

void write_audit(std::ostream& os, std::span<const AuditRow> rows, Format f) {
  if (f == Format::csv) {
    os << "strategy,max_violation,nodes,pass\n";
    for (const auto& r : rows) {
      os << csv_field(r.strategy) << ',' << fmt(r.max_violation) << ',' << r.nodes << ','
         << (r.passed ? "true" : "false") << '\n';
    }
    return;
  }
  ordered_json arr = ordered_json::array();
  for (const auto& r : rows) {
    arr.push_back({{"strategy", r.strategy},
                   {"max_violation", num(r.max_violation)},
                   {"nodes", r.nodes},
                   {"pass", r.passed}});
  }
  dump(os, arr);
}

}  // namespace sublln
