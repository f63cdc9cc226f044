#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "sublln/harness.hpp"
#include "sublln/truncation.hpp"

namespace sublln {

enum class Format { csv, json };

/// Parses "csv" or "json"; throws InvalidArgument otherwise.
[[nodiscard]] Format parse_format(const std::string& s);

/// Report rows at 1, 2, 5, 10, 20, 50, ... up to N, plus N itself.
[[nodiscard]] std::vector<std::size_t> report_points(std::size_t N);

// CSV header: scenario,n,event,method,value,stderr,center_hi,center_lo,wall_ms
void write_rows(std::ostream& os, std::span<const ExperimentRow> rows, Format fmt);
// CSV header: slope,intercept,r_squared,target_slope,pass
void write_rate(std::ostream& os, const RateReport& rep, Format fmt);
// CSV header: N,partial_sum,bound,remainder
void write_series(std::ostream& os, const SeriesReport& rep, std::span<const std::size_t> at,
                  Format fmt);
// CSV header: N,weighted_partial_sum,normalized_sum
void write_kronecker(std::ostream& os, const KroneckerReport& rep, std::span<const std::size_t> at,
                     Format fmt);
// CSV header: scenario,strategy,n0,N,delta,frac_upper,frac_lower,frac_either
void write_slln(std::ostream& os, const SllnReport& rep, Format fmt);
// CSV header: strategy,max_violation,nodes,pass
void write_audit(std::ostream& os, std::span<const AuditRow> rows, Format fmt);

}  // namespace sublln
