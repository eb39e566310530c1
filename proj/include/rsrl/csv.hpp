#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rsrl/learners.hpp"

namespace rsrl {

/// %.17g; round-trips every finite double and spells out inf / nan.
std::string format_double(double v);
double parse_double(const std::string& s);

enum class TraceKind { two_timescale, one_timescale };

/// One row of a trace CSV.
///   two-timescale: n,linf_err_q,g_track_err,seed
///   one-timescale: n,suplog_err_x,seed
struct TraceRow {
  std::size_t n = 0;
  double error = 0.0;
  double g_track_error = 0.0;  // zero for one-timescale rows
  std::uint64_t seed = 0;

  bool operator==(const TraceRow&) const = default;
};

std::vector<TraceRow> trace_rows(const LearnerTrace& trace);

void write_trace_csv(std::ostream& out, TraceKind kind, std::span<const LearnerTrace> traces);
void write_trace_rows(std::ostream& out, TraceKind kind, std::span<const TraceRow> rows);
/// Detects the kind from the header.
std::vector<TraceRow> read_trace_csv(std::istream& in, TraceKind* kind = nullptr);

/// Long format for plotting: series,seed,n,metric,value
struct LongRow {
  std::string series;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::string metric;
  double value = 0.0;
};
void write_long_csv(std::ostream& out, std::span<const LongRow> rows);

/// Splits one CSV line on commas (no quoting; none of our files need it).
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace rsrl
