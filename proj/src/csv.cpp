#include "rsrl/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace rsrl {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw std::runtime_error("csv: not a number: '" + s + "'");
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(std::move(cur));
  return out;
}

std::vector<TraceRow> trace_rows(const LearnerTrace& trace) {
  std::vector<TraceRow> rows;
  for (std::size_t k = 0; k < trace.steps.size(); ++k) {
    TraceRow r;
    r.n = trace.steps[k];
    r.error = k < trace.error.size() ? trace.error[k] : 0.0;
    r.g_track_error = k < trace.g_track_error.size() ? trace.g_track_error[k] : 0.0;
    r.seed = trace.seed;
    rows.push_back(r);
  }
  return rows;
}

namespace {

const char* header(TraceKind kind) {
  return kind == TraceKind::two_timescale ? "n,linf_err_q,g_track_err,seed" : "n,suplog_err_x,seed";
}

}  // namespace

void write_trace_rows(std::ostream& out, TraceKind kind, std::span<const TraceRow> rows) {
  out << header(kind) << '\n';
  for (const auto& r : rows) {
    out << r.n << ',' << format_double(r.error) << ',';
    if (kind == TraceKind::two_timescale) out << format_double(r.g_track_error) << ',';
    out << r.seed << '\n';
  }
}

void write_trace_csv(std::ostream& out, TraceKind kind, std::span<const LearnerTrace> traces) {
  std::vector<TraceRow> rows;
  for (const auto& t : traces) {
    auto r = trace_rows(t);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  write_trace_rows(out, kind, rows);
}

std::vector<TraceRow> read_trace_csv(std::istream& in, TraceKind* kind_out) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("trace csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  TraceKind kind;
  if (line == header(TraceKind::two_timescale)) kind = TraceKind::two_timescale;
  else if (line == header(TraceKind::one_timescale)) kind = TraceKind::one_timescale;
  else throw std::runtime_error("trace csv: unknown header '" + line + "'");
  if (kind_out) *kind_out = kind;

  const std::size_t width = kind == TraceKind::two_timescale ? 4 : 3;
  std::vector<TraceRow> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv_line(line);
    if (f.size() != width) throw std::runtime_error("trace csv: wrong field count in '" + line + "'");
    TraceRow r;
    r.n = std::stoull(f[0]);
    r.error = parse_double(f[1]);
    if (kind == TraceKind::two_timescale) r.g_track_error = parse_double(f[2]);
    r.seed = std::stoull(f.back());
    rows.push_back(r);
  }
  return rows;
}

void write_long_csv(std::ostream& out, std::span<const LongRow> rows) {
  out << "series,seed,n,metric,value\n";
  for (const auto& r : rows)
    out << r.series << ',' << r.seed << ',' << r.n << ',' << r.metric << ',' << format_double(r.value) << '\n';
}

}  // namespace rsrl
