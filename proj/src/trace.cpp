#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "zoka/trace.hpp"

namespace zoka {

bool TraceRecord::operator==(const TraceRecord& other) const {
  auto same = [](double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; };
  return k == other.k && queries == other.queries && same(gap, other.gap) &&
         same(lyapunov, other.lyapunov);
}

std::optional<std::uint64_t> TrialTrace::queries_to_gap(double target) const {
  for (const TraceRecord& r : records) {
    if (r.gap <= target) return r.queries;
  }
  return std::nullopt;
}

std::optional<std::uint64_t> TrialTrace::iterations_to_gap(double target) const {
  for (const TraceRecord& r : records) {
    if (r.gap <= target) return r.k;
  }
  return std::nullopt;
}

double TrialTrace::final_gap() const { return records.empty() ? kNaN : records.back().gap; }

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

void write_trace_csv(const TrialTrace& trace, std::ostream& out) {
  out << "k,queries,gap,lyapunov\n";
  for (const TraceRecord& r : trace.records) {
    out << r.k << ',' << r.queries << ',' << format_double(r.gap) << ','
        << format_double(r.lyapunov) << '\n';
  }
}

std::vector<TraceRecord> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "k,queries,gap,lyapunov") {
    throw ArgumentError("trace CSV must start with 'k,queries,gap,lyapunov'");
  }
  std::vector<TraceRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string k, q, gap, lyap;
    if (!std::getline(row, k, ',') || !std::getline(row, q, ',') ||
        !std::getline(row, gap, ',') || !std::getline(row, lyap)) {
      throw ArgumentError("malformed trace row: " + line);
    }
    records.push_back({std::stoull(k), std::stoull(q), std::strtod(gap.c_str(), nullptr),
                       std::strtod(lyap.c_str(), nullptr)});
  }
  return records;
}

}  // namespace zoka
