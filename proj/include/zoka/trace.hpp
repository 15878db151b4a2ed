#ifndef ZOKA_TRACE_HPP
#define ZOKA_TRACE_HPP

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "zoka/core.hpp"

namespace zoka {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Stopping rules shared by every solver. A run stops at the first bound hit.
struct Budget {
  std::uint64_t max_iters = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t max_queries = 200000;
  /// Only honoured when ground truth is supplied through Instrumentation.
  std::optional<double> target_gap;
};

/// Ground truth used for reporting. Evaluations made on its behalf bypass the
/// query meter.
struct Instrumentation {
  Vector x_star;
  double F_star = 0.0;
  int record_every = 1;
  bool lyapunov = false;
};

struct TraceRecord {
  std::uint64_t k = 0;
  std::uint64_t queries = 0;
  double gap = kNaN;
  double lyapunov = kNaN;

  bool operator==(const TraceRecord& other) const;
};

struct TrialTrace {
  std::string solver;
  std::uint64_t seed = 0;
  std::map<std::string, double> params;
  std::vector<TraceRecord> records;
  bool converged = false;
  double wall_seconds = 0.0;

  /// First recorded query count at which gap <= target, if any.
  std::optional<std::uint64_t> queries_to_gap(double target) const;
  std::optional<std::uint64_t> iterations_to_gap(double target) const;
  double final_gap() const;
};

/// Header "k,queries,gap,lyapunov"; doubles with 17 significant digits,
/// missing values as "nan".
void write_trace_csv(const TrialTrace& trace, std::ostream& out);
/// Reads back the record rows written by write_trace_csv.
std::vector<TraceRecord> read_trace_csv(std::istream& in);

/// printf("%.17g") with "nan" / "inf" spelled consistently.
std::string format_double(double value);

}  // namespace zoka

#endif
