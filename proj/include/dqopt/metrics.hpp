#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

namespace dqopt {

// Bit cost of transmitting one integer value: ceil(log2 |v|), with a floor of
// one bit for |v| in {0, 1} (a message is never free). No sign bit is added.
int bits_for_value(std::int64_t value);

/// Cumulative channel-bit counters, split by message category so any
/// inclusion policy can be recovered after the fact. `bounds` counts every
/// per-round max/min broadcast as transmitted; `bounds_suppressed` is the
/// alternative total where a node that would re-send unchanged bounds is
/// counted as silent.
struct BitCounts {
  std::int64_t pieces = 0;
  std::int64_t bounds = 0;
  std::int64_t bounds_suppressed = 0;
  std::int64_t votes = 0;

  std::int64_t total() const { return pieces + bounds + votes; }
  std::int64_t total_suppressed() const {
    return pieces + bounds_suppressed + votes;
  }

  BitCounts& operator+=(const BitCounts& other) {
    pieces += other.pieces;
    bounds += other.bounds;
    bounds_suppressed += other.bounds_suppressed;
    votes += other.votes;
    return *this;
  }
};

// Normalized aggregate distance to the optimum:
//   sqrt( sum_j (current_j - x_star)^2 / (initial_j - x_star)^2 ).
// Throws std::invalid_argument when some initial_j equals x_star (the metric
// is undefined; the scenario layer re-draws such initial values).
double normalized_error(std::span<const double> current,
                        std::span<const double> initial, double x_star);

enum class StepEvent { None, ConvergePoint, Zoom, Terminate };

std::string_view to_string(StepEvent event);

/// One row per outer optimization step. Bit counters are cumulative.
struct TraceRecord {
  std::int64_t step = 0;
  double error = 0.0;
  double delta = 0.0;          // grid spacing in effect when this state was computed
  std::int64_t inner_rounds = 0;
  std::int64_t bits_pieces = 0;
  std::int64_t bits_bounds = 0;
  std::int64_t bits_votes = 0;
  StepEvent event = StepEvent::None;
};

// CSV with header "k,e,delta,inner_rounds,bits_pieces,bits_bounds,bits_votes,event".
void write_trace_csv(std::ostream& out, std::span<const TraceRecord> trace);

struct RunSummary {
  std::int64_t steps = 0;
  std::int64_t inner_rounds_total = 0;
  std::int64_t bits_pieces = 0;
  std::int64_t bits_bounds = 0;
  std::int64_t bits_bounds_suppressed = 0;
  std::int64_t bits_votes = 0;
  std::int64_t total_bits = 0;
  std::int64_t total_bits_suppressed = 0;
  double bits_per_node_step = 0.0;  // total_bits / (n * steps)
  int zoom_count = 0;
  double final_error = 0.0;
  std::string termination;
};

RunSummary summarize(std::span<const TraceRecord> trace, int node_count,
                     const BitCounts& totals, int zoom_count,
                     std::string_view termination);

}  // namespace dqopt
