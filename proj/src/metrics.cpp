#include "dqopt/metrics.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace dqopt {

int bits_for_value(std::int64_t value) {
  const std::uint64_t mag =
      value < 0 ? 0ull - static_cast<std::uint64_t>(value)
                : static_cast<std::uint64_t>(value);
  if (mag <= 1) return 1;
  return std::bit_width(mag - 1);  // == ceil(log2(mag)) for mag >= 2
}

double normalized_error(std::span<const double> current,
                        std::span<const double> initial, double x_star) {
  if (current.size() != initial.size()) {
    throw std::invalid_argument("normalized_error: size mismatch");
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < current.size(); ++j) {
    const double den = initial[j] - x_star;
    if (den == 0.0) {
      throw std::invalid_argument(
          "normalized_error: undefined, an initial value equals the optimum");
    }
    const double num = current[j] - x_star;
    sum += (num * num) / (den * den);
  }
  return std::sqrt(sum);
}

std::string_view to_string(StepEvent event) {
  switch (event) {
    case StepEvent::None: return "";
    case StepEvent::ConvergePoint: return "converge-point";
    case StepEvent::Zoom: return "zoom";
    case StepEvent::Terminate: return "terminate";
  }
  return "";
}

namespace {

// %.17g round-trips doubles and keeps traces byte-stable for a given binary.
void put_double(std::ostream& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out << buf;
}

}  // namespace

void write_trace_csv(std::ostream& out, std::span<const TraceRecord> trace) {
  out << "k,e,delta,inner_rounds,bits_pieces,bits_bounds,bits_votes,event\n";
  for (const auto& row : trace) {
    out << row.step << ',';
    put_double(out, row.error);
    out << ',';
    put_double(out, row.delta);
    out << ',' << row.inner_rounds << ',' << row.bits_pieces << ','
        << row.bits_bounds << ',' << row.bits_votes << ','
        << to_string(row.event) << '\n';
  }
}

RunSummary summarize(std::span<const TraceRecord> trace, int node_count,
                     const BitCounts& totals, int zoom_count,
                     std::string_view termination) {
  RunSummary s;
  s.bits_pieces = totals.pieces;
  s.bits_bounds = totals.bounds;
  s.bits_bounds_suppressed = totals.bounds_suppressed;
  s.bits_votes = totals.votes;
  s.total_bits = totals.total();
  s.total_bits_suppressed = totals.total_suppressed();
  s.zoom_count = zoom_count;
  s.termination = std::string(termination);
  if (!trace.empty()) {
    s.steps = trace.back().step;
    s.final_error = trace.back().error;
    for (const auto& row : trace) s.inner_rounds_total += row.inner_rounds;
  }
  if (s.steps > 0 && node_count > 0) {
    s.bits_per_node_step = static_cast<double>(s.total_bits) /
                           (static_cast<double>(node_count) *
                            static_cast<double>(s.steps));
  }
  return s;
}

}  // namespace dqopt
