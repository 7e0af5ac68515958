#include "dqopt/consensus.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "dqopt/errors.hpp"

namespace dqopt {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if (a % b != 0 && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if (a % b != 0 && ((a < 0) == (b < 0))) ++q;
  return q;
}

struct Piece {
  int to = 0;
  std::int64_t mass = 0;
};

}  // namespace

ConsensusNodeState init_consensus(double value, const QuantizationLevel& level) {
  ConsensusNodeState state;
  state.tokens = 2;
  state.mass = 2 * level.quantize(value);
  return state;
}

std::vector<std::pair<int, double>> routing_probabilities(const Digraph& g,
                                                          int node) {
  const auto& out = g.out_neighbors(node);
  if (out.empty()) {
    throw std::logic_error(
        "routing: node has no out-neighbors, which violates strong connectivity");
  }
  const double p = 1.0 / (1.0 + static_cast<double>(out.size()));
  std::vector<std::pair<int, double>> probs;
  probs.reserve(out.size() + 1);
  probs.emplace_back(node, p);
  for (int v : out) probs.emplace_back(v, p);
  return probs;
}

bool consensus_round(std::span<ConsensusNodeState> states, const Digraph& g,
                     std::int64_t round, int diameter_bound,
                     std::span<rng::Engine> node_rngs, BitCounts& bits,
                     ConsensusObserver* observer) {
  const int n = g.node_count();
  if (static_cast<int>(states.size()) != n ||
      static_cast<int>(node_rngs.size()) != n) {
    throw std::invalid_argument("consensus round: state/rng size mismatch");
  }
  if (diameter_bound < 1 || round < 1) {
    throw std::invalid_argument("consensus round: need round >= 1 and D >= 1");
  }
  if (std::any_of(states.begin(), states.end(),
                  [](const ConsensusNodeState& st) { return st.halted; })) {
    throw std::logic_error("consensus round: a node has already halted");
  }

  // Window reset: recompute local bounds from the current mass/token ratio.
  // Written as (round-1) % D so the D == 1 case resets every round.
  if ((round - 1) % diameter_bound == 0) {
    for (auto& st : states) {
      if (st.tokens < 1) throw std::logic_error("consensus: token floor violated");
      st.max_bound = ceil_div(st.mass, st.tokens);
      st.min_bound = floor_div(st.mass, st.tokens);
    }
  }

  // Bounds broadcast and synchronous max/min fold over in-neighbors + self.
  std::vector<std::int64_t> max_snapshot(n), min_snapshot(n);
  for (int v = 0; v < n; ++v) {
    max_snapshot[v] = states[v].max_bound;
    min_snapshot[v] = states[v].min_bound;
  }
  for (int v = 0; v < n; ++v) {
    auto& st = states[v];
    const std::int64_t cost =
        static_cast<std::int64_t>(g.out_degree(v)) *
        (bits_for_value(max_snapshot[v]) + bits_for_value(min_snapshot[v]));
    bits.bounds += cost;
    const bool changed = !st.bounds_sent || st.sent_max != max_snapshot[v] ||
                         st.sent_min != min_snapshot[v];
    if (changed) bits.bounds_suppressed += cost;
    st.sent_max = max_snapshot[v];
    st.sent_min = min_snapshot[v];
    st.bounds_sent = true;
    if (observer) observer->on_bounds(round, v, max_snapshot[v], min_snapshot[v]);
  }
  for (int v = 0; v < n; ++v) {
    auto& st = states[v];
    for (int u : g.in_neighbors(v)) {
      st.max_bound = std::max(st.max_bound, max_snapshot[u]);
      st.min_bound = std::min(st.min_bound, min_snapshot[u]);
    }
  }

  // Sequential piece extraction: recompute floor(mass/tokens) after each
  // extraction, so piece masses within one round may differ by one. Each node
  // keeps its last token; every piece carries one token to its destination.
  std::vector<Piece> in_flight;
  for (int v = 0; v < n; ++v) {
    auto& st = states[v];
    auto& rng = node_rngs[v];
    const auto& out = g.out_neighbors(v);
    std::int64_t to_send = st.tokens;
    while (to_send > 1) {
      const std::int64_t piece = floor_div(st.mass, st.tokens);
      st.mass -= piece;
      st.tokens -= 1;
      to_send -= 1;
      // Candidate 0 is the node itself, then its out-neighbors in id order.
      const std::uint64_t pick = rng.below(1 + out.size());
      const int dest = pick == 0 ? v : out[pick - 1];
      if (dest != v) bits.pieces += bits_for_value(piece);  // self-routing uses no channel
      in_flight.push_back({dest, piece});
      if (observer) observer->on_piece(round, v, dest, piece);
    }
  }

  // Same-round delivery.
  for (const auto& piece : in_flight) {
    states[piece.to].mass += piece.mass;
    states[piece.to].tokens += 1;
  }

  if (observer) observer->on_round_end(round, states);

  if (round % diameter_bound != 0) return false;
  return std::all_of(states.begin(), states.end(), [](const ConsensusNodeState& st) {
    return st.max_bound - st.min_bound <= 1;
  });
}

namespace {

std::string dump_states(std::span<const ConsensusNodeState> states) {
  std::ostringstream out;
  for (std::size_t v = 0; v < states.size(); ++v) {
    if (v) out << ' ';
    out << v << ":(y=" << states[v].mass << ",z=" << states[v].tokens
        << ",M=" << states[v].max_bound << ",m=" << states[v].min_bound << ')';
  }
  return out.str();
}

}  // namespace

AverageConsensusResult run_average_consensus(std::span<const double> values,
                                             const Digraph& g,
                                             const QuantizationLevel& level,
                                             std::uint64_t seed,
                                             const ConsensusOptions& options,
                                             ConsensusObserver* observer) {
  const int n = g.node_count();
  if (static_cast<int>(values.size()) != n) {
    throw std::invalid_argument("consensus: one input value per node required");
  }
  if (!g.strongly_connected()) {
    throw std::invalid_argument("consensus: graph must be strongly connected");
  }
  const int diameter = g.diameter();

  std::vector<ConsensusNodeState> states(n);
  std::int64_t total_mass = 0;
  for (int v = 0; v < n; ++v) {
    states[v] = init_consensus(values[v], level);
    if (std::abs(states[v].mass) > (std::int64_t{1} << 56) / n) {
      throw std::overflow_error("consensus: quantized inputs too large");
    }
    total_mass += states[v].mass;
  }
  const std::int64_t total_tokens = 2 * static_cast<std::int64_t>(n);

  std::vector<rng::Engine> rngs;
  rngs.reserve(n);
  for (int v = 0; v < n; ++v) {
    rngs.emplace_back(rng::mix(seed, static_cast<std::uint64_t>(v)));
  }

  AverageConsensusResult result;
  for (std::int64_t round = 1; round <= options.max_rounds; ++round) {
    const bool can_stop =
        consensus_round(states, g, round, diameter, rngs, result.bits, observer);

    std::int64_t sum_mass = 0, sum_tokens = 0;
    for (const auto& st : states) {
      sum_mass += st.mass;
      sum_tokens += st.tokens;
      if (st.tokens < 1) throw std::logic_error("consensus: token floor violated");
    }
    if (sum_mass != total_mass || sum_tokens != total_tokens) {
      throw std::logic_error("consensus: mass conservation violated at round " +
                             std::to_string(round));
    }

    if (can_stop) {
      result.rounds = round;
      const std::int64_t agreed = states[0].min_bound;
      for (auto& st : states) {
        if (st.min_bound != agreed) {
          throw std::logic_error("consensus: nodes halted on different values");
        }
        st.halted = true;
        st.output = GridValue{agreed, level};
      }
      result.outputs.assign(n, GridValue{agreed, level});
      return result;
    }
  }
  throw budget_error("consensus: round budget (" +
                     std::to_string(options.max_rounds) +
                     ") exhausted; states: " + dump_states(states));
}

namespace {

std::vector<std::int64_t> fold_consensus(std::span<const std::int64_t> values,
                                         const Digraph& g, int rounds,
                                         BitCounts* bits, bool take_max) {
  const int n = g.node_count();
  if (static_cast<int>(values.size()) != n) {
    throw std::invalid_argument("max consensus: one value per node required");
  }
  std::vector<std::int64_t> current(values.begin(), values.end());
  std::vector<std::int64_t> snapshot(n);
  for (int r = 0; r < rounds; ++r) {
    std::copy(current.begin(), current.end(), snapshot.begin());
    if (bits) {
      for (int v = 0; v < n; ++v) {
        bits->votes += static_cast<std::int64_t>(g.out_degree(v)) *
                       bits_for_value(snapshot[v]);
      }
    }
    for (int v = 0; v < n; ++v) {
      for (int u : g.in_neighbors(v)) {
        current[v] = take_max ? std::max(current[v], snapshot[u])
                              : std::min(current[v], snapshot[u]);
      }
    }
  }
  return current;
}

}  // namespace

std::vector<std::int64_t> max_consensus(std::span<const std::int64_t> values,
                                        const Digraph& g, int rounds,
                                        BitCounts* bits) {
  return fold_consensus(values, g, rounds, bits, true);
}

std::vector<std::int64_t> min_consensus(std::span<const std::int64_t> values,
                                        const Digraph& g, int rounds,
                                        BitCounts* bits) {
  return fold_consensus(values, g, rounds, bits, false);
}

}  // namespace dqopt
