#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "dqopt/digraph.hpp"
#include "dqopt/metrics.hpp"
#include "dqopt/quantize.hpp"
#include "dqopt/rng.hpp"

namespace dqopt {

/// Per-node state of the mass-splitting average-consensus protocol. `mass`
/// and `tokens` are the integer quantities being averaged; `max_bound` /
/// `min_bound` carry the windowed max/min consensus used for the distributed
/// stopping test. A node always retains one token, so tokens >= 1 after every
/// receive phase.
struct ConsensusNodeState {
  std::int64_t mass = 0;    // sum of quantized contributions held
  std::int64_t tokens = 0;  // token count held
  std::int64_t max_bound = 0;
  std::int64_t min_bound = 0;
  bool halted = false;
  std::optional<GridValue> output;

  // Last bounds broadcast, for the duplicate-suppression accounting view.
  std::int64_t sent_max = 0;
  std::int64_t sent_min = 0;
  bool bounds_sent = false;
};

// Initial protocol state for one node: two tokens carrying twice the
// quantized input.
ConsensusNodeState init_consensus(double value, const QuantizationLevel& level);

// Uniform routing distribution over the node itself and its out-neighbors,
// as (candidate, probability) pairs with the node first. Throws
// std::logic_error when the node has no out-neighbors (impossible in a
// strongly connected graph).
std::vector<std::pair<int, double>> routing_probabilities(const Digraph& g,
                                                          int node);

/// Observation hooks for per-message traces and per-round invariant checks.
class ConsensusObserver {
 public:
  virtual ~ConsensusObserver() = default;
  // A mass piece sent from one node to another (or kept via self-routing).
  virtual void on_piece(std::int64_t round, int from, int to, std::int64_t mass) {
    (void)round, (void)from, (void)to, (void)mass;
  }
  // A bounds broadcast from one node to all of its out-neighbors.
  virtual void on_bounds(std::int64_t round, int from, std::int64_t max_bound,
                         std::int64_t min_bound) {
    (void)round, (void)from, (void)max_bound, (void)min_bound;
  }
  virtual void on_round_end(std::int64_t round,
                            std::span<const ConsensusNodeState> states) {
    (void)round, (void)states;
  }
};

// One synchronous protocol round:
//   bounds window reset (rounds 1, D+1, 2D+1, ...) -> bounds broadcast and
//   max/min fold -> sequential piece extraction and randomized routing ->
//   same-round delivery.
// Bit costs accrue into `bits`; returns true when this round is a check round
// (round % D == 0) whose folded bounds satisfy max - min <= 1 at every node,
// i.e. the protocol may stop. RNG streams are per node, so iteration order
// cannot change results.
bool consensus_round(std::span<ConsensusNodeState> states, const Digraph& g,
                     std::int64_t round, int diameter_bound,
                     std::span<rng::Engine> node_rngs, BitCounts& bits,
                     ConsensusObserver* observer = nullptr);

struct ConsensusOptions {
  std::int64_t max_rounds = 100000;
};

struct AverageConsensusResult {
  std::vector<GridValue> outputs;  // identical at every node
  std::int64_t rounds = 0;
  BitCounts bits;
};

// Full finite-time quantized average consensus over the given inputs. Every
// node halts at the same round (a multiple of the diameter) holding the same
// grid value, within one grid step of the exact mean of the quantized inputs.
// Throws budget_error (with a state dump) when max_rounds is exceeded.
AverageConsensusResult run_average_consensus(
    std::span<const double> values, const Digraph& g,
    const QuantizationLevel& level, std::uint64_t seed,
    const ConsensusOptions& options = {}, ConsensusObserver* observer = nullptr);

// Synchronous max-consensus: `rounds` broadcast-and-fold steps, enough to
// reach the global maximum whenever rounds >= diameter. Transmission costs
// accrue to bits->votes when bits is given.
std::vector<std::int64_t> max_consensus(std::span<const std::int64_t> values,
                                        const Digraph& g, int rounds,
                                        BitCounts* bits = nullptr);

// Dual of max_consensus.
std::vector<std::int64_t> min_consensus(std::span<const std::int64_t> values,
                                        const Digraph& g, int rounds,
                                        BitCounts* bits = nullptr);

}  // namespace dqopt
