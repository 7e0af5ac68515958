#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "dqopt/consensus.hpp"
#include "dqopt/costs.hpp"
#include "dqopt/digraph.hpp"
#include "dqopt/metrics.hpp"
#include "dqopt/quantize.hpp"

namespace dqopt {

/// Per-node outer-loop state. `convergence_steps` starts as {0} and records
/// the step of every detected quantized fixed point; `cost_at_convergence`
/// holds the node's local cost at each of those states (entry 0 pairs the
/// initial state with step 0).
struct OptimizerNodeState {
  GridValue estimate;
  std::vector<std::int64_t> convergence_steps{0};
  std::vector<double> cost_at_convergence;
  int vote = 1;

  std::int64_t convergence_index() const {
    return static_cast<std::int64_t>(convergence_steps.size()) - 1;
  }
};

enum class Mode { Zoom, Static };

struct RunConfig {
  double alpha = 0.12;
  QuantizationLevel level;   // initial grid
  double eps_stop = 0.003;   // per-node improvement threshold for the vote
  Mode mode = Mode::Zoom;
  std::int64_t max_outer_steps = 500;
  std::int64_t max_inner_rounds = 100000;
  std::uint64_t protocol_seed = 0;
  // When set, votes are decided by refinement count instead of eps_stop:
  // continue while fewer than this many refinements happened, then stop at the
  // next fixed point. Used to pin both comparison runs to one final grid.
  std::optional<int> target_zooms;
  // Accounting view used for the trace's bits_bounds column.
  bool suppress_duplicate_bounds = false;
};

enum class StopReason { VotedStop, ConvergencePoint, Budget };
std::string_view to_string(StopReason reason);

struct ZoomEvent {
  std::int64_t step = 0;  // trace row after which the grid was refined
  QuantizationLevel before;
  QuantizationLevel after;
};

struct RunResult {
  std::vector<TraceRecord> trace;  // row 0 is the initial state
  std::vector<ZoomEvent> zooms;
  std::int64_t final_step = 0;
  std::vector<GridValue> final_x;
  StopReason reason = StopReason::Budget;
  BitCounts bits;
  double x_star = 0.0;
  QuantizationLevel final_level;
};

// One gradient half-step from a grid state: x - alpha * grad(x). Throws when
// the result is non-finite (diverging step size).
double local_gradient_step(const GridValue& x, const Cost& cost, double alpha);

struct StepOutcome {
  GridValue next;  // common post-consensus estimate
  std::int64_t inner_rounds = 0;
  BitCounts bits;
};

// One outer step: per-node gradient half-steps followed by a full quantized
// average consensus. All node estimates must sit on the same grid.
StepOutcome optimization_step(std::span<const OptimizerNodeState> states,
                              const CostEnsemble& ensemble, const Digraph& g,
                              double alpha, std::uint64_t step_seed,
                              std::int64_t max_inner_rounds,
                              ConsensusObserver* observer = nullptr);

// Fixed-point test for one node: when `next` equals the node's estimate
// (exact integer comparison on the shared grid) the step is recorded as a
// convergence point together with the local cost there, and true is returned;
// otherwise the estimate is replaced by `next`.
bool detect_convergence_point(OptimizerNodeState& state, const GridValue& next,
                              std::int64_t step, const Cost& cost);

// Votes from the improvement test on each node's two most recent recorded
// costs (vote 0 when |previous - current| <= eps_stop), then a max-consensus
// over diameter() rounds. Returns the flag held at every node (all equal:
// 0 = stop, 1 = continue). Vote traffic accrues to bits->votes.
std::vector<int> vote_and_decide(std::span<OptimizerNodeState> states,
                                 const Digraph& g, double eps_stop,
                                 BitCounts* bits = nullptr);

// Full run: snap initial values onto the grid, iterate gradient + consensus
// steps, detect fixed points, and either stop at the first one (Static) or
// vote and refine the grid until the improvement threshold passes everywhere
// (Zoom). Initial values must not equal the ensemble optimum (the error
// metric is undefined there).
RunResult run(const RunConfig& config, const CostEnsemble& ensemble,
              const Digraph& g, std::span<const double> initial_values,
              ConsensusObserver* observer = nullptr);

}  // namespace dqopt
