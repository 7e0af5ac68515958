#include "dqopt/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dqopt/rng.hpp"

namespace dqopt {

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::VotedStop: return "voted-stop";
    case StopReason::ConvergencePoint: return "converge-point";
    case StopReason::Budget: return "budget";
  }
  return "";
}

double local_gradient_step(const GridValue& x, const Cost& cost, double alpha) {
  const double value = x.to_real();
  const double next = value - alpha * cost.grad(value);
  if (!std::isfinite(next)) {
    throw std::runtime_error("optimizer: gradient step diverged (non-finite)");
  }
  return next;
}

StepOutcome optimization_step(std::span<const OptimizerNodeState> states,
                              const CostEnsemble& ensemble, const Digraph& g,
                              double alpha, std::uint64_t step_seed,
                              std::int64_t max_inner_rounds,
                              ConsensusObserver* observer) {
  const int n = g.node_count();
  if (static_cast<int>(states.size()) != n || ensemble.size() != n) {
    throw std::invalid_argument("optimizer: state/cost/graph size mismatch");
  }
  const QuantizationLevel& level = states[0].estimate.level;
  std::vector<double> half_steps(n);
  for (int v = 0; v < n; ++v) {
    if (!states[v].estimate.level.same_grid(level)) {
      throw std::logic_error("optimizer: node estimates on different grids");
    }
    half_steps[v] = local_gradient_step(states[v].estimate, ensemble.at(v), alpha);
  }
  ConsensusOptions options;
  options.max_rounds = max_inner_rounds;
  auto consensus =
      run_average_consensus(half_steps, g, level, step_seed, options, observer);
  return StepOutcome{consensus.outputs[0], consensus.rounds, consensus.bits};
}

bool detect_convergence_point(OptimizerNodeState& state, const GridValue& next,
                              std::int64_t step, const Cost& cost) {
  if (!state.estimate.level.same_grid(next.level)) {
    throw std::logic_error("optimizer: fixed-point test across different grids");
  }
  if (next.index != state.estimate.index) {
    state.estimate = next;
    return false;
  }
  state.convergence_steps.push_back(step);
  state.cost_at_convergence.push_back(cost.eval(next.to_real()));
  return true;
}

std::vector<int> vote_and_decide(std::span<OptimizerNodeState> states,
                                 const Digraph& g, double eps_stop,
                                 BitCounts* bits) {
  std::vector<std::int64_t> votes(states.size());
  for (std::size_t v = 0; v < states.size(); ++v) {
    auto& st = states[v];
    if (st.cost_at_convergence.size() < 2) {
      throw std::logic_error("optimizer: vote requires two recorded cost values");
    }
    const double previous = st.cost_at_convergence[st.cost_at_convergence.size() - 2];
    const double current = st.cost_at_convergence.back();
    st.vote = std::abs(previous - current) <= eps_stop ? 0 : 1;
    votes[v] = st.vote;
  }
  const auto flags = max_consensus(votes, g, g.diameter(), bits);
  std::vector<int> out(flags.size());
  std::transform(flags.begin(), flags.end(), out.begin(),
                 [](std::int64_t f) { return static_cast<int>(f); });
  return out;
}

RunResult run(const RunConfig& config, const CostEnsemble& ensemble,
              const Digraph& g, std::span<const double> initial_values,
              ConsensusObserver* observer) {
  const int n = g.node_count();
  if (ensemble.size() != n || static_cast<int>(initial_values.size()) != n) {
    throw std::invalid_argument("optimizer: ensemble/initial size mismatch");
  }
  if (!g.strongly_connected()) {
    throw std::invalid_argument("optimizer: graph must be strongly connected");
  }
  if (!(config.alpha > 0.0)) {
    throw std::invalid_argument("optimizer: alpha must be positive");
  }
  if (config.eps_stop < 0.0) {
    throw std::invalid_argument("optimizer: eps_stop must be nonnegative");
  }
  if (config.max_outer_steps < 1) {
    throw std::invalid_argument("optimizer: max_outer_steps must be >= 1");
  }

  QuantizationLevel level = config.level;

  std::vector<OptimizerNodeState> states(n);
  std::vector<double> snapped(n);
  for (int v = 0; v < n; ++v) {
    states[v].estimate = GridValue{level.quantize(initial_values[v]), level};
    snapped[v] = states[v].estimate.to_real();
    states[v].cost_at_convergence.push_back(ensemble.at(v).eval(snapped[v]));
  }

  RunResult result;
  result.x_star = ensemble.optimal_point();
  result.reason = StopReason::Budget;

  auto record = [&](std::int64_t step, double delta_used,
                    std::int64_t inner_rounds, StepEvent event) {
    std::vector<double> current(n);
    for (int v = 0; v < n; ++v) current[v] = states[v].estimate.to_real();
    TraceRecord row;
    row.step = step;
    row.error = normalized_error(current, snapped, result.x_star);
    row.delta = delta_used;
    row.inner_rounds = inner_rounds;
    row.bits_pieces = result.bits.pieces;
    row.bits_bounds = config.suppress_duplicate_bounds
                          ? result.bits.bounds_suppressed
                          : result.bits.bounds;
    row.bits_votes = result.bits.votes;
    row.event = event;
    result.trace.push_back(row);
  };

  record(0, level.delta(), 0, StepEvent::None);

  bool stopped = false;
  for (std::int64_t step = 0; step < config.max_outer_steps && !stopped; ++step) {
    const double delta_used = level.delta();
    const auto outcome = optimization_step(states, ensemble, g, config.alpha,
                                           rng::mix(config.protocol_seed,
                                                    static_cast<std::uint64_t>(step)),
                                           config.max_inner_rounds, observer);
    result.bits += outcome.bits;

    // The post-consensus estimate is common to all nodes, so the fixed-point
    // test is unanimous for step >= 1; at step 0 the per-node initial states
    // may differ and only an all-node match counts as a convergence point.
    const bool fixed_point =
        std::all_of(states.begin(), states.end(), [&](const OptimizerNodeState& st) {
          return st.estimate == outcome.next;
        });

    StepEvent event = StepEvent::None;
    if (fixed_point) {
      for (int v = 0; v < n; ++v) {
        detect_convergence_point(states[v], outcome.next, step, ensemble.at(v));
      }
      if (config.mode == Mode::Static) {
        event = StepEvent::Terminate;
        result.reason = StopReason::ConvergencePoint;
        stopped = true;
      } else {
        int flag = 0;
        if (config.target_zooms.has_value()) {
          // Comparison runs: refine a fixed number of times, then stop at the
          // next fixed point. The distributed vote still runs (and is billed)
          // with the forced outcome at every node.
          const int forced =
              static_cast<int>(result.zooms.size()) < *config.target_zooms ? 1 : 0;
          for (auto& st : states) st.vote = forced;
          std::vector<std::int64_t> votes(n, forced);
          flag = static_cast<int>(
              max_consensus(votes, g, g.diameter(), &result.bits)[0]);
        } else {
          flag = vote_and_decide(states, g, config.eps_stop, &result.bits)[0];
        }
        if (flag == 0) {
          event = StepEvent::Terminate;
          result.reason = StopReason::VotedStop;
          stopped = true;
        } else {
          const QuantizationLevel refined = level.refined();
          result.zooms.push_back(ZoomEvent{step + 1, level, refined});
          for (auto& st : states) st.estimate = st.estimate.refined();
          level = refined;
          event = StepEvent::Zoom;
        }
      }
    } else {
      for (auto& st : states) st.estimate = outcome.next;
    }

    record(step + 1, delta_used, outcome.inner_rounds, event);
    result.final_step = step + 1;
  }

  result.final_level = level;
  result.final_x.reserve(n);
  for (const auto& st : states) result.final_x.push_back(st.estimate);
  return result;
}

}  // namespace dqopt
