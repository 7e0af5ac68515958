#include "dqopt/costs.hpp"

#include <cassert>
#include <cmath>
#include <span>
#include <stdexcept>

#include "dqopt/errors.hpp"

namespace dqopt {

QuadraticCost::QuadraticCost(double sensitivity, double demand)
    : sensitivity_(sensitivity), demand_(demand) {
  if (!(sensitivity > 0.0)) {
    throw std::invalid_argument("quadratic cost: sensitivity must be positive");
  }
}

double QuadraticCost::eval(double x) const {
  const double d = x - demand_;
  return 0.5 * sensitivity_ * d * d;
}

double QuadraticCost::grad(double x) const { return sensitivity_ * (x - demand_); }

CostEnsemble::CostEnsemble(std::vector<std::unique_ptr<Cost>> costs)
    : costs_(std::move(costs)) {
  if (costs_.empty()) throw std::invalid_argument("cost ensemble: empty");
  smoothness_ = 0.0;
  convexity_ = 0.0;
  for (std::size_t i = 0; i < costs_.size(); ++i) {
    const double L_i = costs_[i]->smoothness();
    const double mu_i = costs_[i]->convexity();
    if (!(mu_i > 0.0)) {
      throw std::invalid_argument(
          "cost ensemble: every convexity constant must be positive");
    }
    if (i == 0) {
      smoothness_ = L_i;
      convexity_ = mu_i;
    } else {
      smoothness_ = std::max(smoothness_, L_i);
      convexity_ = std::min(convexity_, mu_i);
    }
  }
}

CostEnsemble CostEnsemble::quadratics(std::span<const double> sensitivities,
                                      std::span<const double> demands) {
  if (sensitivities.size() != demands.size()) {
    throw std::invalid_argument("cost ensemble: size mismatch");
  }
  std::vector<std::unique_ptr<Cost>> costs;
  costs.reserve(sensitivities.size());
  for (std::size_t i = 0; i < sensitivities.size(); ++i) {
    costs.push_back(std::make_unique<QuadraticCost>(sensitivities[i], demands[i]));
  }
  return CostEnsemble(std::move(costs));
}

CostEnsemble CostEnsemble::random_quadratics(int node_count, rng::Engine& engine) {
  std::vector<double> sensitivities(node_count), demands(node_count);
  for (auto& b : sensitivities) b = static_cast<double>(engine.uniform_int(1, 5));
  for (auto& d : demands) d = static_cast<double>(engine.uniform_int(1, 5));
  return quadratics(sensitivities, demands);
}

double CostEnsemble::sum_gradient(double x) const {
  double sum = 0.0;
  for (const auto& c : costs_) sum += c->grad(x);
  return sum;
}

double CostEnsemble::optimal_point() const {
  double weight = 0.0, weighted = 0.0;
  bool all_quadratic = true;
  for (const auto& c : costs_) {
    if (const auto* q = dynamic_cast<const QuadraticCost*>(c.get())) {
      weight += q->sensitivity();
      weighted += q->sensitivity() * q->demand();
    } else {
      all_quadratic = false;
      break;
    }
  }
  if (all_quadratic) return weighted / weight;
  return optimal_point_bisection();
}

double CostEnsemble::optimal_point_bisection(double tol, int max_iter) const {
  // The summed gradient is strictly increasing; expand a sign-changing
  // bracket around 0, then bisect.
  double lo = -1.0, hi = 1.0;
  int expansions = 0;
  while (sum_gradient(lo) > 0.0) {
    lo *= 2.0;
    if (++expansions > 200) {
      throw budget_error("optimal point: bracket expansion did not converge");
    }
  }
  expansions = 0;
  while (sum_gradient(hi) < 0.0) {
    hi *= 2.0;
    if (++expansions > 200) {
      throw budget_error("optimal point: bracket expansion did not converge");
    }
  }
  for (int i = 0; i < max_iter; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= tol) return mid;
    if (sum_gradient(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  throw budget_error("optimal point: bisection budget exhausted");
}

StepSizeInterval step_size_range(int node_count, double mu, double L) {
  if (node_count < 2 || !(mu > 0.0) || !(L >= mu)) {
    throw std::invalid_argument("step size range: need n >= 2 and 0 < mu <= L");
  }
  const double n = static_cast<double>(node_count);
  StepSizeInterval interval;
  interval.lower = n * (mu + L) / (4.0 * mu * L);
  interval.upper = 2.0 * n / (mu + L);
  return interval;
}

double delta_upper_bound(int node_count, double alpha, double mu, double L) {
  const double n = static_cast<double>(node_count);
  return n * (4.0 * alpha * mu * L - n * (mu + L)) /
         (2.0 * alpha * (n * (mu + L) - 2.0 * alpha * mu * L));
}

ContractionConstants contraction_constants(int node_count, double alpha,
                                           double delta, double mu, double L,
                                           double quantization_delta) {
  const double n = static_cast<double>(node_count);
  ContractionConstants out;
  out.alpha = alpha;
  out.delta = delta;

  const auto range = step_size_range(node_count, mu, L);
  out.alpha_admissible = !range.empty() && alpha > range.lower && alpha < range.upper;
  if (out.alpha_admissible) {
    const double dmax = delta_upper_bound(node_count, alpha, mu, L);
    out.delta_admissible = delta > 0.0 && delta < dmax;
  }

  out.theta = 2.0 * (1.0 + alpha * delta / n) *
              (1.0 - 2.0 * alpha * mu * L / (n * (mu + L)));
  const double d2 = quantization_delta * quantization_delta;
  out.floor_term = (8.0 + 32.0 * n * n * alpha * alpha * L * L +
                    32.0 * n * n * alpha * L * L / delta) *
                   d2;
  // Inside the admissible intervals the contraction factor is strict.
  assert(!out.certified() || (out.theta > 0.0 && out.theta < 1.0));
  return out;
}

}  // namespace dqopt
