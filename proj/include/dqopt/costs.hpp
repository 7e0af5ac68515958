#pragma once

#include <memory>
#include <span>
#include <vector>

#include "dqopt/rng.hpp"

namespace dqopt {

/// Smooth, strongly convex scalar cost. smoothness() and convexity() are the
/// gradient-Lipschitz and strong-convexity constants of the function.
class Cost {
 public:
  virtual ~Cost() = default;
  virtual double eval(double x) const = 0;
  virtual double grad(double x) const = 0;
  virtual double smoothness() const = 0;
  virtual double convexity() const = 0;
};

/// f(x) = sensitivity/2 * (x - demand)^2. Both constants equal the
/// sensitivity.
class QuadraticCost final : public Cost {
 public:
  QuadraticCost(double sensitivity, double demand);

  double eval(double x) const override;
  double grad(double x) const override;
  double smoothness() const override { return sensitivity_; }
  double convexity() const override { return sensitivity_; }

  double sensitivity() const { return sensitivity_; }
  double demand() const { return demand_; }

 private:
  double sensitivity_;
  double demand_;
};

/// Per-node cost collection with the aggregate constants
/// L = max smoothness, mu = min convexity (0 < mu <= L enforced).
class CostEnsemble {
 public:
  explicit CostEnsemble(std::vector<std::unique_ptr<Cost>> costs);

  static CostEnsemble quadratics(std::span<const double> sensitivities,
                                 std::span<const double> demands);

  // Sensitivities and demands drawn as random integers in [1, 5].
  static CostEnsemble random_quadratics(int node_count, rng::Engine& engine);

  int size() const { return static_cast<int>(costs_.size()); }
  const Cost& at(int i) const { return *costs_.at(i); }

  double smoothness() const { return smoothness_; }  // L
  double convexity() const { return convexity_; }    // mu

  double sum_gradient(double x) const;

  // Minimizer of the summed cost. Closed form when every cost is quadratic,
  // otherwise bisection on the summed gradient.
  double optimal_point() const;

  // Bisection route, usable as an independent check of the closed form.
  // Throws budget_error when the bracket or the bisection does not converge.
  double optimal_point_bisection(double tol = 1e-12, int max_iter = 200) const;

 private:
  std::vector<std::unique_ptr<Cost>> costs_;
  double smoothness_ = 0.0;
  double convexity_ = 0.0;
};

/// Open interval; empty() when lower >= upper.
struct StepSizeInterval {
  double lower = 0.0;
  double upper = 0.0;
  bool empty() const { return !(lower < upper); }
};

// Admissible step sizes ( n(mu+L)/(4 mu L), 2n/(mu+L) ). Emptiness is
// reported, not an error.
StepSizeInterval step_size_range(int node_count, double mu, double L);

// Upper end of the admissible open interval for the contraction parameter
// delta: n[4 a mu L - n(mu+L)] / (2 a [n(mu+L) - 2 a mu L]).
double delta_upper_bound(int node_count, double alpha, double mu, double L);

/// Contraction factor and quantization floor of the squared-error recursion
///   err[k+1]^2 < theta * err[k]^2 + floor_term.
/// `certified` is false when (alpha, delta) fall outside their admissible
/// intervals; theta is still reported. floor_term evaluates the O(delta^2)
/// expression reading its step-size symbol as alpha (see README note), which
/// makes the magnitude interpretation-dependent.
struct ContractionConstants {
  double alpha = 0.0;
  double delta = 0.0;
  double theta = 0.0;
  double floor_term = 0.0;
  bool alpha_admissible = false;
  bool delta_admissible = false;
  bool certified() const { return alpha_admissible && delta_admissible; }
};

ContractionConstants contraction_constants(int node_count, double alpha,
                                           double delta, double mu, double L,
                                           double quantization_delta);

}  // namespace dqopt
