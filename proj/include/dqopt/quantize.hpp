#pragma once

#include <cstdint>
#include <string_view>

namespace dqopt {

/// Quantization grid spacing held exactly as delta = base / refine_factor^n
/// with a rational base. The spacing is never stored as an accumulated
/// floating product, so two refinement histories that should agree compare
/// equal exactly.
class QuantizationLevel {
 public:
  // delta0 = base_num / base_den (> 0), refine_factor >= 2, refinements >= 0.
  QuantizationLevel(std::int64_t base_num, std::int64_t base_den,
                    int refine_factor, int refinements = 0);
  QuantizationLevel() : QuantizationLevel(1, 1, 2) {}

  std::int64_t delta_num() const { return num_; }   // reduced numerator
  std::int64_t delta_den() const { return den_; }   // reduced denominator
  double delta() const;                             // closest double to delta

  int refine_factor() const { return refine_factor_; }
  int refinements() const { return refinements_; }

  // One refinement step: delta / refine_factor, exact. Throws
  // std::overflow_error when the 64-bit rational representation overflows.
  QuantizationLevel refined() const;

  // Asymmetric quantizer: floor(value / delta). Values sitting a hair below a
  // grid point (closest-double artifacts of exact multiples) snap up, so
  // quantize(to_real(m)) == m round-trips. Throws std::invalid_argument for
  // non-finite input and std::overflow_error when the index exceeds 64 bits.
  std::int64_t quantize(double value) const;

  // True when both levels describe the same grid spacing.
  bool same_grid(const QuantizationLevel& other) const {
    return num_ == other.num_ && den_ == other.den_;
  }

  friend bool operator==(const QuantizationLevel& a, const QuantizationLevel& b) {
    return a.num_ == b.num_ && a.den_ == b.den_ &&
           a.refine_factor_ == b.refine_factor_ &&
           a.refinements_ == b.refinements_;
  }

 private:
  std::int64_t num_ = 1;  // reduced delta numerator
  std::int64_t den_ = 1;  // reduced delta denominator
  int refine_factor_ = 2;
  int refinements_ = 0;
};

// Parses "0.001", "25e-4" style decimals or "p/q" fractions into an exact
// positive level base. Throws std::invalid_argument on malformed text.
QuantizationLevel parse_level(std::string_view text, int refine_factor);

/// A state pinned to the quantization grid: real value = index * delta.
/// Equality is integer equality of the index on a matching grid, never a
/// floating comparison.
struct GridValue {
  std::int64_t index = 0;
  QuantizationLevel level;

  double to_real() const;

  // Exact re-indexing onto the refined grid; the real value is unchanged.
  GridValue refined() const;

  friend bool operator==(const GridValue& a, const GridValue& b) {
    return a.level.same_grid(b.level) && a.index == b.index;
  }
};

inline std::int64_t quantize(double value, const QuantizationLevel& level) {
  return level.quantize(value);
}

inline double to_real(const GridValue& v) { return v.to_real(); }

}  // namespace dqopt
