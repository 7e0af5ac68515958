#include "dqopt/quantize.hpp"

#include <cmath>
#include <charconv>
#include <numeric>
#include <stdexcept>
#include <string>

namespace dqopt {

namespace {

// Relative half-width of the snap band around grid points. Wide enough to
// absorb double/long-double rounding (<= 2^-52 relative), narrow enough that
// any value a caller could distinguish from a grid point floors normally.
constexpr long double kGridSnap = 0x1.0p-48L;

std::int64_t checked_mul(std::int64_t a, std::int64_t b, const char* what) {
  std::int64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) throw std::overflow_error(what);
  return out;
}

}  // namespace

QuantizationLevel::QuantizationLevel(std::int64_t base_num, std::int64_t base_den,
                                     int refine_factor, int refinements) {
  if (base_num <= 0 || base_den <= 0) {
    throw std::invalid_argument("quantization level: base must be positive");
  }
  if (refine_factor < 2) {
    throw std::invalid_argument("quantization level: refine factor must be >= 2");
  }
  if (refinements < 0) {
    throw std::invalid_argument("quantization level: refinements must be >= 0");
  }
  const std::int64_t g = std::gcd(base_num, base_den);
  num_ = base_num / g;
  den_ = base_den / g;
  refine_factor_ = refine_factor;
  refinements_ = 0;
  for (int i = 0; i < refinements; ++i) {
    den_ = checked_mul(den_, refine_factor_,
                       "quantization level: exact denominator overflow");
    ++refinements_;
  }
  // refine_factor may share factors with the numerator; keep reduced.
  const std::int64_t g2 = std::gcd(num_, den_);
  num_ /= g2;
  den_ /= g2;
}

double QuantizationLevel::delta() const {
  return static_cast<double>(static_cast<long double>(num_) /
                             static_cast<long double>(den_));
}

QuantizationLevel QuantizationLevel::refined() const {
  QuantizationLevel next = *this;
  if (next.num_ % next.refine_factor_ == 0) {
    next.num_ /= next.refine_factor_;
  } else {
    next.den_ = checked_mul(next.den_, next.refine_factor_,
                            "quantization level: exact denominator overflow");
  }
  ++next.refinements_;
  return next;
}

std::int64_t QuantizationLevel::quantize(double value) const {
  if (!std::isfinite(value)) {
    throw std::invalid_argument("quantize: non-finite input");
  }
  const long double t = static_cast<long double>(value) *
                        static_cast<long double>(den_) /
                        static_cast<long double>(num_);
  if (std::fabs(t) >= 0x1.0p62L) {
    throw std::overflow_error("quantize: index exceeds 64-bit range");
  }
  const long double fl = std::floor(t);
  std::int64_t index = static_cast<std::int64_t>(fl);
  const long double gap = (fl + 1.0L) - t;
  const long double snap = kGridSnap * std::max(std::fabs(t), 1.0L);
  if (gap <= snap) ++index;
  return index;
}

QuantizationLevel parse_level(std::string_view text, int refine_factor) {
  const std::string s(text);
  auto fail = [&] {
    throw std::invalid_argument("quantization level: cannot parse \"" + s + "\"");
  };
  if (auto slash = s.find('/'); slash != std::string::npos) {
    std::int64_t p = 0, q = 0;
    auto r1 = std::from_chars(s.data(), s.data() + slash, p);
    auto r2 = std::from_chars(s.data() + slash + 1, s.data() + s.size(), q);
    if (r1.ec != std::errc{} || r1.ptr != s.data() + slash ||
        r2.ec != std::errc{} || r2.ptr != s.data() + s.size()) {
      fail();
    }
    return QuantizationLevel(p, q, refine_factor);
  }

  // Decimal / scientific form: digits [. digits] [e exp]
  std::size_t pos = 0;
  bool any_digit = false;
  std::int64_t mantissa = 0;
  int frac_digits = 0;
  bool in_frac = false;
  for (; pos < s.size(); ++pos) {
    const char c = s[pos];
    if (c >= '0' && c <= '9') {
      mantissa = checked_mul(mantissa, 10, "quantization level: base overflow");
      mantissa += c - '0';
      if (in_frac) ++frac_digits;
      any_digit = true;
    } else if (c == '.' && !in_frac) {
      in_frac = true;
    } else {
      break;
    }
  }
  if (!any_digit) fail();
  int exponent = 0;
  if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
    auto r = std::from_chars(s.data() + pos + 1, s.data() + s.size(), exponent);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) fail();
  } else if (pos != s.size()) {
    fail();
  }
  std::int64_t num = mantissa;
  std::int64_t den = 1;
  int net = exponent - frac_digits;
  for (; net > 0; --net) num = checked_mul(num, 10, "quantization level: base overflow");
  for (; net < 0; ++net) den = checked_mul(den, 10, "quantization level: base overflow");
  return QuantizationLevel(num, den, refine_factor);
}

double GridValue::to_real() const {
  return static_cast<double>(static_cast<long double>(index) *
                             static_cast<long double>(level.delta_num()) /
                             static_cast<long double>(level.delta_den()));
}

GridValue GridValue::refined() const {
  GridValue next;
  next.level = level.refined();
  // index * delta == (index * c_r) * (delta / c_r); keep it exact.
  next.index = checked_mul(index, level.refine_factor(),
                           "grid value: index overflow on refinement");
  return next;
}

}  // namespace dqopt
