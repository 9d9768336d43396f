#pragma once

#include <compare>
#include <cstdint>

namespace zeroflow {

/// A real number stored as sign * mantissa * 2^exp2 with mantissa in [1, 2)
/// and a 64-bit exponent. Used wherever recurrence values leave the range of
/// double. Zero has sign 0, mantissa 0 and exponent 0.
///
/// Converting a finite double to ScaledReal and back is exact.
class ScaledReal {
public:
  constexpr ScaledReal() noexcept = default;
  explicit ScaledReal(double value) noexcept;

  /// value * 2^exp2, renormalized. `value` must be finite.
  static ScaledReal scaled(double value, std::int64_t exp2) noexcept;

  int sign() const noexcept { return sign_; }
  double mantissa() const noexcept { return mantissa_; }
  std::int64_t exp2() const noexcept { return exp2_; }
  bool is_zero() const noexcept { return sign_ == 0; }

  /// Nearest double; saturates to +-inf or flushes to +-0 outside the range.
  double to_double() const noexcept;
  /// log2 |value|; -inf for zero.
  double log2_abs() const noexcept;

  ScaledReal abs() const noexcept;
  ScaledReal ldexp(std::int64_t shift) const noexcept;
  ScaledReal operator-() const noexcept;

  friend ScaledReal operator*(const ScaledReal& lhs, const ScaledReal& rhs) noexcept;
  /// Throws zeroflow::Error(InvalidArgument) on division by zero.
  friend ScaledReal operator/(const ScaledReal& lhs, const ScaledReal& rhs);
  friend ScaledReal operator+(const ScaledReal& lhs, const ScaledReal& rhs) noexcept;
  friend ScaledReal operator-(const ScaledReal& lhs, const ScaledReal& rhs) noexcept;

  friend bool operator==(const ScaledReal&, const ScaledReal&) noexcept = default;
  friend std::strong_ordering operator<=>(const ScaledReal& lhs,
                                          const ScaledReal& rhs) noexcept;

private:
  int sign_ = 0;
  double mantissa_ = 0.0;
  std::int64_t exp2_ = 0;
};

}  // namespace zeroflow
