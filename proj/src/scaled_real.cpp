#include "zeroflow/scaled_real.hpp"

#include <cmath>
#include <limits>

#include "zeroflow/error.hpp"

namespace zeroflow {

namespace {

// Exponent gap beyond which the smaller addend cannot affect a 53-bit sum.
constexpr std::int64_t kNegligibleGap = 60;

}  // namespace

ScaledReal::ScaledReal(double value) noexcept {
  if (value == 0.0 || !std::isfinite(value)) return;
  int e = 0;
  const double m = std::frexp(std::fabs(value), &e);  // m in [0.5, 1)
  sign_ = value < 0.0 ? -1 : 1;
  mantissa_ = m * 2.0;
  exp2_ = static_cast<std::int64_t>(e) - 1;
}

ScaledReal ScaledReal::scaled(double value, std::int64_t exp2) noexcept {
  ScaledReal r(value);
  if (!r.is_zero()) r.exp2_ += exp2;
  return r;
}

double ScaledReal::to_double() const noexcept {
  if (sign_ == 0) return 0.0;
  if (exp2_ > 1100) return sign_ * std::numeric_limits<double>::infinity();
  if (exp2_ < -1100) return sign_ * 0.0;
  return sign_ * std::ldexp(mantissa_, static_cast<int>(exp2_));
}

double ScaledReal::log2_abs() const noexcept {
  if (sign_ == 0) return -std::numeric_limits<double>::infinity();
  return static_cast<double>(exp2_) + std::log2(mantissa_);
}

ScaledReal ScaledReal::abs() const noexcept {
  ScaledReal r = *this;
  if (r.sign_ < 0) r.sign_ = 1;
  return r;
}

ScaledReal ScaledReal::ldexp(std::int64_t shift) const noexcept {
  ScaledReal r = *this;
  if (r.sign_ != 0) r.exp2_ += shift;
  return r;
}

ScaledReal ScaledReal::operator-() const noexcept {
  ScaledReal r = *this;
  r.sign_ = -r.sign_;
  return r;
}

ScaledReal operator*(const ScaledReal& lhs, const ScaledReal& rhs) noexcept {
  if (lhs.is_zero() || rhs.is_zero()) return {};
  // product of two mantissas in [1,2) lies in [1,4): exact up to one rounding
  return ScaledReal::scaled(lhs.sign_ * rhs.sign_ * lhs.mantissa_ * rhs.mantissa_,
                            lhs.exp2_ + rhs.exp2_);
}

ScaledReal operator/(const ScaledReal& lhs, const ScaledReal& rhs) {
  if (rhs.is_zero()) throw Error(Errc::InvalidArgument, "ScaledReal division by zero");
  if (lhs.is_zero()) return {};
  return ScaledReal::scaled(lhs.sign_ * rhs.sign_ * lhs.mantissa_ / rhs.mantissa_,
                            lhs.exp2_ - rhs.exp2_);
}

ScaledReal operator+(const ScaledReal& lhs, const ScaledReal& rhs) noexcept {
  if (lhs.is_zero()) return rhs;
  if (rhs.is_zero()) return lhs;
  const ScaledReal& big = lhs.exp2_ >= rhs.exp2_ ? lhs : rhs;
  const ScaledReal& small = lhs.exp2_ >= rhs.exp2_ ? rhs : lhs;
  const std::int64_t gap = big.exp2_ - small.exp2_;
  if (gap > kNegligibleGap) return big;
  const double sum = big.sign_ * big.mantissa_ +
                     small.sign_ * std::ldexp(small.mantissa_, -static_cast<int>(gap));
  return ScaledReal::scaled(sum, big.exp2_);
}

ScaledReal operator-(const ScaledReal& lhs, const ScaledReal& rhs) noexcept {
  return lhs + (-rhs);
}

std::strong_ordering operator<=>(const ScaledReal& lhs, const ScaledReal& rhs) noexcept {
  if (lhs.sign_ != rhs.sign_) return lhs.sign_ <=> rhs.sign_;
  if (lhs.sign_ == 0) return std::strong_ordering::equal;
  // same nonzero sign: compare magnitudes, flip for negatives
  std::strong_ordering mag = std::strong_ordering::equal;
  if (lhs.exp2_ != rhs.exp2_) {
    mag = lhs.exp2_ <=> rhs.exp2_;
  } else if (lhs.mantissa_ < rhs.mantissa_) {
    mag = std::strong_ordering::less;
  } else if (lhs.mantissa_ > rhs.mantissa_) {
    mag = std::strong_ordering::greater;
  }
  if (lhs.sign_ > 0) return mag;
  return 0 <=> mag;
}

}  // namespace zeroflow
