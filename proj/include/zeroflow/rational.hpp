#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace zeroflow {

/// Exact rational with a positive denominator, always in lowest terms.
/// Asymptotic exponents are compared exactly (e.g. alpha == -1/2).
class Rational {
public:
  constexpr Rational() noexcept = default;
  Rational(std::int64_t num, std::int64_t den = 1);

  /// Accepts "p", "p/q" and finite decimals such as "-0.25".
  /// Throws zeroflow::Error(ParseError).
  static Rational parse(std::string_view text);

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }
  double to_double() const noexcept { return static_cast<double>(num_) / den_; }
  std::string to_string() const;

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  Rational operator-() const { return Rational(-num_, den_); }

  friend bool operator==(const Rational&, const Rational&) noexcept = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) noexcept;

private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace zeroflow
