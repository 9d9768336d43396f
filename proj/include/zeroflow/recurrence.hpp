#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "zeroflow/rational.hpp"
#include "zeroflow/scaled_real.hpp"

namespace zeroflow {

/// Power-law asymptotics a_n ~ a n^alpha, b_n ~ b n^beta of a raw recurrence.
/// t1, t2 are the roots of t^2 + a t + b = 0 with |t2| <= |t1|; they matter
/// only when 2 alpha == beta.
struct RecurrenceAsymptotics {
  Rational alpha;
  Rational beta;
  double a = 0.0;
  double b = 0.0;
  std::optional<double> t1;
  std::optional<double> t2;
};

/// phi_{n+1} + a_n(x) phi_n + b_n phi_{n-1} = 0 for n >= 1, together with the
/// two-term condition phi_1 + a_0(x) phi_0 = 0. Each a_n must be affine in x,
/// a_n(x) = -(alpha_n x - ctilde_n) with alpha_n != 0.
struct RawRecurrence {
  std::function<double(std::size_t n, double x)> a;
  std::function<double(std::size_t n)> b;
  RecurrenceAsymptotics asymptotics;
  /// Largest index n for which a_n and b_n are defined; unbounded if empty.
  std::optional<std::size_t> extent;
};

/// Materialized coefficients for polynomials up to degree `degree()`:
/// c[0..degree), lam[0..degree) with lam[0] == 1.
struct CoefficientTable {
  std::vector<double> c;
  std::vector<double> lam;

  std::size_t degree() const noexcept { return c.size(); }
};

/// Monic recurrence P_{n+1} = (x - c_n) P_n - lambda_n P_{n-1}, P_{-1} = 0,
/// P_0 = 1, lambda_0 = 1. Coefficients come from generators so the usable
/// degree is unbounded unless `max_degree()` says otherwise.
///
/// Immutable and safe to share between threads.
class MonicRecurrence {
public:
  using Generator = std::function<double(std::size_t)>;

  /// Throws Error(NonPositiveLambda) if a prefix of lambda_n is not positive.
  MonicRecurrence(Generator c, Generator lam, std::string description = {},
                  std::optional<std::size_t> max_degree = std::nullopt);

  /// lam[i] is lambda_{i+1}. Usable degree is min(c.size(), lam.size() + 1).
  static MonicRecurrence tabulated(std::vector<double> c, std::vector<double> lam,
                                   std::string description = {});

  double c(std::size_t n) const { return c_(n); }
  /// lambda_n; lambda_0 is 1 by convention.
  double lam(std::size_t n) const { return n == 0 ? 1.0 : lam_(n); }

  std::optional<std::size_t> max_degree() const noexcept { return max_degree_; }
  const std::string& description() const noexcept { return description_; }

  /// Recurrence of the associated polynomials P^(shift).
  MonicRecurrence associated(std::size_t shift) const;

  /// Coefficients needed for degree `degree`. Validates lambda_n > 0 and
  /// throws Error(DegreeOutOfRange) beyond max_degree().
  CoefficientTable table(std::size_t degree) const;

private:
  Generator c_;
  Generator lam_;
  std::string description_;
  std::optional<std::size_t> max_degree_;
};

/// Number of lambda_n checked eagerly at construction.
inline constexpr std::size_t kEagerLambdaCheck = 256;

/// Converts a raw recurrence into monic form via phi_n = s_n P_n with
/// s_{n+1} = alpha_n s_n: c_n = ctilde_n / alpha_n and
/// lambda_n = b_n / (alpha_n alpha_{n-1}).
///
/// Checks indices up to min(extent, check_through) eagerly; beyond that the
/// returned generators validate on materialization.
MonicRecurrence to_monic(const RawRecurrence& raw, std::size_t check_through = kEagerLambdaCheck);

/// P_0(x), ..., P_{n_max}(x) without overflow or underflow. The two live
/// terms are rescaled by a common power of two at every step, which leaves
/// every mantissa bit unchanged.
std::vector<ScaledReal> eval_sequence(const MonicRecurrence& rec, double x, std::size_t n_max);

/// #{ l : x_{n,l} < x } by counting sign changes of P_0(x), ..., P_n(x).
/// An exact P_j(x) = 0 takes the sign of -P_{j-1}(x).
std::size_t count_zeros_below(const MonicRecurrence& rec, double x, std::size_t n);
std::size_t count_zeros_below(const CoefficientTable& table, double x, std::size_t n);

/// Gershgorin interval of the n x n Jacobi matrix; contains every zero of P_n.
std::pair<double, double> zero_bounds(const CoefficientTable& table, std::size_t n);

}  // namespace zeroflow
