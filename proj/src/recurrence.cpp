#include "zeroflow/recurrence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "zeroflow/error.hpp"

namespace zeroflow {

namespace {

void check_lambda(double value, std::size_t n) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw Error(Errc::NonPositiveLambda,
                "lambda_" + std::to_string(n) + " = " + std::to_string(value) +
                    " is not positive; the recurrence does not define a positive-definite OPS",
                n);
  }
}

void check_c(double value, std::size_t n) {
  if (!std::isfinite(value)) {
    throw Error(Errc::InvalidArgument, "c_" + std::to_string(n) + " is not finite", n);
  }
}

// Affine decomposition a_n(x) = -(alpha_n x - ctilde_n) of a raw coefficient.
struct AffineCoefficient {
  double alpha;
  double ctilde;
};

AffineCoefficient affine_part(const RawRecurrence& raw, std::size_t n) {
  const double at_minus = raw.a(n, -1.0);
  const double at_zero = raw.a(n, 0.0);
  const double at_plus = raw.a(n, 1.0);
  const double scale = std::max({std::fabs(at_minus), std::fabs(at_zero), std::fabs(at_plus)});
  const double curvature = at_plus - 2.0 * at_zero + at_minus;
  if (!std::isfinite(curvature) || std::fabs(curvature) > 1e-9 * scale) {
    throw Error(Errc::NonlinearCoefficient,
                "a_" + std::to_string(n) + " is not affine in the energy variable", n);
  }
  const double alpha = 0.5 * (at_minus - at_plus);
  if (alpha == 0.0) {
    throw Error(Errc::ZeroSlope, "a_" + std::to_string(n) + " does not depend on the energy variable",
                n);
  }
  return {alpha, at_zero};
}

}  // namespace

MonicRecurrence::MonicRecurrence(Generator c, Generator lam, std::string description,
                                 std::optional<std::size_t> max_degree)
    : c_(std::move(c)),
      lam_(std::move(lam)),
      description_(std::move(description)),
      max_degree_(max_degree) {
  std::size_t limit = kEagerLambdaCheck;
  if (max_degree_) limit = std::min(limit, *max_degree_);
  for (std::size_t n = 0; n < limit; ++n) {
    check_c(c_(n), n);
    if (n >= 1) check_lambda(lam_(n), n);
  }
}

MonicRecurrence MonicRecurrence::tabulated(std::vector<double> c, std::vector<double> lam,
                                           std::string description) {
  for (std::size_t i = 0; i < lam.size(); ++i) check_lambda(lam[i], i + 1);
  for (std::size_t i = 0; i < c.size(); ++i) check_c(c[i], i);
  const std::size_t usable = std::min(c.size(), lam.size() + 1);
  auto cs = std::make_shared<const std::vector<double>>(std::move(c));
  auto ls = std::make_shared<const std::vector<double>>(std::move(lam));
  return MonicRecurrence(
      [cs](std::size_t n) {
        if (n >= cs->size()) throw Error(Errc::DegreeOutOfRange, "c_" + std::to_string(n) + " not tabulated");
        return (*cs)[n];
      },
      [ls](std::size_t n) {
        if (n == 0) return 1.0;
        if (n > ls->size()) {
          throw Error(Errc::DegreeOutOfRange, "lambda_" + std::to_string(n) + " not tabulated");
        }
        return (*ls)[n - 1];
      },
      std::move(description), usable);
}

MonicRecurrence MonicRecurrence::associated(std::size_t shift) const {
  if (shift == 0) return *this;
  std::optional<std::size_t> degree;
  if (max_degree_) degree = *max_degree_ > shift ? *max_degree_ - shift : 0;
  auto c = c_;
  auto lam = lam_;
  return MonicRecurrence([c, shift](std::size_t n) { return c(n + shift); },
                         [lam, shift](std::size_t n) { return n == 0 ? 1.0 : lam(n + shift); },
                         description_ + " [associated " + std::to_string(shift) + "]", degree);
}

CoefficientTable MonicRecurrence::table(std::size_t degree) const {
  if (max_degree_ && degree > *max_degree_) {
    throw Error(Errc::DegreeOutOfRange,
                "degree " + std::to_string(degree) + " exceeds the usable degree " +
                    std::to_string(*max_degree_) + " of '" + description_ + "'");
  }
  CoefficientTable t;
  t.c.resize(degree);
  t.lam.resize(degree);
  for (std::size_t n = 0; n < degree; ++n) {
    t.c[n] = c_(n);
    check_c(t.c[n], n);
    if (n == 0) {
      t.lam[n] = 1.0;
    } else {
      t.lam[n] = lam_(n);
      check_lambda(t.lam[n], n);
    }
  }
  return t;
}

MonicRecurrence to_monic(const RawRecurrence& raw, std::size_t check_through) {
  if (!raw.a || !raw.b) throw Error(Errc::InvalidArgument, "raw recurrence is missing coefficients");
  auto src = std::make_shared<const RawRecurrence>(raw);

  const std::size_t last = raw.extent ? std::min(*raw.extent, check_through) : check_through;
  for (std::size_t n = 0; n <= last; ++n) {
    const auto cur = affine_part(*src, n);
    if (n == 0) continue;
    const auto prev = affine_part(*src, n - 1);
    const double bn = src->b(n);
    if (bn == 0.0) {
      throw Error(Errc::NonPositiveLambda, "b_" + std::to_string(n) + " vanishes", n);
    }
    check_lambda(bn / (cur.alpha * prev.alpha), n);
  }

  std::optional<std::size_t> degree;
  if (raw.extent) degree = *raw.extent + 1;
  return MonicRecurrence(
      [src](std::size_t n) {
        const auto part = affine_part(*src, n);
        return part.ctilde / part.alpha;
      },
      [src](std::size_t n) {
        if (n == 0) return 1.0;
        return src->b(n) / (affine_part(*src, n).alpha * affine_part(*src, n - 1).alpha);
      },
      "monic form of raw recurrence", degree);
}

std::vector<ScaledReal> eval_sequence(const MonicRecurrence& rec, double x, std::size_t n_max) {
  const CoefficientTable t = rec.table(n_max);
  std::vector<ScaledReal> out;
  out.reserve(n_max + 1);
  out.emplace_back(1.0);

  double prev = 0.0;
  double cur = 1.0;
  std::int64_t shared_exp = 0;
  for (std::size_t n = 1; n <= n_max; ++n) {
    const double next = (x - t.c[n - 1]) * cur - t.lam[n - 1] * prev;
    prev = cur;
    cur = next;
    const double big = std::max(std::fabs(cur), std::fabs(prev));
    if (big != 0.0) {
      const int k = std::ilogb(big);
      prev = std::ldexp(prev, -k);
      cur = std::ldexp(cur, -k);
      shared_exp += k;
    }
    out.push_back(ScaledReal::scaled(cur, shared_exp));
  }
  return out;
}

std::size_t count_zeros_below(const CoefficientTable& table, double x, std::size_t n) {
  if (n > table.degree()) {
    throw Error(Errc::DegreeOutOfRange, "coefficient table too short for degree " + std::to_string(n));
  }
  constexpr double kExactHit = -std::numeric_limits<double>::min();
  std::size_t sign_changes = 0;
  // r = P_j(x) / P_{j-1}(x); a negative ratio is a sign change
  double r = 1.0;
  for (std::size_t j = 1; j <= n; ++j) {
    r = j == 1 ? x - table.c[0] : (x - table.c[j - 1]) - table.lam[j - 1] / r;
    if (r == 0.0) r = kExactHit;
    if (r < 0.0) ++sign_changes;
  }
  return n - sign_changes;
}

std::size_t count_zeros_below(const MonicRecurrence& rec, double x, std::size_t n) {
  return count_zeros_below(rec.table(n), x, n);
}

std::pair<double, double> zero_bounds(const CoefficientTable& table, std::size_t n) {
  if (n == 0 || n > table.degree()) {
    throw Error(Errc::DegreeOutOfRange, "zero_bounds needs 1 <= n <= table degree");
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double radius = 0.0;
    if (i >= 1) radius += std::sqrt(table.lam[i]);
    if (i + 1 < n) radius += std::sqrt(table.lam[i + 1]);
    lo = std::min(lo, table.c[i] - radius);
    hi = std::max(hi, table.c[i] + radius);
  }
  const double pad = 1e-10 * std::max({1.0, std::fabs(lo), std::fabs(hi)});
  return {lo - pad, hi + pad};
}

}  // namespace zeroflow
