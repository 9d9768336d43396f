#include "zeroflow/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "zeroflow/error.hpp"
#include "zeroflow/flows.hpp"
#include "zeroflow/parallel.hpp"

namespace zeroflow {
namespace {

// Common exponent bookkeeping for a handful of doubles that are rescaled
// together, so their ratios stay exact.
int shared_shift(std::initializer_list<double> values) {
  double big = 0.0;
  for (double v : values) big = std::max(big, std::abs(v));
  if (big == 0.0 || !std::isfinite(big)) return 0;
  return std::ilogb(big);
}

// P^(offset)_degree(x) from a table that covers indices offset..offset+degree-1.
ScaledReal associated_value(const CoefficientTable& t, std::size_t offset, double x,
                            std::size_t degree) {
  double prev = 0.0;
  double cur = 1.0;
  std::int64_t exp2 = 0;
  for (std::size_t j = 0; j < degree; ++j) {
    const double lam = j == 0 ? 1.0 : t.lam[offset + j];
    const double next = (x - t.c[offset + j]) * cur - lam * prev;
    prev = cur;
    cur = next;
    const int k = shared_shift({prev, cur});
    prev = std::ldexp(prev, -k);
    cur = std::ldexp(cur, -k);
    exp2 += k;
  }
  return ScaledReal::scaled(cur, exp2);
}

// First component squared of the unit eigenvector of the Jacobi matrix at
// eigenvalue x, from a twisted factorization: forward and backward pivots meet
// at the index r minimizing |gamma_r|, and the vector is unrolled outward
// from z_r = 1. Positive by construction and accurate for every node,
// including those where P^(1)_{n-1} and P_n share a zero to rounding.
ScaledReal gauss_weight(const CoefficientTable& t, std::size_t n, double x) {
  if (n == 1) return ScaledReal(1.0);
  double pivmin = 1.0;
  for (std::size_t j = 1; j < n; ++j) pivmin = std::max(pivmin, t.lam[j]);
  pivmin *= std::numeric_limits<double>::min();
  auto guard = [pivmin](double v) { return std::abs(v) < pivmin ? -pivmin : v; };

  std::vector<double> fwd(n), bwd(n);
  fwd[0] = guard(t.c[0] - x);
  for (std::size_t j = 1; j < n; ++j) fwd[j] = guard((t.c[j] - x) - t.lam[j] / fwd[j - 1]);
  bwd[n - 1] = guard(t.c[n - 1] - x);
  for (std::size_t j = n - 1; j-- > 0;) bwd[j] = guard((t.c[j] - x) - t.lam[j + 1] / bwd[j + 1]);

  std::size_t r = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    const double gamma = std::abs(fwd[j] + bwd[j] - (t.c[j] - x));
    if (gamma < best) {
      best = gamma;
      r = j;
    }
  }

  ScaledReal z(1.0);
  ScaledReal norm(1.0);
  for (std::size_t j = r; j-- > 0;) {
    z = z * ScaledReal(-std::sqrt(t.lam[j + 1]) / fwd[j]);
    norm = norm + z * z;
  }
  const ScaledReal first = z;
  z = ScaledReal(1.0);
  for (std::size_t j = r + 1; j < n; ++j) {
    z = z * ScaledReal(-std::sqrt(t.lam[j]) / bwd[j]);
    norm = norm + z * z;
  }
  return first * first / norm;
}

}  // namespace

std::vector<double> DiscreteMeasure::weights_as_double() const {
  std::vector<double> out;
  out.reserve(weights.size());
  for (const auto& w : weights) out.push_back(w.to_double());
  return out;
}

double DiscreteMeasure::total_weight() const {
  double s = 0.0;
  for (const auto& w : weights) s += w.to_double();
  return s;
}

double DiscreteMeasure::moment(unsigned power) const {
  ScaledReal s;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    ScaledReal term = weights[k];
    const ScaledReal x(nodes[k]);
    for (unsigned j = 0; j < power; ++j) term = term * x;
    s = s + term;
  }
  return s.to_double();
}

double DiscreteMeasure::stieltjes(double z) const {
  ScaledReal s;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const double gap = z - nodes[k];
    if (gap == 0.0) throw Error(Errc::PoleHit, "Stieltjes transform evaluated at a node", k);
    s = s + weights[k] / ScaledReal(gap);
  }
  return s.to_double();
}

double eval_F(const MonicRecurrence& rec, double x, std::size_t depth) {
  if (depth == 0) throw Error(Errc::InvalidArgument, "continued fraction depth must be positive");
  return eval_F(rec.table(depth), x, depth);
}

double eval_F(const CoefficientTable& t, double x, std::size_t depth) {
  if (depth == 0 || depth > t.degree())
    throw Error(Errc::InvalidArgument, "continued fraction depth outside the table");
  double tail = t.c[depth - 1] - x;
  for (std::size_t k = depth - 1; k >= 1; --k) {
    if (tail == 0.0) throw Error(Errc::PoleHit, "partial denominator vanished", k);
    tail = (t.c[k - 1] - x) - t.lam[k] / tail;
  }
  return tail;
}

double eval_E(const MonicRecurrence& rec, double x, std::size_t depth) {
  if (depth == 0) throw Error(Errc::InvalidArgument, "continued fraction depth must be positive");
  const CoefficientTable t = rec.table(depth);
  const ScaledReal den = associated_value(t, 0, x, depth);
  if (den.is_zero()) throw Error(Errc::PoleHit, "P_n vanishes at x", depth);
  const ScaledReal num = associated_value(t, 1, x, depth - 1);
  return (num / den).to_double();
}

DiscreteMeasure partial_fractions(const MonicRecurrence& rec, std::size_t n, unsigned threads) {
  if (n == 0) throw Error(Errc::InvalidArgument, "measure degree must be positive");
  DiscreteMeasure m;
  m.degree = n;
  m.nodes = zeros_of(rec, n, n, threads).zeros;
  m.weights.resize(n);
  const CoefficientTable t = rec.table(n);
  detail::parallel_for(n, threads, [&](std::size_t k) { m.weights[k] = gauss_weight(t, n, m.nodes[k]); });
  return m;
}

SpectralMass spectral_mass(const MonicRecurrence& rec, double xi, std::size_t l_max,
                           const SpectralMassOptions& options) {
  if (l_max == 0) throw Error(Errc::InvalidArgument, "l_max must be positive");
  const CoefficientTable t = rec.table(l_max);

  // Orthonormal values u_l = P_l / sqrt(n_l), all stored as value * 2^exp2
  // with sum scaled by 2^(2 exp2).
  double prev = 0.0;
  double cur = 1.0;
  double sum = 1.0;
  std::int64_t exp2 = 0;
  double last_term = 1.0;
  std::size_t small_run = 0;
  std::size_t rising = 0;
  const double log2_threshold = std::log2(options.divergence_threshold);

  SpectralMass out;
  out.xi = xi;
  std::size_t l = 1;
  for (; l < l_max; ++l) {
    const double s_prev = std::sqrt(t.lam[l - 1]);
    const double s_cur = std::sqrt(t.lam[l]);
    const double next = ((xi - t.c[l - 1]) * cur - (l == 1 ? 0.0 : s_prev * prev)) / s_cur;
    prev = cur;
    cur = next;
    const int k = shared_shift({prev, cur});
    if (k != 0) {
      prev = std::ldexp(prev, -k);
      cur = std::ldexp(cur, -k);
      sum = std::ldexp(sum, -2 * k);
      last_term = std::ldexp(last_term, -2 * k);
      exp2 += k;
    }
    const double term = cur * cur;
    sum += term;
    rising = term > last_term ? rising + 1 : 0;
    last_term = term;

    small_run = term <= options.rel_tol * sum ? small_run + 1 : 0;
    if (small_run >= 2) {
      out.converged = true;
      ++l;
      break;
    }
    const double log2_sum = std::log2(sum) + 2.0 * static_cast<double>(exp2);
    if (log2_sum > log2_threshold && rising >= options.rising_window) {
      throw Error(Errc::Divergent, "orthonormal sum grows without bound at x", l);
    }
  }
  const double log2_sum = std::log2(sum) + 2.0 * static_cast<double>(exp2);
  if (!out.converged && log2_sum > log2_threshold) {
    throw Error(Errc::Divergent, "orthonormal sum did not settle before l_max", l);
  }
  out.terms = l;
  out.mass = std::exp2(-log2_sum);
  out.tail = last_term / sum;
  return out;
}

namespace {

// Backward recurrence from index `start`; returns phi_0..phi_{n_max} with
// phi_0 = 1 as ScaledReal.
std::vector<ScaledReal> miller(const RawRecurrence& raw, double xi, std::size_t start,
                               std::size_t n_max) {
  std::vector<ScaledReal> phi(n_max + 1);
  double next = 0.0;  // phi_{n+1}
  double cur = 1.0;   // phi_n
  std::int64_t exp2 = 0;
  if (start <= n_max) phi[start] = ScaledReal(cur);
  for (std::size_t n = start; n >= 1; --n) {
    const double prev = -(next + raw.a(n, xi) * cur) / raw.b(n);
    next = cur;
    cur = prev;
    const int k = shared_shift({next, cur});
    next = std::ldexp(next, -k);
    cur = std::ldexp(cur, -k);
    exp2 += k;
    if (n - 1 <= n_max) phi[n - 1] = ScaledReal::scaled(cur, exp2);
  }
  if (phi[0].is_zero()) throw Error(Errc::NotMinimal, "minimal solution has phi_0 = 0");
  const ScaledReal norm = phi[0];
  for (auto& v : phi) v = v / norm;
  return phi;
}

double bargmann_term(const ScaledReal& v, std::size_t n) {
  if (v.is_zero()) return 0.0;
  const double log2_term =
      2.0 * v.log2_abs() + std::lgamma(static_cast<double>(n) + 1.0) / std::numbers::ln2;
  return std::exp2(log2_term);
}

}  // namespace

EigenvectorResult reconstruct_eigenvector(const RawRecurrence& raw, double xi, std::size_t n_max,
                                          double tol) {
  if (n_max < 2) throw Error(Errc::InvalidArgument, "n_max must be at least 2");
  std::size_t near = 2 * n_max;
  std::size_t far = 4 * n_max;
  if (raw.extent) {
    if (*raw.extent < n_max) throw Error(Errc::DegreeOutOfRange, "n_max beyond recurrence extent");
    far = std::min(far, *raw.extent);
    near = std::min(near, far);
  }
  const auto a = miller(raw, xi, near, n_max);
  const auto b = miller(raw, xi, far, n_max);

  EigenvectorResult out;
  out.phi.reserve(n_max + 1);
  out.bargmann_sums.reserve(n_max + 1);
  double sum = 0.0;
  double diff = 0.0;
  double last = 0.0;
  for (std::size_t n = 0; n <= n_max; ++n) {
    out.phi.push_back(b[n].to_double());
    last = bargmann_term(b[n], n);
    sum += last;
    out.bargmann_sums.push_back(sum);
    diff += bargmann_term(a[n] - b[n], n);
  }
  out.start_discrepancy = std::sqrt(diff / sum);
  out.saturated = last <= tol * sum;

  // a_0(xi) = a_0(0) - alpha_0 xi; measure against the separate terms
  const double a0 = raw.a(0, xi);
  const double a0_at_zero = raw.a(0, 0.0);
  const double scale = std::max({std::abs(out.phi[1]),
                                 (std::abs(a0_at_zero) + std::abs(a0_at_zero - a0)) * std::abs(out.phi[0]),
                                 1e-300});
  out.two_term_residual = std::abs(out.phi[1] + a0 * out.phi[0]) / scale;

  if (out.start_discrepancy > tol)
    throw Error(Errc::NotMinimal, "backward recurrence did not settle");
  if (!out.saturated) throw Error(Errc::NotMinimal, "Bargmann sums do not saturate");
  if (out.two_term_residual > tol)
    throw Error(Errc::NotMinimal, "two-term condition fails; x is not a spectral point");
  return out;
}

}  // namespace zeroflow
