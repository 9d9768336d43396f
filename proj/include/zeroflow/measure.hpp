#pragma once

#include <cstddef>
#include <vector>

#include "zeroflow/recurrence.hpp"
#include "zeroflow/scaled_real.hpp"

namespace zeroflow {

/// Step-function measure nu_n: jumps M_{n,k} at the zeros x_{n,k} of P_n.
/// Weights are kept as ScaledReal because far nodes carry masses well below
/// the smallest double.
struct DiscreteMeasure {
  std::size_t degree = 0;
  std::vector<double> nodes;
  std::vector<ScaledReal> weights;

  /// Weights rounded to double (tiny ones flush to zero).
  std::vector<double> weights_as_double() const;
  double total_weight() const;
  /// sum_k M_k x_k^power
  double moment(unsigned power) const;
  /// Stieltjes transform sum_k M_k / (z - x_k).
  double stieltjes(double z) const;
};

/// Continued fraction F(x) = a_0 - b_1/(a_1 - b_2/(a_2 - ...)) truncated to
/// `depth` partial denominators, with a_k = c_k - x and b_k = lambda_k,
/// evaluated backward from the tail. depth = 1 gives c_0 - x.
/// Throws Error(PoleHit) if a partial denominator vanishes exactly.
double eval_F(const MonicRecurrence& rec, double x, std::size_t depth);
/// Same, over a pre-materialized table with table.degree() >= depth.
double eval_F(const CoefficientTable& table, double x, std::size_t depth);

/// E(x) = -lambda_0 / F(x) evaluated independently as the polynomial ratio
/// P^(1)_{depth-1}(x) / P_depth(x). depth = 1 gives 1 / (x - c_0).
/// Throws Error(PoleHit) when P_depth(x) == 0.
double eval_E(const MonicRecurrence& rec, double x, std::size_t depth);

/// Nodes x_{n,k} and weights M_{n,k} = P^(1)_{n-1}(x_{n,k}) / P_n'(x_{n,k}).
/// The weights are evaluated as squared first components of the Jacobi
/// eigenvectors, which equals the ratio above but stays accurate where
/// P^(1)_{n-1} and P_n share a zero to within rounding.
DiscreteMeasure partial_fractions(const MonicRecurrence& rec, std::size_t n, unsigned threads = 1);

struct SpectralMass {
  double xi = 0.0;
  double mass = 0.0;
  /// Last partial-sum increment relative to the sum.
  double tail = 0.0;
  std::size_t terms = 0;
  bool converged = false;
};

struct SpectralMassOptions {
  /// Stop once two consecutive increments fall below rel_tol * sum.
  double rel_tol = 1e-13;
  /// Divergence: sum above this with `rising_window` consecutive growing terms.
  double divergence_threshold = 1e12;
  std::size_t rising_window = 100;
};

/// Jump of the orthogonality measure at xi, [sum_l P_l(xi)^2 / n_l]^{-1}
/// with n_l = lambda_1 ... lambda_l, summed over l < l_max.
/// Throws Error(Divergent) when the sum grows without bound (xi is not a
/// spectral point).
SpectralMass spectral_mass(const MonicRecurrence& rec, double xi, std::size_t l_max = 2000,
                           const SpectralMassOptions& options = {});

struct EigenvectorResult {
  /// phi_0..phi_{n_max}, normalized to phi_0 = 1.
  std::vector<double> phi;
  /// Partial sums of |phi_n|^2 n!.
  std::vector<double> bargmann_sums;
  /// |phi_1 + a_0 phi_0| relative to |phi_1| + |alpha_0 xi phi_0| + |ctilde_0 phi_0|.
  double two_term_residual = 0.0;
  /// Relative Bargmann-norm difference between the 2 n_max and 4 n_max starts.
  double start_discrepancy = 0.0;
  bool saturated = false;
};

/// Minimal solution of the raw recurrence at xi by backward recurrence from
/// indices 2 n_max and 4 n_max (phi_{N+1} = 0, phi_N = 1). Throws
/// Error(NotMinimal) when the two starts disagree, the Bargmann sums do not
/// saturate, or the two-term condition fails beyond `tol` (xi not in the
/// spectrum, so the physical solution is dominant).
EigenvectorResult reconstruct_eigenvector(const RawRecurrence& raw, double xi, std::size_t n_max,
                                          double tol = 1e-8);

}  // namespace zeroflow
