#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "zeroflow/recurrence.hpp"

namespace zeroflow {

enum class Parity { plus, minus };

/// Rabi model in one parity subspace, in units of the field frequency:
/// kappa = g / omega, delta = mu / omega. Energies are epsilon = E / omega.
struct RabiParams {
  double kappa = 0.0;
  double delta = 0.0;
  Parity parity = Parity::plus;
};

/// c_n = n + s (-1)^n delta with s = +1 for Parity::plus and -1 for
/// Parity::minus; lambda_n = n kappa^2. Throws Error(KappaZero) for kappa == 0
/// or non-finite parameters. Negative kappa is accepted: only kappa^2 enters.
MonicRecurrence rabi_recurrence(const RabiParams& p);

/// The raw parity recurrence
///   phi_{n+1} + [n - eps + s (-1)^n delta] / (kappa (n+1)) phi_n
///             + phi_{n-1} / (n+1) = 0,
/// whose monic form (phi_n = P_n / (kappa^n n!)) is rabi_recurrence(p).
RawRecurrence rabi_raw(const RabiParams& p);

/// Displaced oscillator: the delta = 0 Rabi recurrence (c_n = n, lambda_n = n kappa^2).
MonicRecurrence displaced_recurrence(double kappa);

/// Exact levels (l - 1) - kappa^2, l = 1..n_levels.
std::vector<double> displaced_oscillator_spectrum(double kappa, std::size_t n_levels);

/// User-supplied recurrence; lam[i] is lambda_{i+1}.
struct TabulatedModel {
  std::vector<double> c;
  std::vector<double> lam;
  std::string description;

  MonicRecurrence recurrence() const;
  /// Largest polynomial degree the table supports.
  std::size_t max_degree() const;
};

/// Parses `{"description": string, "c": [number...], "lam": [number...]}`.
/// Throws Error(ParseError) or Error(NonPositiveLambda) with index n of the
/// offending lambda_n.
TabulatedModel load_tabulated(const std::filesystem::path& path);
TabulatedModel parse_tabulated(const std::string& json_text);

}  // namespace zeroflow
