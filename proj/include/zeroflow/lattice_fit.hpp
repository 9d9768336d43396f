#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

namespace zeroflow {

/// The four exactly solvable spectral shapes, indexed by n = 1, 2, ...:
///   linear       u0 + u1 n
///   quadratic    u0 + u1 n + u2 n^2
///   linear_q     u0 + u1 q^n
///   q_quadratic  u0 + u1 q^n + u2 q^-n,  0 < q < 1
enum class Family { linear, quadratic, linear_q, q_quadratic };

inline constexpr std::array<Family, 4> kAllFamilies = {Family::linear, Family::quadratic,
                                                       Family::linear_q, Family::q_quadratic};

std::string_view to_string(Family family) noexcept;
/// Accepts "linear", "quadratic", "linear-q", "q-quadratic" (and '_' forms).
std::optional<Family> parse_family(std::string_view name) noexcept;
std::size_t parameter_count(Family family) noexcept;

struct LatticeFit {
  Family family = Family::linear;
  double u0 = 0.0;
  double u1 = 0.0;
  double u2 = 0.0;
  std::optional<double> q;
  /// Root-mean-square deviation over all levels.
  double residual = 0.0;
  std::size_t levels_used = 0;

  double evaluate(double n) const;
};

inline constexpr double kQMargin = 1e-6;

/// Least-squares fit of a strictly increasing spectrum. Throws
/// Error(TooFewLevels) for fewer than 4 levels and Error(DegenerateFit) for a
/// non-increasing spectrum or a rank-deficient design.
LatticeFit fit_lattice(std::span<const double> spectrum, Family family);

/// Fits every family and returns the best one. Fits within rounding of the
/// best residual count as ties and go to the family with fewer parameters.
LatticeFit solvability_distance(std::span<const double> spectrum);

}  // namespace zeroflow
