#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "zeroflow/recurrence.hpp"

namespace zeroflow {

/// The smallest zeros of P_n in increasing order.
struct ZeroTableau {
  std::size_t n = 0;
  std::vector<double> zeros;
};

/// History of the l-th zero x_{n,l} of P_n as n grows (1-based l).
struct ZeroFlow {
  std::size_t l = 0;
  std::vector<std::pair<std::size_t, double>> history;
  bool converged = false;
  std::optional<double> xi;
};

struct LevelResult {
  std::size_t l = 0;
  double xi = 0.0;
  /// Degree at which the flow converged, or the last degree computed.
  std::size_t n_converged = 0;
  /// x_{n',l} - x_{n'',l} over the last two schedule points; NaN if none.
  double last_decrement = 0.0;
  bool converged = false;
};

struct SpectrumResult {
  std::vector<LevelResult> levels;
  std::string model_descriptor;
  double tolerance = 0.0;
  /// True when the schedule ran out before every flow converged.
  bool budget_exceeded = false;
  std::size_t n_final = 0;
  std::vector<ZeroFlow> flows;

  bool all_converged() const noexcept { return !budget_exceeded; }
};

/// Strictly increasing list of degrees at which zeros are recomputed.
class Schedule {
public:
  /// n_start, ceil(growth * n), ... capped by (and ending at) n_max.
  static Schedule geometric(std::size_t n_start, double growth, std::size_t n_max);
  static Schedule explicit_points(std::vector<std::size_t> points);

  const std::vector<std::size_t>& points() const noexcept { return points_; }

private:
  explicit Schedule(std::vector<std::size_t> points) : points_(std::move(points)) {}
  std::vector<std::size_t> points_;
};

inline constexpr double kDefaultGrowth = 1.5;
inline constexpr std::size_t kDefaultNMax = 200000;
inline constexpr std::size_t kDefaultStartMargin = 20;

/// Geometric schedule from n_levels + 20 with growth 1.5.
Schedule default_schedule(std::size_t n_levels, std::size_t n_max = kDefaultNMax);

/// Bracket width at which bisection stops: 2^-50 max(1, |x|).
double bisection_tolerance(double x) noexcept;

/// The `count` smallest zeros of P_n, each isolated by Sturm counts into a
/// bracket containing exactly one zero and bisected to bisection_tolerance.
/// Throws Error(ZeroCollision) if two zeros cannot be separated.
ZeroTableau zeros_of(const MonicRecurrence& rec, std::size_t n, std::size_t count,
                     unsigned threads = 1);

/// Zeros of P_n with the given 1-based indices (ascending). `anchors` are
/// arbitrary points whose Sturm counts seed the brackets, typically the zeros
/// of a lower degree.
std::vector<double> solve_zeros(const CoefficientTable& table, std::size_t n,
                                std::span<const std::size_t> indices,
                                std::span<const double> anchors, unsigned threads = 1);

/// Tracks flows l = 1..n_levels over the schedule. A flow converges when its
/// decrement between successive schedule points drops below `tol` while the
/// decrement sequence is still non-increasing; converged flows are frozen.
/// Stops once every flow has converged. Running out of schedule sets
/// budget_exceeded and returns the partial result.
///
/// Throws Error(NonMonotoneFlow) if a flow moves upward beyond rounding.
SpectrumResult run_flows(const MonicRecurrence& rec, std::size_t n_levels, double tol,
                         const Schedule& schedule, unsigned threads = 1);

/// run_flows restricted to a single flow, with its full history.
ZeroFlow flow_trace(const MonicRecurrence& rec, std::size_t l, const Schedule& schedule,
                    double tol, unsigned threads = 1);

/// The near-coincident zeros x^(2)_{n-1,l-1}, x^(1)_{n,l} and x_{n+1,l+1}
/// of the associated polynomials. Requires l >= 2.
struct CoagulationTriple {
  double second_associated = 0.0;
  double first_associated = 0.0;
  double base = 0.0;
};

CoagulationTriple coagulation_triple(const MonicRecurrence& rec, std::size_t n, std::size_t l);

}  // namespace zeroflow
