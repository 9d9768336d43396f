#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "zeroflow/recurrence.hpp"

namespace zeroflow::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitPartial = 2;

/// Runs the command line `args` (without the program name). Normal output
/// goes to `out` unless --out is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Worker count: hardware concurrency, capped by ZEROFLOW_THREADS if set.
unsigned thread_budget();

struct CfBin {
  double lo = 0.0;
  double hi = 0.0;
  /// Roots of the truncated continued fraction seen by the scan.
  std::size_t cf_roots = 0;
  /// Converged zero-flow levels in [lo, hi).
  std::size_t levels = 0;
};

struct CfComparison {
  std::vector<CfBin> bins;
  std::size_t depth = 0;
  std::size_t cf_total = 0;
  std::size_t level_total = 0;
  bool levels_converged = true;
};

/// Scans F(x) on from, from + step, ... <= to and counts + to - sign
/// transitions (F decreases between its poles, so each marks a root), next
/// to the spectral points that zero flows find in the same bins. Depth
/// defaults to the degree reached by the flows, but at least 64.
CfComparison cf_compare(const MonicRecurrence& rec, double from, double to, double step,
                        double bin, std::optional<std::size_t> depth, double tol,
                        unsigned threads);

}  // namespace zeroflow::cli
